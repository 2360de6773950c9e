#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qbc/codestates.hpp"
#include "qbc/errors.hpp"

using namespace qbc;
using namespace qbc::code;
using fock::Matrix;

namespace {

constexpr double pi = std::numbers::pi;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<oracle::cd> code_points(double t, int M, int b) {
    std::vector<oracle::cd> pts;
    for (int m = 0; m < M; ++m) pts.push_back(std::polar(t, 2.0 * pi * (m + 0.5 * b) / M));
    return pts;
}

}  // namespace

TEST_CASE("code_phase") {
    CHECK(code_phase(0, 0, 8) == 0.0);
    CHECK(code_phase(0, 1, 8) == doctest::Approx(pi / 8));
    CHECK(code_phase(7, 1, 8) == doctest::Approx(15 * pi / 8));
    CHECK_THROWS_AS(code_phase(8, 0, 8), ParameterError);
    CHECK_THROWS_AS(code_phase(-1, 0, 8), ParameterError);
    CHECK_THROWS_AS(code_phase(0, 2, 8), ParameterError);
    CHECK(std::abs(code_amplitude(2.0, 3, 1, 6) - std::polar(2.0, 7 * pi / 6)) < 1e-15);
}

TEST_CASE("CodeParams validation") {
    CHECK_THROWS_AS(CodeParams::with_working_cutoff(1.0, 1), ParameterError);
    CHECK_THROWS_AS(CodeParams::with_working_cutoff(-1.0, 4), ParameterError);
    CHECK_THROWS_AS(CodeParams::with_working_cutoff(NAN, 4), ParameterError);
    const auto p = CodeParams::with_working_cutoff(1.0, 4);
    CHECK(p.N == fock::cutoff_for_energy(1.0, 1e-12) + 6 + 10);
}

TEST_CASE("build_ideal_rho") {
    const auto vac = build_ideal_rho(0.0, 5);
    CHECK(vac.matrix()(0, 0) == fock::Complex(1.0));
    CHECK(max_abs(vac.matrix()) == 1.0);

    const std::size_t N = 30;
    const auto rho = build_ideal_rho(1.0, N);
    double fact = 1.0;
    for (std::size_t n = 0; n <= N; ++n) {
        if (n > 0) fact *= static_cast<double>(n);
        CHECK(rho.matrix()(n, n).real() == doctest::Approx(std::exp(-1.0) / fact).epsilon(1e-13));
    }
    CHECK(std::abs(rho.trace().real() - 1.0) <= oracle::poisson_tail(1.0, N) + 1e-15);
    CHECK(max_abs(rho.matrix() - Matrix(rho.matrix().diagonal().asDiagonal())) == 0.0);
}

TEST_CASE("build_sigma: matrix elements agree with the coherent mixture") {
    for (int b : {0, 1}) {
        const CodeParams p{1.0, 6, 30};
        const auto elems = build_sigma(b, p).matrix();
        CHECK(max_abs(elems - build_sigma_mixture(b, p).matrix()) <= 1e-12);
        CHECK(max_abs(elems - oracle::coherent_mixture(code_points(1.0, 6, b), 30)) <= 1e-12);
    }
}

TEST_CASE("build_sigma property: both constructions agree on random (t, M)") {
    gen::Gen g(41);
    for (int i = 0; i < 20; ++i) {
        const double t = g.real(0.0, 2.0);
        const int M = g.integer(2, 12);
        const int b = g.integer(0, 1);
        const CodeParams p = CodeParams::with_working_cutoff(t, M);
        INFO("t = " << t << " M = " << M << " b = " << b);
        const auto s = build_sigma(b, p);
        CHECK(max_abs(s.matrix() - build_sigma_mixture(b, p).matrix()) <= 1e-12);
        // Diagonal equals that of rho.
        const auto rho = build_ideal_rho(t, p.N);
        CHECK(max_abs(Matrix(s.matrix().diagonal()) - Matrix(rho.matrix().diagonal())) <= 1e-15);
    }
}

TEST_CASE("sigma_0 is real and nonnegative") {
    const auto s = build_sigma(0, {1.3, 5, 30}).matrix();
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            CHECK(s(i, j).imag() == 0.0);
            CHECK(s(i, j).real() >= 0.0);
        }
}

TEST_CASE("mixture is invariant under cyclic relabelling of the phase index") {
    const CodeParams p{1.0, 5, 25};
    std::vector<oracle::cd> shifted;
    for (int m = 0; m < 5; ++m) shifted.push_back(code_amplitude(1.0, (m + 1) % 5, 1, 5));
    CHECK(max_abs(build_sigma(1, p).matrix() - oracle::coherent_mixture(shifted, 25)) <= 1e-12);
}

TEST_CASE("build_D") {
    const CodeParams p{1.0, 8, 40};
    const auto D = build_D(p);
    CHECK(D.kind() == fock::OperatorKind::hermitian);
    const Matrix& d = D.matrix();
    for (Eigen::Index i = 0; i < d.rows(); ++i) CHECK(d(i, i) == fock::Complex(0.0));

    double fact8 = 1.0;
    for (int j = 2; j <= 8; ++j) fact8 *= j;
    CHECK(d(8, 0).real() == doctest::Approx(-std::exp(-1.0) / std::sqrt(fact8)).epsilon(1e-13));

    // Exact zeros off the M-stride.
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j)
            if ((i - j) % 8 != 0) CHECK(d(i, j) == fock::Complex(0.0));

    CHECK(fock::trace_norm(D) <= 2.0 * std::pow(2.0 * std::exp(1.0) / 8.0, 4));
}

TEST_CASE("eigen_sigma for M = 2 matches the even/odd Poisson sums") {
    const auto sys = eigen_sigma(0, {1.0, 2, 30});
    CHECK(sys.values[0] == doctest::Approx(std::exp(-1.0) * std::cosh(1.0)).epsilon(1e-14));
    CHECK(sys.values[1] == doctest::Approx(std::exp(-1.0) * std::sinh(1.0)).epsilon(1e-14));
    CHECK(sys.values[0] == doctest::Approx((1.0 + std::exp(-2.0)) / 2.0).epsilon(1e-14));
}

TEST_CASE("eigen_sigma invariants") {
    for (int b : {0, 1})
        for (int M : {3, 6, 9}) {
            const CodeParams p = CodeParams::with_working_cutoff(1.0, M);
            const auto sys = eigen_sigma(b, p);
            REQUIRE(sys.vectors.size() == static_cast<std::size_t>(M));
            double total = 0.0;
            Matrix recon = Matrix::Zero(p.N + 1, p.N + 1);
            for (int r = 0; r < M; ++r) {
                total += sys.values[r];
                recon += sys.vectors[r].amps() * sys.vectors[r].amps().adjoint();
                CHECK(std::abs(sys.vectors[r].squared_norm() - sys.values[r]) <= oracle::poisson_tail(1.0, p.N) + 1e-15);
                for (int r2 = 0; r2 < M; ++r2)
                    if (r2 != r) CHECK(sys.vectors[r].inner(sys.vectors[r2]) == fock::Complex(0.0));
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
            const auto diff = fock::FockOperator::hermitian(p.N, recon - build_sigma(b, p).matrix());
            CHECK(fock::trace_norm(diff) <= 1e-10);
        }
}

TEST_CASE("sigma_0 and sigma_1 share their spectrum") {
    gen::Gen g(43);
    for (int i = 0; i < 8; ++i) {
        const double t = g.real(0.2, 2.0);
        const int M = g.integer(2, 9);
        const auto p = CodeParams::with_working_cutoff(t, M);
        const auto e0 = fock::hermitian_eigenvalues(build_sigma(0, p));
        const auto e1 = fock::hermitian_eigenvalues(build_sigma(1, p));
        for (std::size_t j = 0; j < e0.size(); ++j) CHECK(std::abs(e0[j] - e1[j]) <= 1e-12);
    }
}

TEST_CASE("sector_weight sums beyond the cutoff") {
    // The full series, independent of N: compare with a 50-digit direct sum.
    for (int M : {2, 4, 7})
        for (int r = 0; r < M; ++r) {
            oracle::hp sum = 0, term = boost::multiprecision::exp(oracle::hp(-2.25));
            for (int n = 0; n < 200; ++n) {
                if (n % M == r) sum += term;
                term = term * oracle::hp(2.25) / oracle::hp(n + 1);
            }
            CHECK(sector_weight(1.5, M, r) == doctest::Approx(static_cast<double>(sum)).epsilon(1e-13));
        }
    CHECK(sector_weight(0.0, 3, 0) == 1.0);
    CHECK(sector_weight(0.0, 3, 2) == 0.0);
    CHECK_THROWS_AS(sector_weight(1.0, 3, 3), ParameterError);
}
