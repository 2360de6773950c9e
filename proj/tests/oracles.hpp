#pragma once

// Test-side reference computations, written independently of the library:
// brute-force sums, closed forms and high-precision window arithmetic.
// Also the random generators used by the property tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <Eigen/Dense>

namespace oracle {

using hp = boost::multiprecision::cpp_bin_float_50;
using cd = std::complex<double>;

/// sum_{n > N} e^{-E} E^n / n!, evaluated as 1 - (head sum) in 50 digits.
inline double poisson_tail(double E, std::size_t N) {
    hp term = boost::multiprecision::exp(-hp(E));
    hp head = 0;
    for (std::size_t n = 0; n <= N; ++n) {
        head += term;
        term = term * hp(E) / hp(n + 1);
    }
    return static_cast<double>(hp(1) - head);
}

/// Smallest N with poisson_tail(E, N) < tol, by linear scan.
inline std::size_t minimal_cutoff(double E, double tol) {
    std::size_t N = 0;
    while (!(poisson_tail(E, N) < tol)) ++N;
    return N;
}

/// <alpha|beta> for untruncated coherent states.
inline cd coherent_inner(cd a, cd b) {
    return std::exp(-(std::norm(a) + std::norm(b)) / 2.0 + std::conj(a) * b);
}

/// 2 (2 e t^2 / M)^{M/2} in 50 digits.
inline double trace_bound(double t, int M) {
    const hp base = hp(2) * boost::multiprecision::exp(hp(1)) * hp(t) * hp(t) / hp(M);
    return static_cast<double>(hp(2) * boost::multiprecision::pow(base, hp(M) / 2));
}

/// [ceil(M^2 ln(1/eps)), floor((eps/2)(M/2e)^{M/2})] in 50 digits.
struct Window {
    long long lo, hi;
    bool empty() const { return lo > hi; }
};

inline Window t1_window(double eps, int M) {
    using boost::multiprecision::ceil;
    using boost::multiprecision::floor;
    using boost::multiprecision::log;
    using boost::multiprecision::pow;
    const hp lo = ceil(hp(M) * hp(M) * log(1 / hp(eps)));
    const hp hi = floor(hp(eps) / 2 * pow(hp(M) / (2 * boost::multiprecision::exp(hp(1))), hp(M) / 2));
    const hp cap = hp(4e18);
    return {static_cast<long long>(lo), static_cast<long long>(hi < cap ? hi : cap)};
}

/// Independent (M, k) scan at t = 1: smallest M with a nonempty window.
inline std::pair<int, long long> scan_t1(double eps, int limit = 512) {
    for (int M = 2; M <= limit; ++M) {
        const auto w = t1_window(eps, M);
        if (!w.empty()) return {M, w.lo};
    }
    return {-1, -1};
}

/// Dense density matrix of a truncated coherent mixture sum_j w_j |a_j><a_j|,
/// with amplitudes built by the recurrence c_{n+1} = c_n a / sqrt(n+1).
inline Eigen::MatrixXcd coherent_mixture(const std::vector<cd>& points, std::size_t N) {
    const auto d = static_cast<Eigen::Index>(N + 1);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    for (cd a : points) {
        Eigen::VectorXcd v(d);
        v[0] = std::exp(-std::norm(a) / 2.0);
        for (Eigen::Index n = 1; n < d; ++n) v[n] = v[n - 1] * a / std::sqrt(static_cast<double>(n));
        rho += v * v.adjoint() / static_cast<double>(points.size());
    }
    return rho;
}

/// Sum of |eigenvalues| of a hermitian matrix.
inline double trace_norm(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace oracle

namespace gen {

/// Hand-rolled generators for the property tests.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    std::complex<double> complex(double radius) {
        return std::polar(std::sqrt(real(0.0, 1.0)) * radius, real(0.0, 2.0 * M_PI));
    }

    Eigen::MatrixXcd hermitian(Eigen::Index d) {
        Eigen::MatrixXcd a(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) a(i, j) = {real(-1, 1), real(-1, 1)};
        return (a + a.adjoint()) / 2.0;
    }

    /// Random density matrix with unit trace.
    Eigen::MatrixXcd density(Eigen::Index d) {
        Eigen::MatrixXcd a(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) a(i, j) = {real(-1, 1), real(-1, 1)};
        Eigen::MatrixXcd rho = a * a.adjoint();
        rho /= rho.trace().real();
        return (rho + rho.adjoint()) / 2.0;
    }
};

}  // namespace gen
