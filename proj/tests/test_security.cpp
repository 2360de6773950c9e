#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qbc/codestates.hpp"
#include "qbc/errors.hpp"
#include "qbc/security.hpp"

using namespace qbc;
using namespace qbc::security;

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

TEST_CASE("trace_norm_bound") {
    const auto b8 = trace_norm_bound(1.0, 8);
    CHECK(b8.general == doctest::Approx(0.42654804713393923).epsilon(1e-14));
    CHECK(b8.general == doctest::Approx(oracle::trace_bound(1.0, 8)).epsilon(1e-14));
    CHECK(b8.valid);
    CHECK(!b8.simplified_applies);

    const auto b12 = trace_norm_bound(1.0, 12);
    CHECK(b12.simplified_applies);
    CHECK(b12.simplified == 0.015625);
    CHECK(b12.best() == 0.015625);

    CHECK(trace_norm_bound(0.0, 5).general == 0.0);
    CHECK(!trace_norm_bound(1.0, 4).valid);   // (2e/4)^2 > 1/2
    CHECK(std::isinf(trace_norm_bound(1.0, 4).best()));
    CHECK_THROWS_AS(trace_norm_bound(1.0, 1), ParameterError);

    gen::Gen g(71);
    for (int i = 0; i < 30; ++i) {
        const double t = g.real(0.1, 3.0);
        const int M = g.integer(2, 80);
        CHECK(trace_norm_bound(t, M).general == doctest::Approx(oracle::trace_bound(t, M)).epsilon(1e-12));
    }
}

TEST_CASE("numeric trace norm respects the bound") {
    for (int M : {6, 8, 10, 12, 16}) {
        const auto c = numeric_trace_norm_check(1.0, M);
        INFO("t = 1, M = " << M << ", numeric = " << c.numeric);
        CHECK(c.ok);
        CHECK(!c.truncation_warning);
        if (c.bound.valid) CHECK(c.numeric <= c.bound.general + 1e-10);
    }
    for (int M : {24, 32}) {
        const auto c = numeric_trace_norm_check(2.0, M);
        CHECK(c.bound.valid);
        CHECK(c.ok);
    }
    CHECK(numeric_trace_norm_check(0.0, 6).numeric == 0.0);
}

TEST_CASE("pcb_bound") {
    CHECK(pcb_bound(1.0, 8, 1) == doctest::Approx(0.42654804713393923).epsilon(1e-14));
    gen::Gen g(73);
    for (int i = 0; i < 20; ++i) {
        const double t = g.real(0.1, 2.0);
        const int M = g.integer(2, 40);
        const long long k = g.integer(1, 1000);
        CHECK(pcb_bound(t, M, 2 * k) == doctest::Approx(2.0 * pcb_bound(t, M, k)).epsilon(1e-15));
    }
    const auto p = code::CodeParams::with_working_cutoff(1.0, 8);
    const double half = 0.5 * fock::trace_norm(code::build_sigma(0, p) - code::build_sigma(1, p));
    CHECK(half <= pcb_bound(1.0, 8, 1));
    CHECK_THROWS_AS(pcb_bound(1.0, 8, 0), ParameterError);
}

TEST_CASE("telescoping bound on two copies") {
    for (double t : {0.5, 0.8})
        for (int M : {4, 6}) {
            const std::size_t N = fock::cutoff_for_energy(t * t, 1e-12) + 4;
            const code::CodeParams p{t, M, N};
            const auto s0 = code::build_sigma(0, p), s1 = code::build_sigma(1, p);
            const double two = 0.5 * fock::trace_norm(fock::tensor(s0, s0) - fock::tensor(s1, s1));
            INFO("t = " << t << " M = " << M);
            CHECK(two <= pcb_bound(t, M, 2) + 1e-12);
        }
}

TEST_CASE("pca_exact and pca_approx") {
    CHECK(pca_exact(1.0, 10, 4) == doctest::Approx(std::exp(-40.0 * std::pow(std::sin(pi / 8), 2))).epsilon(1e-15));
    CHECK(pca_exact(1.0, 10, 4) == doctest::Approx(2.86e-3).epsilon(5e-3));
    CHECK(pca_exact(1.0, 1, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(pca_approx(2.0, 3, 10) == doctest::Approx(1.0 - 6.0 * pi * pi / 100.0));

    // Second-order remainder on a grid where x = E k pi^2 / M^2 <= 0.1.
    int checked = 0;
    for (double E : {0.1, 0.5, 1.0, 2.0})
        for (long long k : {1LL, 2LL, 5LL, 20LL})
            for (int M = 2; M <= 200; M += 3) {
                const double x = E * k * pi * pi / (M * M);
                if (x > 0.1) continue;
                ++checked;
                CHECK(std::abs(pca_exact(E, k, M) - pca_approx(E, k, M)) <= 2.0 * x * x);
            }
    CHECK(checked > 100);
}

TEST_CASE("pca_exact monotonicity") {
    for (int M = 2; M < 40; ++M)
        for (long long k = 1; k < 20; ++k) {
            CHECK(pca_exact(1.0, k + 1, M) < pca_exact(1.0, k, M));
            CHECK(pca_exact(1.0, k, M + 1) > pca_exact(1.0, k, M));
            CHECK(pca_exact(1.1, k, M) < pca_exact(1.0, k, M));
        }
}

TEST_CASE("epsilon_secure_check") {
    const auto good = epsilon_secure_check(1.0, 20, 1843, 1e-2);
    CHECK(good.secure());
    CHECK(good.sufficient_holds());
    CHECK(good.failed() == "none");

    const auto bad = epsilon_secure_check(1.0, 4, 10, 1e-3);
    CHECK(!bad.secure());
    CHECK(!bad.sufficient_alice_ok);
    CHECK(bad.sufficient_alice_value == doctest::Approx(std::exp(-10.0 / 16.0)));
    CHECK(bad.sufficient_alice_value == doctest::Approx(0.535).epsilon(1e-3));
    CHECK((bad.failed() == "alice" || bad.failed() == "alice+bob"));
}

TEST_CASE("the t = 1 sufficient pair implies the general pair") {
    int held = 0;
    for (int M = 2; M <= 60; ++M)
        for (long long k : {1LL, 10LL, 100LL, 1000LL, 5000LL, 100000LL})
            for (double eps : {0.3, 1e-1, 1e-2, 1e-4}) {
                const auto c = epsilon_secure_check(1.0, M, k, eps);
                if (c.sufficient_alice_ok) {
                    ++held;
                    CHECK(c.alice_ok);
                    // sin x >= 2x / pi on [0, pi/2]
                    CHECK(c.alice_value <= c.sufficient_alice_value);
                }
                if (c.sufficient_bob_ok) CHECK(c.bob_ok);
            }
    CHECK(held > 0);
}

TEST_CASE("find_params agrees with an independent 50-digit scan") {
    const auto [M_ref, k_ref] = oracle::scan_t1(1e-2);
    CHECK(M_ref == 20);
    CHECK(k_ref == 1843);
    CHECK(oracle::t1_window(1e-2, 19).empty());
    CHECK(oracle::t1_window(1e-2, 19).hi == 727);

    const auto choice = find_params(1e-2, 1.0);
    CHECK(choice.M == M_ref);
    CHECK(choice.k == k_ref);
    CHECK(choice.window.lo == oracle::t1_window(1e-2, 20).lo);
    CHECK(choice.window.hi == oracle::t1_window(1e-2, 20).hi);
    CHECK(epsilon_secure_check(1.0, choice.M, choice.k, 1e-2).secure());

    for (int M = 2; M <= 60; ++M) {
        const auto w = k_window(1e-2, 1.0, M);
        const auto ref = oracle::t1_window(1e-2, M);
        CHECK(w.lo == std::max(1LL, ref.lo));
        // hi goes through exp/log in double precision: exact only while it is small.
        if (ref.hi < (1LL << 40))
            CHECK(w.hi == ref.hi);
        else if (ref.hi < 4'000'000'000'000'000'000LL)
            CHECK(static_cast<double>(w.hi) == doctest::Approx(static_cast<double>(ref.hi)).epsilon(1e-12));
        else
            CHECK(w.hi >= ref.hi);
    }
}

TEST_CASE("find_params over an epsilon grid") {
    int previous_M = 0;
    for (double eps : {0.3, 0.1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-6, 1e-9}) {
        const auto choice = find_params(eps, 1.0);
        const auto [M_ref, k_ref] = oracle::scan_t1(eps);
        INFO("eps = " << eps);
        CHECK(choice.M == M_ref);
        CHECK(choice.k == k_ref);
        CHECK(epsilon_secure_check(1.0, choice.M, choice.k, eps).secure());
        CHECK(choice.M >= previous_M);
        previous_M = choice.M;
        const long long cube = static_cast<long long>(choice.M) * choice.M * choice.M;
        CHECK(choice.cube_in_window == choice.window.contains(cube));
    }
    for (double t : {0.7, 1.5, 2.0}) {
        const auto choice = find_params(1e-3, t);
        CHECK(epsilon_secure_check(t, choice.M, choice.k, 1e-3).secure());
        CHECK(k_window(1e-3, t, choice.M - 1).empty());
    }
    CHECK_THROWS_AS(find_params(1e-2, 1.0, 19), SearchExhausted);
    CHECK_THROWS_AS(find_params(0.0, 1.0), ParameterError);
}

TEST_CASE("Helstrom success stays under the p_CB bound") {
    for (double t : {0.5, 1.0, 2.0})
        for (int M : {6, 8, 12, 16, 24}) {
            const auto p = code::CodeParams::with_working_cutoff(t, M);
            const double gain = fock::helstrom_success(code::build_sigma(0, p), code::build_sigma(1, p)) - 0.5;
            CHECK(gain <= pcb_bound(t, M, 1) / 2.0 + 1e-12);
        }
}

TEST_CASE("SecurityReport document") {
    const auto r = make_report(1.0, 8, 1, 1e-2);
    CHECK(!r.feasible);
    CHECK(r.bound_ok);
    CHECK(r.feasible == (std::max(r.pca_exact, r.pcb_bound) <= r.epsilon));
    const auto d = to_document(r);
    CHECK(d["pcb_bound"].get<double>() == doctest::Approx(0.42655).epsilon(1e-4));
    CHECK(d["trace_norm_numeric"].get<double>() <= d["trace_norm_bound"].get<double>());
    CHECK(make_report(1.0, 20, 1843, 1e-2).feasible);
}
