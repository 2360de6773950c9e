#pragma once

// Closed-form security bounds for the phase-based commitment, numeric checks
// of those bounds, and the (M, k) parameter search for a target epsilon.

#include <cstddef>
#include <cstdint>
#include <string>

#include "qbc/document.hpp"

namespace qbc::security {

struct TraceNormBound {
    double general = 0.0;             // 2 (2 e t^2 / M)^{M/2}
    bool valid = false;               // (2 e t^2 / M)^{M/2} < 1/2
    bool simplified_applies = false;  // M > 4 e t^2 + 1
    double simplified = 0.0;          // 2^{-M/2}

    /// Tightest applicable bound (infinity when neither form is valid).
    double best() const;
};

/// Upper bound on ||rho - sigma_0||_1.
TraceNormBound trace_norm_bound(double t, int M);

struct TraceNormCheck {
    double numeric = 0.0;
    TraceNormBound bound;
    std::size_t cutoff = 0;
    double tail_mass = 0.0;
    bool truncation_warning = false;  // tail_mass > 1e-10
    /// numeric <= bound + 1e-10 (and <= 2^{-M/2} + 1e-10 where that form applies);
    /// vacuously true when the bound is not valid.
    bool ok = true;
};

TraceNormCheck numeric_trace_norm_check(double t, int M);

/// k * 2 (2 e t^2 / M)^{M/2}
double pcb_bound(double t, int M, long long k);

/// exp(-4 E k sin^2(pi / 2M)), Alice's opening-attack success probability.
double pca_exact(double E, long long k, int M);

/// 1 - E k pi^2 / M^2
double pca_approx(double E, long long k, int M);

struct SecurityCheck {
    // General pair at amplitude t.
    double alice_value = 0.0;   // exp(-4 t^2 k sin^2(pi/2M))
    double bob_value = 0.0;     // 2 k (2 e t^2 / M)^{M/2}
    bool alice_ok = false;
    bool bob_ok = false;
    // Sufficient pair stated for t = 1.
    double sufficient_alice_value = 0.0;  // exp(-k / M^2)
    double sufficient_bob_value = 0.0;    // 2 k (2 e / M)^{M/2}
    bool sufficient_alice_ok = false;
    bool sufficient_bob_ok = false;

    bool secure() const { return alice_ok && bob_ok; }
    bool sufficient_holds() const { return sufficient_alice_ok && sufficient_bob_ok; }
    /// "none", "alice", "bob" or "alice+bob" for the general pair.
    std::string failed() const;
};

SecurityCheck epsilon_secure_check(double t, int M, long long k, double epsilon);

struct KWindow {
    long long lo = 0;
    long long hi = -1;   // clamped to the long long range
    bool empty() const { return lo > hi; }
    bool contains(long long k) const { return k >= lo && k <= hi; }
};

/// Admissible repetition counts for fixed M: the sufficient pair when t == 1,
/// the general pair otherwise.
KWindow k_window(double epsilon, double t, int M);

struct ParamChoice {
    int M = 0;
    long long k = 0;
    KWindow window;
    bool cube_in_window = false;   // whether k = M^3 is admissible at this M
};

inline constexpr int default_scan_limit = 512;

/// Smallest M with a nonempty window and the smallest k in it.
/// Throws SearchExhausted when no M <= scan_limit works.
ParamChoice find_params(double epsilon, double t, int scan_limit = default_scan_limit);

struct SecurityReport {
    double t = 0.0;
    int M = 0;
    long long k = 0;
    double epsilon = 0.0;
    double pcb_bound = 0.0;
    double pca_exact = 0.0;
    double trace_norm_numeric = 0.0;
    double trace_norm_bound = 0.0;
    bool bound_valid = false;
    bool bound_ok = true;
    bool feasible = false;   // max(pca_exact, pcb_bound) <= epsilon
};

SecurityReport make_report(double t, int M, long long k, double epsilon);
Document to_document(const SecurityReport& report);

}  // namespace qbc::security
