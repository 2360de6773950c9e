#include "qbc/security.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qbc/codestates.hpp"
#include "qbc/errors.hpp"
#include "qbc/fockcore.hpp"

namespace qbc::security {

namespace {

constexpr double e = std::numbers::e;
constexpr double pi = std::numbers::pi;
constexpr double bound_slack = 1e-10;

void require_t_M(double t, int M) {
    if (!std::isfinite(t) || t < 0.0) throw ParameterError("t must be finite and >= 0");
    if (M < 2) throw ParameterError("M must be >= 2");
}

// log of (2 e t^2 / M)^{M/2}; -inf at t = 0.
double log_ratio_power(double t, int M) {
    if (t == 0.0) return -std::numeric_limits<double>::infinity();
    return 0.5 * M * std::log(2.0 * e * t * t / M);
}

long long clamp_floor(double log_value) {
    constexpr double log_max = 43.6;   // ln(2^63) ~ 43.67
    if (log_value >= log_max) return std::numeric_limits<long long>::max();
    return static_cast<long long>(std::floor(std::exp(log_value)));
}

}  // namespace

double TraceNormBound::best() const {
    double b = std::numeric_limits<double>::infinity();
    if (valid) b = general;
    if (simplified_applies) b = std::min(b, simplified);
    return b;
}

TraceNormBound trace_norm_bound(double t, int M) {
    require_t_M(t, M);
    TraceNormBound out;
    const double lp = log_ratio_power(t, M);
    out.general = 2.0 * std::exp(lp);
    out.valid = std::exp(lp) < 0.5;
    out.simplified_applies = M > 4.0 * e * t * t + 1.0;
    out.simplified = std::pow(2.0, -0.5 * M);
    return out;
}

TraceNormCheck numeric_trace_norm_check(double t, int M) {
    require_t_M(t, M);
    const auto params = code::CodeParams::with_working_cutoff(t, M);
    TraceNormCheck out;
    out.cutoff = params.N;
    out.tail_mass = fock::poisson_tail(t * t, params.N);
    out.truncation_warning = out.tail_mass > 1e-10;
    out.numeric = fock::trace_norm(code::build_D(params));
    out.bound = trace_norm_bound(t, M);
    if (out.bound.valid) out.ok = out.numeric <= out.bound.general + bound_slack;
    if (out.bound.simplified_applies) out.ok = out.ok && out.numeric <= out.bound.simplified + bound_slack;
    return out;
}

double pcb_bound(double t, int M, long long k) {
    require_t_M(t, M);
    if (k < 1) throw ParameterError("k must be >= 1");
    return static_cast<double>(k) * 2.0 * std::exp(log_ratio_power(t, M));
}

double pca_exact(double E, long long k, int M) {
    if (!std::isfinite(E) || E < 0.0) throw ParameterError("E must be finite and >= 0");
    if (M < 2 || k < 1) throw ParameterError("need M >= 2 and k >= 1");
    const double s = std::sin(pi / (2.0 * M));
    return std::exp(-E * static_cast<double>(k) * 4.0 * s * s);
}

double pca_approx(double E, long long k, int M) {
    if (!std::isfinite(E) || E < 0.0) throw ParameterError("E must be finite and >= 0");
    if (M < 2 || k < 1) throw ParameterError("need M >= 2 and k >= 1");
    return 1.0 - E * static_cast<double>(k) * pi * pi / (static_cast<double>(M) * M);
}

std::string SecurityCheck::failed() const {
    if (alice_ok && bob_ok) return "none";
    if (!alice_ok && !bob_ok) return "alice+bob";
    return alice_ok ? "bob" : "alice";
}

SecurityCheck epsilon_secure_check(double t, int M, long long k, double epsilon) {
    require_t_M(t, M);
    if (k < 1) throw ParameterError("k must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
    SecurityCheck c;
    c.alice_value = pca_exact(t * t, k, M);
    c.bob_value = pcb_bound(t, M, k);
    c.alice_ok = c.alice_value <= epsilon;
    c.bob_ok = c.bob_value <= epsilon;
    const double kd = static_cast<double>(k);
    c.sufficient_alice_value = std::exp(-kd / (static_cast<double>(M) * M));
    c.sufficient_bob_value = kd * 2.0 * std::exp(log_ratio_power(1.0, M));
    c.sufficient_alice_ok = c.sufficient_alice_value <= epsilon;
    c.sufficient_bob_ok = c.sufficient_bob_value <= epsilon;
    return c;
}

KWindow k_window(double epsilon, double t, int M) {
    require_t_M(t, M);
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
    if (t == 0.0) throw ParameterError("t must be > 0 for a parameter window");
    const double log_inv_eps = -std::log(epsilon);
    KWindow w;
    double lo;
    if (t == 1.0) {
        lo = static_cast<double>(M) * M * log_inv_eps;
    } else {
        const double s = std::sin(pi / (2.0 * M));
        lo = log_inv_eps / (4.0 * t * t * s * s);
    }
    w.lo = std::max(1LL, static_cast<long long>(std::ceil(lo)));
    w.hi = clamp_floor(std::log(epsilon / 2.0) - log_ratio_power(t, M));
    return w;
}

ParamChoice find_params(double epsilon, double t, int scan_limit) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
    if (!std::isfinite(t) || t <= 0.0) throw ParameterError("t must be finite and > 0");
    for (int M = 2; M <= scan_limit; ++M) {
        const KWindow w = k_window(epsilon, t, M);
        if (w.empty()) continue;
        const double cube = std::pow(static_cast<double>(M), 3);
        return ParamChoice{M, w.lo, w, cube >= static_cast<double>(w.lo) && cube <= static_cast<double>(w.hi)};
    }
    throw SearchExhausted("no feasible (M, k) with M <= " + std::to_string(scan_limit) +
                          " for epsilon = " + format_double(epsilon) + ", t = " + format_double(t));
}

SecurityReport make_report(double t, int M, long long k, double epsilon) {
    SecurityReport r;
    r.t = t;
    r.M = M;
    r.k = k;
    r.epsilon = epsilon;
    r.pcb_bound = pcb_bound(t, M, k);
    r.pca_exact = pca_exact(t * t, k, M);
    const auto check = numeric_trace_norm_check(t, M);
    r.trace_norm_numeric = check.numeric;
    r.trace_norm_bound = check.bound.general;
    r.bound_valid = check.bound.valid;
    r.bound_ok = check.ok;
    r.feasible = std::max(r.pca_exact, r.pcb_bound) <= epsilon;
    return r;
}

Document to_document(const SecurityReport& r) {
    const auto b = trace_norm_bound(r.t, r.M);
    Document d;
    d["t"] = r.t;
    d["M"] = r.M;
    d["k"] = r.k;
    d["epsilon"] = r.epsilon;
    d["pcb_bound"] = r.pcb_bound;
    d["pca_exact"] = r.pca_exact;
    d["pca_approx"] = pca_approx(r.t * r.t, r.k, r.M);
    d["trace_norm_numeric"] = r.trace_norm_numeric;
    d["trace_norm_bound"] = r.trace_norm_bound;
    d["trace_norm_bound_valid"] = r.bound_valid;
    d["simplified_bound"] = b.simplified;
    d["simplified_bound_applies"] = b.simplified_applies;
    d["bound_ok"] = r.bound_ok;
    d["feasible"] = r.feasible;
    return d;
}

}  // namespace qbc::security
