#include "qbc/codestates.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qbc/errors.hpp"

namespace qbc::code {

namespace {

void require_bit(int b) {
    if (b != 0 && b != 1) throw ParameterError("bit must be 0 or 1");
}

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

// Sign e^{i pi b j} of the stride-j off-diagonal, exact.
double stride_sign(int b, long long j) {
    return (b == 1 && (j % 2 != 0)) ? -1.0 : 1.0;
}

double truncated_mass(double t, std::size_t N) { return 1.0 - fock::poisson_tail(t * t, N); }

}  // namespace

CodeParams CodeParams::with_working_cutoff(double t, int M) {
    CodeParams p{t, M, 0};
    if (!std::isfinite(t) || t < 0.0) throw ParameterError("t must be finite and >= 0");
    p.N = fock::working_cutoff(t * t);
    p.validate();
    return p;
}

void CodeParams::validate() const {
    if (!std::isfinite(t) || t < 0.0) throw ParameterError("t must be finite and >= 0");
    if (M < 2) throw ParameterError("M must be >= 2, got " + std::to_string(M));
}

double code_phase(int m, int b, int M) {
    require_bit(b);
    if (M < 1) throw ParameterError("M must be positive");
    if (m < 0 || m >= M)
        throw ParameterError("phase index " + std::to_string(m) + " outside [0, " + std::to_string(M) + ")");
    return 2.0 * std::numbers::pi * (m + 0.5 * b) / M;
}

Complex code_amplitude(double t, int m, int b, int M) { return std::polar(t, code_phase(m, b, M)); }

std::vector<double> poisson_amplitudes(double t, std::size_t N) {
    std::vector<double> c(N + 1, 0.0);
    if (t == 0.0) {
        c[0] = 1.0;
        return c;
    }
    const double log_t = std::log(t);
    for (std::size_t n = 0; n <= N; ++n) {
        const double nd = static_cast<double>(n);
        c[n] = std::exp(-0.5 * t * t + nd * log_t - 0.5 * std::lgamma(nd + 1.0));
    }
    return c;
}

FockOperator build_ideal_rho(double t, std::size_t N) {
    if (!std::isfinite(t) || t < 0.0) throw ParameterError("t must be finite and >= 0");
    const auto c = poisson_amplitudes(t, N);
    fock::Matrix rho = fock::Matrix::Zero(idx(N + 1), idx(N + 1));
    for (std::size_t n = 0; n <= N; ++n) rho(idx(n), idx(n)) = c[n] * c[n];
    return FockOperator::density(N, std::move(rho), truncated_mass(t, N));
}

FockOperator build_sigma(int b, const CodeParams& params) {
    require_bit(b);
    params.validate();
    const auto c = poisson_amplitudes(params.t, params.N);
    const auto M = static_cast<long long>(params.M);
    fock::Matrix s = fock::Matrix::Zero(idx(params.N + 1), idx(params.N + 1));
    for (std::size_t m = 0; m <= params.N; ++m)
        for (std::size_t n = 0; n <= params.N; ++n) {
            const long long diff = static_cast<long long>(m) - static_cast<long long>(n);
            if (diff % M != 0) continue;
            s(idx(m), idx(n)) = c[m] * c[n] * stride_sign(b, diff / M);
        }
    return FockOperator::density(params.N, std::move(s), truncated_mass(params.t, params.N));
}

FockOperator build_sigma_mixture(int b, const CodeParams& params) {
    require_bit(b);
    params.validate();
    fock::Matrix s = fock::Matrix::Zero(idx(params.N + 1), idx(params.N + 1));
    for (int m = 0; m < params.M; ++m) {
        const auto v = fock::coherent_vector(code_amplitude(params.t, m, b, params.M), params.N);
        s += v.amps() * v.amps().adjoint();
    }
    s /= static_cast<double>(params.M);
    return FockOperator::density(params.N, std::move(s), truncated_mass(params.t, params.N));
}

FockOperator build_D(const CodeParams& params) {
    return build_ideal_rho(params.t, params.N) - build_sigma(0, params);
}

double sector_weight(double t, int M, int r) {
    if (!std::isfinite(t) || t < 0.0) throw ParameterError("t must be finite and >= 0");
    if (M < 1 || r < 0 || r >= M) throw ParameterError("sector index out of range");
    if (t == 0.0) return r == 0 ? 1.0 : 0.0;
    const double log_t2 = 2.0 * std::log(t);
    double sum = 0.0;
    for (long long n = r;; n += M) {
        const double nd = static_cast<double>(n);
        const double term = std::exp(-t * t + nd * log_t2 - std::lgamma(nd + 1.0));
        sum += term;
        // Past the Poisson mode the terms fall at least geometrically.
        if (nd > t * t && term <= sum * 1e-18) break;
    }
    return sum;
}

EigenSystem eigen_sigma(int b, const CodeParams& params) {
    require_bit(b);
    params.validate();
    const auto c = poisson_amplitudes(params.t, params.N);
    EigenSystem sys;
    sys.b = b;
    for (int r = 0; r < params.M; ++r) {
        fock::Vector v = fock::Vector::Zero(idx(params.N + 1));
        long long k = 0;
        for (std::size_t n = static_cast<std::size_t>(r); n <= params.N;
             n += static_cast<std::size_t>(params.M), ++k)
            v[idx(n)] = c[n] * stride_sign(b, k);
        sys.vectors.emplace_back(params.N, std::move(v));
        sys.values.push_back(sector_weight(params.t, params.M, r));
    }
    return sys;
}

}  // namespace qbc::code
