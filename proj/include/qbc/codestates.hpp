#pragma once

// The protocol's state family on a truncated Fock space: code states, the
// phase-averaged state rho, the average code states sigma_b, the difference
// operator rho - sigma_0 and the residue-class eigensystem of sigma_b.

#include <cstddef>
#include <vector>

#include "qbc/fockcore.hpp"

namespace qbc::code {

using fock::Complex;
using fock::FockOperator;
using fock::FockVector;

struct CodeParams {
    double t = 1.0;         // field amplitude, t = sqrt(E)
    int M = 2;              // phase modulation order
    std::size_t N = 0;      // Fock cutoff

    /// Cutoff chosen by fock::working_cutoff(t^2).
    static CodeParams with_working_cutoff(double t, int M);

    void validate() const;
};

/// 2 pi (m + b/2) / M
double code_phase(int m, int b, int M);

/// t * exp(i code_phase(m, b, M))
Complex code_amplitude(double t, int m, int b, int M);

/// e^{-t^2/2} t^n / sqrt(n!) for n = 0..N, evaluated in log space.
std::vector<double> poisson_amplitudes(double t, std::size_t N);

FockOperator build_ideal_rho(double t, std::size_t N);

/// sigma_b from its number-basis matrix elements:
/// <m|sigma_b|n> = e^{-t^2} t^{m+n} / sqrt(m! n!) * e^{i pi b (m-n)/M} if M | (m-n), else 0.
FockOperator build_sigma(int b, const CodeParams& params);

/// sigma_b as the uniform mixture of the M truncated code states.
FockOperator build_sigma_mixture(int b, const CodeParams& params);

/// rho - sigma_0
FockOperator build_D(const CodeParams& params);

/// lambda_r = e^{-t^2} sum_k t^{2(r+kM)} / (r+kM)!, summed to convergence
/// (not truncated at N).
double sector_weight(double t, int M, int r);

struct EigenSystem {
    int b = 0;
    std::vector<FockVector> vectors;   // sub-normalized |phi_{r,b}>, r = 0..M-1
    std::vector<double> values;        // lambda_r
};

EigenSystem eigen_sigma(int b, const CodeParams& params);

}  // namespace qbc::code
