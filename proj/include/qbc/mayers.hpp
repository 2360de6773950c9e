#pragma once

// Delayed-choice (Mayers) attack on the phase commitment, built explicitly on
// a truncated Fock space.
//
// Alice prepares the purification |Phi_b> = sum_r lambda_r^{-1/2} |phi_{r,b}>|phi_{r,b}>
// of sigma_b, sends the second factor and keeps the first. Just before opening
// she measures her factor with a POVM whose rank-1 elements are the discrete
// Fourier transforms of the residue-class eigenvectors, which steers Bob's
// factor onto a code state with uniform outcome probability 1/M.

#include <cstddef>
#include <vector>

#include "qbc/codestates.hpp"
#include "qbc/document.hpp"
#include "qbc/fockcore.hpp"

namespace qbc::mayers {

using code::CodeParams;
using code::EigenSystem;
using fock::FockOperator;
using fock::FockVector;

inline constexpr double eigenvalue_floor = 1e-14;

enum class SectorPolicy {
    strict,            // throw DegenerateEigenvalue if any lambda_r <= floor
    drop_degenerate,   // skip such sectors and report their mass
};

/// Residue classes r whose eigenvalue clears the floor.
std::vector<int> usable_sectors(const EigenSystem& sys, SectorPolicy policy);

FockVector build_purification(int b, const CodeParams& params,
                              SectorPolicy policy = SectorPolicy::strict);

/// U = (sum_r e^{-i pi r / M} lambda_r^{-1} |phi_{r,1}><phi_{r,1}|) e^{i pi n / M}.
/// Maps each normalized phi_{r,0} onto the normalized phi_{r,1}.
FockOperator build_U(const CodeParams& params);

/// e^{-i pi n / M}: rotates every b = 0 code state onto a b = 1 code state.
FockOperator switch_rotation(const CodeParams& params);

/// Rank-1 elements theta_{b,m} = |chi_{b,m}><chi_{b,m}| for m < M plus the
/// remainder element identity - sum_m theta_{b,m}.
struct Povm {
    std::vector<FockVector> vectors;      // chi_{b,m}, m = 0..M-1
    std::vector<FockOperator> elements;   // M + 1 operators, remainder last
};

struct PovmSet {
    Povm povm0;
    Povm povm1;          // conjugation of povm0 by switch_rotation
    Povm povm1_via_u;    // conjugation of povm0 by build_U
};

PovmSet build_povm(const CodeParams& params, SectorPolicy policy = SectorPolicy::drop_degenerate);

struct MayersKit {
    CodeParams params;
    EigenSystem eig0;
    EigenSystem eig1;
    std::vector<int> sectors;
    double discarded_mass = 0.0;
    FockVector purification0;
    FockVector purification1;
    FockOperator U;
    PovmSet povms;

    const FockVector& purification(int b) const { return b == 0 ? purification0 : purification1; }
    const Povm& povm(int b) const { return b == 0 ? povms.povm0 : povms.povm1; }
};

MayersKit build_kit(const CodeParams& params);

struct SwitchFidelities {
    double one_sided = 0.0;   // |<Phi_1| (1 (x) U) |Phi_0>|
    double two_sided = 0.0;   // |<Phi_1| (U (x) U) |Phi_0>|
};

SwitchFidelities switch_fidelities(const MayersKit& kit);

struct OutcomeDistribution {
    std::vector<double> probabilities;   // p(m | b), m = 0..M-1
    double remainder = 0.0;              // mass on the remainder element
};

/// Alice measures povm(b) on her factor of |Phi_b>.
OutcomeDistribution outcome_distribution(int b, const MayersKit& kit);

struct ConditionalMatch {
    double fidelity = 0.0;   // max_m' |<code(m', b)|bob>|^2
    int matched_index = -1;  // arg max m'
};

/// Bob's normalized state after Alice obtains outcome m from `povm` on |Phi_b>,
/// matched against the M code states for bit b.
ConditionalMatch conditional_bob_state(int m, int b, const MayersKit& kit, const Povm& povm);
ConditionalMatch conditional_bob_state(int m, int b, const MayersKit& kit);

/// Bob's reduced state after Alice applies `povm` to her factor and forgets
/// the outcome.
FockOperator bob_state_after(const FockVector& purification, const Povm& povm);

struct MayersReport {
    double t = 0.0;
    int M = 0;
    std::size_t cutoff = 0;
    std::vector<double> eigenvalues;
    double discarded_mass = 0.0;
    double purification_norm_defect = 0.0;   // max_b | ||Phi_b||^2 - 1 |
    double marginal_residual = 0.0;          // max over b, side of ||Tr_x Phi_b - sigma_b||_1
    double schmidt_residual = 0.0;           // max |s_r^2 - lambda_r|
    double u_unitarity_defect = 0.0;         // on span{phi_hat_{r,0}}
    double u_map_residual = 0.0;             // max_r ||U phi_hat_{r,0} - phi_hat_{r,1}||
    double u_conjugation_residual = 0.0;     // ||U sigma_0 U^dag - sigma_1||_1
    SwitchFidelities fidelities;
    double completeness_residual = 0.0;      // max_b max|sum_m theta_{b,m} - 1|
    double remainder_min_eigenvalue = 0.0;
    double projector_residual = 0.0;         // max ||theta^2 - theta|| over rank-1 elements
    double chi_orthonormality_defect = 0.0;
    std::vector<std::vector<double>> outcomes;       // [b][m]
    std::vector<double> remainder_mass;              // [b]
    std::vector<std::vector<double>> conditional_fidelity;   // [b][m]
    std::vector<std::vector<int>> conditional_map;           // [b][m] -> m'
    std::vector<bool> map_is_bijection;                      // [b]
    double no_signalling_residual = 0.0;     // max ||bob_after(povm) - Tr_A Phi_b||_1
    double literal_u_min_fidelity = 0.0;     // b = 1 conditionals with povm1_via_u

    bool passes() const;
};

MayersReport verify(const MayersKit& kit);
Document to_document(const MayersReport& report);

}  // namespace qbc::mayers
