#pragma once

// Truncated single-mode Fock-space numerics.
//
// Every object lives on span{|0>, ..., |N>} for a declared cutoff N, or on a
// tensor power of it. Multi-mode objects index basis states with mode 0 as the
// most significant digit, so tensor(A, B) has index a * (N + 1) + b.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qbc::fock {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double eigen_floor = -1e-10;
inline constexpr double mass = 1e-9;
inline constexpr double compare = 1e-8;
}  // namespace tol

/// Seeded generator for an independent stream; identical (seed, stream) pairs
/// always yield identical sequences.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

class FockOperator;

class FockVector {
public:
    FockVector(std::size_t cutoff, Vector amps, std::size_t modes = 1);

    static FockVector basis(std::size_t n, std::size_t cutoff);

    std::size_t cutoff() const { return cutoff_; }
    std::size_t modes() const { return modes_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const Vector& amps() const { return amps_; }
    Complex operator[](std::size_t n) const { return amps_[static_cast<Eigen::Index>(n)]; }

    double squared_norm() const { return amps_.squaredNorm(); }
    /// <this|other>
    Complex inner(const FockVector& other) const;
    FockVector normalized() const;
    FockOperator projector() const;

private:
    std::size_t cutoff_;
    std::size_t modes_;
    Vector amps_;
};

enum class OperatorKind { general, hermitian, density };

class FockOperator {
public:
    /// Validates the kind flag: hermitian needs max|A - A^dag| <= 1e-12, density
    /// additionally needs eigenvalues >= -1e-10 and trace within 1e-9 of `mass`.
    FockOperator(std::size_t cutoff, Matrix matrix, std::size_t modes = 1,
                 OperatorKind kind = OperatorKind::general, double mass = 1.0);

    static FockOperator density(std::size_t cutoff, Matrix matrix, double mass,
                                std::size_t modes = 1);
    static FockOperator hermitian(std::size_t cutoff, Matrix matrix, std::size_t modes = 1);
    static FockOperator identity(std::size_t cutoff, std::size_t modes = 1);

    std::size_t cutoff() const { return cutoff_; }
    std::size_t modes() const { return modes_; }
    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
    const Matrix& matrix() const { return matrix_; }
    OperatorKind kind() const { return kind_; }
    double mass() const { return mass_; }

    Complex trace() const { return matrix_.trace(); }
    double hermiticity_defect() const;
    FockOperator adjoint() const;

    FockVector apply(const FockVector& v) const;

private:
    std::size_t cutoff_;
    std::size_t modes_;
    Matrix matrix_;
    OperatorKind kind_;
    double mass_;
};

/// Difference of two operators on the same space; the result is hermitian when
/// both inputs are.
FockOperator operator-(const FockOperator& a, const FockOperator& b);

void require_same_space(const FockOperator& a, const FockOperator& b);

/// P(X > N) for X ~ Poisson(E).
double poisson_tail(double E, std::size_t N);

/// Minimal N with P(X > N) < tail_tol for X ~ Poisson(E).
std::size_t cutoff_for_energy(double E, double tail_tol);

/// Cutoff used for every density-matrix computation at mean photon number E:
/// cutoff_for_energy(E, 1e-12) + ceil(6 sqrt(E)) + 10.
std::size_t working_cutoff(double E);

FockVector coherent_vector(Complex alpha, std::size_t cutoff);

/// |<alpha|beta>|^2 = exp(-|alpha - beta|^2)
double overlap_prob(Complex alpha, Complex beta);

/// D(beta) = exp(beta a^dag - conj(beta) a) with the generator truncated to
/// the cutoff. Exactly unitary on the truncated space; agrees with the true
/// displacement on the low photon-number subspace.
FockOperator displacement_matrix(Complex beta, std::size_t cutoff);

FockOperator annihilation(std::size_t cutoff);

/// exp(i theta n), diagonal.
FockOperator phase_rotation(double theta, std::size_t cutoff);

/// Eigenvalues in ascending order. Requires a hermitian matrix.
std::vector<double> hermitian_eigenvalues(const FockOperator& a);

/// Sum of absolute eigenvalues. Throws ContractViolation for non-hermitian input.
double trace_norm(const FockOperator& a);

/// Optimal equal-prior success probability 1/2 + ||rho0 - rho1||_1 / 4.
double helstrom_success(const FockOperator& rho0, const FockOperator& rho1);

/// Projector onto the non-negative eigenspace of rho0 - rho1: the Helstrom
/// measurement element that guesses "rho0".
FockOperator helstrom_projector(const FockOperator& rho0, const FockOperator& rho1);

/// Photon count of |alpha> in the number basis: Poisson with mean |alpha|^2.
unsigned sample_photon_count(Complex alpha, Rng& rng);

FockVector tensor(std::span<const FockVector> factors);
FockOperator tensor(std::span<const FockOperator> factors);
FockVector tensor(const FockVector& a, const FockVector& b);
FockOperator tensor(const FockOperator& a, const FockOperator& b);

/// Traces out mode `subsystem` (0-based) of a multi-mode operator.
FockOperator partial_trace(const FockOperator& op, std::size_t subsystem);

/// Reduced state of a two-mode pure state, keeping mode `keep`.
/// Equivalent to partial_trace(v.projector(), 1 - keep) without forming the
/// (N+1)^4 operator.
FockOperator reduced_state(const FockVector& bipartite, std::size_t keep);

/// Amplitudes of a two-mode vector as an (N+1) x (N+1) matrix C with
/// |psi> = sum C(a, b) |a>|b>.
Matrix amplitude_matrix(const FockVector& bipartite);
FockVector from_amplitude_matrix(std::size_t cutoff, const Matrix& c);

}  // namespace qbc::fock
