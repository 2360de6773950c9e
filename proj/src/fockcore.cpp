#include "qbc/fockcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "qbc/errors.hpp"

namespace qbc::fock {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) r *= base;
    return r;
}

void require_finite(Complex z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw ParameterError(std::string(what) + " must be finite");
}

Eigen::SelfAdjointEigenSolver<Matrix> hermitian_solver(const Matrix& m, bool vectors) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(
        m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

// ---------------------------------------------------------------- FockVector

FockVector::FockVector(std::size_t cutoff, Vector amps, std::size_t modes)
    : cutoff_(cutoff), modes_(modes), amps_(std::move(amps)) {
    if (modes_ == 0) throw DimensionMismatch("FockVector needs at least one mode");
    if (dim() != ipow(cutoff_ + 1, modes_))
        throw DimensionMismatch("FockVector length " + std::to_string(dim()) +
                                " does not match cutoff " + std::to_string(cutoff_));
    if (squared_norm() > 1.0 + tol::mass)
        throw ContractViolation("FockVector squared norm exceeds 1");
}

FockVector FockVector::basis(std::size_t n, std::size_t cutoff) {
    if (n > cutoff) throw ParameterError("basis index above cutoff");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(cutoff + 1));
    v[static_cast<Eigen::Index>(n)] = 1.0;
    return FockVector(cutoff, std::move(v));
}

Complex FockVector::inner(const FockVector& other) const {
    if (other.cutoff_ != cutoff_ || other.modes_ != modes_)
        throw DimensionMismatch("inner product of vectors on different spaces");
    return amps_.dot(other.amps_);  // conjugates the left factor
}

FockVector FockVector::normalized() const {
    double n = amps_.norm();
    if (n == 0.0) throw ContractViolation("cannot normalize the zero vector");
    return FockVector(cutoff_, amps_ / n, modes_);
}

FockOperator FockVector::projector() const {
    return FockOperator::density(cutoff_, amps_ * amps_.adjoint(), squared_norm(), modes_);
}

// -------------------------------------------------------------- FockOperator

FockOperator::FockOperator(std::size_t cutoff, Matrix matrix, std::size_t modes,
                           OperatorKind kind, double mass)
    : cutoff_(cutoff), modes_(modes), matrix_(std::move(matrix)), kind_(kind), mass_(mass) {
    if (modes_ == 0) throw DimensionMismatch("FockOperator needs at least one mode");
    const auto d = ipow(cutoff_ + 1, modes_);
    if (static_cast<std::size_t>(matrix_.rows()) != d ||
        static_cast<std::size_t>(matrix_.cols()) != d)
        throw DimensionMismatch("operator shape does not match cutoff " + std::to_string(cutoff_));
    if (kind_ == OperatorKind::general) return;
    if (hermiticity_defect() > tol::hermitian)
        throw ContractViolation("operator flagged hermitian is not hermitian");
    if (kind_ == OperatorKind::hermitian) return;
    if (mass_ > 1.0 + tol::mass) throw ContractViolation("density mass exceeds 1");
    if (std::abs(matrix_.trace().real() - mass_) > tol::mass)
        throw ContractViolation("density trace differs from declared mass");
    auto ev = hermitian_solver(matrix_, false).eigenvalues();
    if (ev.size() > 0 && ev.minCoeff() < tol::eigen_floor)
        throw ContractViolation("density operator has a negative eigenvalue");
}

FockOperator FockOperator::density(std::size_t cutoff, Matrix matrix, double mass,
                                   std::size_t modes) {
    return FockOperator(cutoff, std::move(matrix), modes, OperatorKind::density, mass);
}

FockOperator FockOperator::hermitian(std::size_t cutoff, Matrix matrix, std::size_t modes) {
    return FockOperator(cutoff, std::move(matrix), modes, OperatorKind::hermitian);
}

FockOperator FockOperator::identity(std::size_t cutoff, std::size_t modes) {
    const auto d = static_cast<Eigen::Index>(ipow(cutoff + 1, modes));
    return FockOperator(cutoff, Matrix::Identity(d, d), modes, OperatorKind::hermitian);
}

double FockOperator::hermiticity_defect() const {
    if (matrix_.size() == 0) return 0.0;
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

FockOperator FockOperator::adjoint() const {
    return FockOperator(cutoff_, matrix_.adjoint(), modes_,
                        kind_ == OperatorKind::general ? OperatorKind::general : OperatorKind::hermitian);
}

FockVector FockOperator::apply(const FockVector& v) const {
    if (v.cutoff() != cutoff_ || v.modes() != modes_)
        throw DimensionMismatch("operator and vector live on different spaces");
    return FockVector(cutoff_, matrix_ * v.amps(), modes_);
}

void require_same_space(const FockOperator& a, const FockOperator& b) {
    if (a.cutoff() != b.cutoff() || a.modes() != b.modes())
        throw DimensionMismatch("cutoff mismatch: " + std::to_string(a.cutoff()) + " vs " +
                                std::to_string(b.cutoff()));
}

FockOperator operator-(const FockOperator& a, const FockOperator& b) {
    require_same_space(a, b);
    const bool herm = a.kind() != OperatorKind::general && b.kind() != OperatorKind::general;
    return FockOperator(a.cutoff(), a.matrix() - b.matrix(), a.modes(),
                        herm ? OperatorKind::hermitian : OperatorKind::general);
}

// ------------------------------------------------------------------ states

double poisson_tail(double E, std::size_t N) {
    if (!std::isfinite(E) || E < 0.0) throw ParameterError("energy must be finite and >= 0");
    if (E == 0.0) return 0.0;
    // P(X > N) = P(N + 1, E), the lower regularized incomplete gamma function.
    return boost::math::gamma_p(static_cast<double>(N) + 1.0, E);
}

std::size_t cutoff_for_energy(double E, double tail_tol) {
    if (!std::isfinite(E) || E < 0.0) throw ParameterError("energy must be finite and >= 0");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw ParameterError("tail_tol must lie in (0, 1)");
    std::size_t n = 0;
    while (poisson_tail(E, n) >= tail_tol) ++n;
    return n;
}

std::size_t working_cutoff(double E) {
    return cutoff_for_energy(E, 1e-12) + static_cast<std::size_t>(std::ceil(6.0 * std::sqrt(E))) + 10;
}

FockVector coherent_vector(Complex alpha, std::size_t cutoff) {
    require_finite(alpha, "coherent amplitude");
    Vector v(static_cast<Eigen::Index>(cutoff + 1));
    v[0] = std::exp(-0.5 * std::norm(alpha));
    for (std::size_t n = 1; n <= cutoff; ++n)
        v[static_cast<Eigen::Index>(n)] =
            v[static_cast<Eigen::Index>(n - 1)] * alpha / std::sqrt(static_cast<double>(n));
    return FockVector(cutoff, std::move(v));
}

double overlap_prob(Complex alpha, Complex beta) {
    require_finite(alpha, "alpha");
    require_finite(beta, "beta");
    return std::exp(-std::norm(alpha - beta));
}

FockOperator annihilation(std::size_t cutoff) {
    const auto d = static_cast<Eigen::Index>(cutoff + 1);
    Matrix a = Matrix::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return FockOperator(cutoff, std::move(a));
}

FockOperator displacement_matrix(Complex beta, std::size_t cutoff) {
    require_finite(beta, "displacement");
    const Matrix a = annihilation(cutoff).matrix();
    const Matrix generator = beta * a.adjoint() - std::conj(beta) * a;
    // generator is anti-hermitian: exp(G) = exp(-iH) with H = iG hermitian.
    const Matrix h = Complex(0.0, 1.0) * generator;
    auto solver = hermitian_solver(h, true);
    const Vector phases = (Complex(0.0, -1.0) * solver.eigenvalues().cast<Complex>()).array().exp();
    Matrix d = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
    return FockOperator(cutoff, std::move(d));
}

FockOperator phase_rotation(double theta, std::size_t cutoff) {
    Vector diag(static_cast<Eigen::Index>(cutoff + 1));
    for (std::size_t n = 0; n <= cutoff; ++n)
        diag[static_cast<Eigen::Index>(n)] = std::polar(1.0, theta * static_cast<double>(n));
    return FockOperator(cutoff, diag.asDiagonal());
}

// ------------------------------------------------------- norms and measures

std::vector<double> hermitian_eigenvalues(const FockOperator& a) {
    if (a.hermiticity_defect() > tol::hermitian)
        throw ContractViolation("eigenvalues requested for a non-hermitian operator");
    auto ev = hermitian_solver(a.matrix(), false).eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double trace_norm(const FockOperator& a) {
    if (a.hermiticity_defect() > tol::hermitian)
        throw ContractViolation("trace_norm requires a hermitian operator");
    if (a.dim() == 0) return 0.0;
    return hermitian_solver(a.matrix(), false).eigenvalues().cwiseAbs().sum();
}

double helstrom_success(const FockOperator& rho0, const FockOperator& rho1) {
    require_same_space(rho0, rho1);
    if (rho0.kind() != OperatorKind::density || rho1.kind() != OperatorKind::density)
        throw ContractViolation("helstrom_success needs density operators");
    return 0.5 + trace_norm(rho0 - rho1) / 4.0;
}

FockOperator helstrom_projector(const FockOperator& rho0, const FockOperator& rho1) {
    require_same_space(rho0, rho1);
    const FockOperator diff = rho0 - rho1;
    if (diff.kind() == OperatorKind::general)
        throw ContractViolation("helstrom_projector needs hermitian inputs");
    auto solver = hermitian_solver(diff.matrix(), true);
    const auto& vecs = solver.eigenvectors();
    Matrix p = Matrix::Zero(vecs.rows(), vecs.cols());
    for (Eigen::Index i = 0; i < vecs.cols(); ++i)
        if (solver.eigenvalues()[i] >= 0.0) p += vecs.col(i) * vecs.col(i).adjoint();
    p = 0.5 * (p + p.adjoint()).eval();
    return FockOperator(rho0.cutoff(), std::move(p), rho0.modes(), OperatorKind::hermitian);
}

unsigned sample_photon_count(Complex alpha, Rng& rng) {
    require_finite(alpha, "amplitude");
    const double mean = std::norm(alpha);
    if (mean == 0.0) return 0;
    std::poisson_distribution<unsigned> dist(mean);
    return dist(rng);
}

// ------------------------------------------------------ tensors and traces

FockVector tensor(std::span<const FockVector> factors) {
    if (factors.empty()) throw DimensionMismatch("tensor of an empty list");
    Vector acc = factors[0].amps();
    std::size_t modes = factors[0].modes();
    for (std::size_t i = 1; i < factors.size(); ++i) {
        if (factors[i].cutoff() != factors[0].cutoff())
            throw DimensionMismatch("tensor factors have different cutoffs");
        const Vector& f = factors[i].amps();
        Vector next(acc.size() * f.size());
        for (Eigen::Index j = 0; j < acc.size(); ++j) next.segment(j * f.size(), f.size()) = acc[j] * f;
        acc = std::move(next);
        modes += factors[i].modes();
    }
    return FockVector(factors[0].cutoff(), std::move(acc), modes);
}

FockOperator tensor(std::span<const FockOperator> factors) {
    if (factors.empty()) throw DimensionMismatch("tensor of an empty list");
    Matrix acc = factors[0].matrix();
    std::size_t modes = factors[0].modes();
    bool herm = factors[0].kind() != OperatorKind::general;
    bool dens = factors[0].kind() == OperatorKind::density;
    double mass = factors[0].mass();
    for (std::size_t i = 1; i < factors.size(); ++i) {
        const auto& f = factors[i];
        if (f.cutoff() != factors[0].cutoff())
            throw DimensionMismatch("tensor factors have different cutoffs");
        const Matrix& b = f.matrix();
        Matrix next(acc.rows() * b.rows(), acc.cols() * b.cols());
        for (Eigen::Index r = 0; r < acc.rows(); ++r)
            for (Eigen::Index c = 0; c < acc.cols(); ++c)
                next.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = acc(r, c) * b;
        acc = std::move(next);
        modes += f.modes();
        herm = herm && f.kind() != OperatorKind::general;
        dens = dens && f.kind() == OperatorKind::density;
        mass *= f.mass();
    }
    if (dens) return FockOperator::density(factors[0].cutoff(), std::move(acc), mass, modes);
    return FockOperator(factors[0].cutoff(), std::move(acc), modes,
                        herm ? OperatorKind::hermitian : OperatorKind::general);
}

FockVector tensor(const FockVector& a, const FockVector& b) {
    const FockVector list[] = {a, b};
    return tensor(std::span<const FockVector>(list));
}

FockOperator tensor(const FockOperator& a, const FockOperator& b) {
    const FockOperator list[] = {a, b};
    return tensor(std::span<const FockOperator>(list));
}

FockOperator partial_trace(const FockOperator& op, std::size_t subsystem) {
    if (op.modes() < 2) throw DimensionMismatch("partial trace needs at least two modes");
    if (subsystem >= op.modes()) throw DimensionMismatch("subsystem index out of range");
    const std::size_t d = op.cutoff() + 1;
    // Index = outer * (d * inner) + k * inner + rest, with k the traced digit.
    const std::size_t inner = ipow(d, op.modes() - subsystem - 1);
    const std::size_t outer = ipow(d, subsystem);
    const std::size_t out_dim = outer * inner;
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(out_dim));
    const Matrix& m = op.matrix();
    auto full = [&](std::size_t reduced, std::size_t k) {
        return static_cast<Eigen::Index>((reduced / inner) * d * inner + k * inner + reduced % inner);
    };
    for (std::size_t i = 0; i < out_dim; ++i)
        for (std::size_t j = 0; j < out_dim; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += m(full(i, k), full(j, k));
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
        }
    if (op.kind() == OperatorKind::density)
        return FockOperator::density(op.cutoff(), std::move(out), op.mass(), op.modes() - 1);
    return FockOperator(op.cutoff(), std::move(out), op.modes() - 1, op.kind());
}

Matrix amplitude_matrix(const FockVector& bipartite) {
    if (bipartite.modes() != 2) throw DimensionMismatch("amplitude_matrix needs a two-mode vector");
    const auto d = static_cast<Eigen::Index>(bipartite.cutoff() + 1);
    Matrix c(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) c(a, b) = bipartite.amps()[a * d + b];
    return c;
}

FockVector from_amplitude_matrix(std::size_t cutoff, const Matrix& c) {
    const auto d = static_cast<Eigen::Index>(cutoff + 1);
    if (c.rows() != d || c.cols() != d) throw DimensionMismatch("amplitude matrix shape");
    Vector v(d * d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) v[a * d + b] = c(a, b);
    return FockVector(cutoff, std::move(v), 2);
}

FockOperator reduced_state(const FockVector& bipartite, std::size_t keep) {
    if (keep > 1) throw DimensionMismatch("keep must be 0 or 1");
    const Matrix c = amplitude_matrix(bipartite);
    Matrix r = keep == 0 ? Matrix(c * c.adjoint()) : Matrix(c.transpose() * c.conjugate());
    r = 0.5 * (r + r.adjoint()).eval();
    const double mass = r.trace().real();
    return FockOperator::density(bipartite.cutoff(), std::move(r), mass);
}

}  // namespace qbc::fock
