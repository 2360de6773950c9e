#include "qbc/mayers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qbc/errors.hpp"

namespace qbc::mayers {

namespace {

using fock::Complex;
using fock::Matrix;
using fock::Vector;

constexpr double pi = std::numbers::pi;

FockVector normalized_sector(const EigenSystem& sys, int r) { return sys.vectors[r].normalized(); }

Matrix rank_one(const Vector& v) { return v * v.adjoint(); }

Povm povm_from_vectors(std::size_t cutoff, std::vector<FockVector> vectors) {
    Povm p;
    const auto d = static_cast<Eigen::Index>(cutoff + 1);
    Matrix rest = Matrix::Identity(d, d);
    for (const auto& v : vectors) {
        Matrix theta = rank_one(v.amps());
        rest -= theta;
        p.elements.emplace_back(cutoff, std::move(theta), 1, fock::OperatorKind::hermitian);
    }
    rest = 0.5 * (rest + rest.adjoint()).eval();
    p.elements.emplace_back(cutoff, std::move(rest), 1, fock::OperatorKind::hermitian);
    p.vectors = std::move(vectors);
    return p;
}

Povm conjugate(const Povm& base, const FockOperator& w) {
    std::vector<FockVector> vs;
    for (const auto& v : base.vectors) vs.push_back(w.apply(v));
    return povm_from_vectors(w.cutoff(), std::move(vs));
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

std::vector<int> usable_sectors(const EigenSystem& sys, SectorPolicy policy) {
    std::vector<int> out;
    for (int r = 0; r < static_cast<int>(sys.values.size()); ++r) {
        const bool ok = sys.values[r] > eigenvalue_floor && sys.vectors[r].squared_norm() > 0.0;
        if (ok) {
            out.push_back(r);
        } else if (policy == SectorPolicy::strict) {
            throw DegenerateEigenvalue("lambda_" + std::to_string(r) + " = " + format_double(sys.values[r]) +
                                       " is below the eigenvalue floor");
        }
    }
    return out;
}

FockVector build_purification(int b, const CodeParams& params, SectorPolicy policy) {
    const auto sys = code::eigen_sigma(b, params);
    const auto d = static_cast<Eigen::Index>(params.N + 1);
    Matrix c = Matrix::Zero(d, d);
    for (int r : usable_sectors(sys, policy)) {
        const Vector& phi = sys.vectors[r].amps();
        c += (phi * phi.transpose()) / std::sqrt(sys.values[r]);
    }
    return fock::from_amplitude_matrix(params.N, c);
}

FockOperator build_U(const CodeParams& params) {
    const auto sys1 = code::eigen_sigma(1, params);
    const auto d = static_cast<Eigen::Index>(params.N + 1);
    Matrix proj = Matrix::Zero(d, d);
    for (int r : usable_sectors(sys1, SectorPolicy::drop_degenerate)) {
        const Vector& phi = sys1.vectors[r].amps();
        proj += std::polar(1.0, -pi * r / params.M) / sys1.values[r] * rank_one(phi);
    }
    return FockOperator(params.N, proj * fock::phase_rotation(pi / params.M, params.N).matrix());
}

FockOperator switch_rotation(const CodeParams& params) {
    return fock::phase_rotation(-pi / params.M, params.N);
}

PovmSet build_povm(const CodeParams& params, SectorPolicy policy) {
    const auto sys0 = code::eigen_sigma(0, params);
    const auto sectors = usable_sectors(sys0, policy);
    std::vector<FockVector> hats;
    for (int r : sectors) hats.push_back(normalized_sector(sys0, r));
    std::vector<FockVector> chi;
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.M));
    for (int m = 0; m < params.M; ++m) {
        Vector v = Vector::Zero(static_cast<Eigen::Index>(params.N + 1));
        for (std::size_t i = 0; i < sectors.size(); ++i)
            v += std::polar(scale, 2.0 * pi * m * sectors[i] / params.M) * hats[i].amps();
        chi.emplace_back(params.N, std::move(v));
    }
    PovmSet set;
    set.povm0 = povm_from_vectors(params.N, std::move(chi));
    set.povm1 = conjugate(set.povm0, switch_rotation(params));
    set.povm1_via_u = conjugate(set.povm0, build_U(params));
    return set;
}

MayersKit build_kit(const CodeParams& params) {
    params.validate();
    auto eig0 = code::eigen_sigma(0, params);
    auto eig1 = code::eigen_sigma(1, params);
    auto sectors = usable_sectors(eig0, SectorPolicy::drop_degenerate);
    double discarded = 0.0;
    for (int r = 0; r < params.M; ++r)
        if (std::find(sectors.begin(), sectors.end(), r) == sectors.end()) discarded += eig0.values[r];
    return MayersKit{params,
                     std::move(eig0),
                     std::move(eig1),
                     std::move(sectors),
                     discarded,
                     build_purification(0, params, SectorPolicy::drop_degenerate),
                     build_purification(1, params, SectorPolicy::drop_degenerate),
                     build_U(params),
                     build_povm(params)};
}

SwitchFidelities switch_fidelities(const MayersKit& kit) {
    const Matrix c0 = fock::amplitude_matrix(kit.purification0);
    const Matrix c1 = fock::amplitude_matrix(kit.purification1);
    const Matrix& u = kit.U.matrix();
    // (A (x) B) |Phi> has amplitude matrix A C B^T.
    const Matrix one_sided = c0 * u.transpose();
    const Matrix two_sided = u * c0 * u.transpose();
    return {std::abs((c1.conjugate().cwiseProduct(one_sided)).sum()),
            std::abs((c1.conjugate().cwiseProduct(two_sided)).sum())};
}

OutcomeDistribution outcome_distribution(int b, const MayersKit& kit) {
    const auto rho_a = fock::reduced_state(kit.purification(b), 0);
    const Povm& povm = kit.povm(b);
    OutcomeDistribution out;
    for (const auto& chi : povm.vectors) out.probabilities.push_back(chi.inner(rho_a.apply(chi)).real());
    out.remainder = (povm.elements.back().matrix() * rho_a.matrix()).trace().real();
    return out;
}

ConditionalMatch conditional_bob_state(int m, int b, const MayersKit& kit, const Povm& povm) {
    if (m < 0 || m >= kit.params.M) throw ParameterError("outcome index out of range");
    const Matrix c = fock::amplitude_matrix(kit.purification(b));
    const Vector bob = c.transpose() * povm.vectors[static_cast<std::size_t>(m)].amps().conjugate();
    const double norm = bob.norm();
    if (norm == 0.0) return {};
    const Vector bob_hat = bob / norm;
    ConditionalMatch best;
    for (int mp = 0; mp < kit.params.M; ++mp) {
        const auto code_state =
            fock::coherent_vector(code::code_amplitude(kit.params.t, mp, b, kit.params.M), kit.params.N).normalized();
        const double f = std::norm(code_state.amps().dot(bob_hat));
        if (f > best.fidelity) best = {f, mp};
    }
    return best;
}

ConditionalMatch conditional_bob_state(int m, int b, const MayersKit& kit) {
    return conditional_bob_state(m, b, kit, kit.povm(b));
}

FockOperator bob_state_after(const FockVector& purification, const Povm& povm) {
    const Matrix c = fock::amplitude_matrix(purification);
    // Tr_A[(theta (x) 1) |Phi><Phi|] = C^T theta^T conj(C)
    Matrix out = Matrix::Zero(c.cols(), c.cols());
    for (const auto& theta : povm.elements) out += c.transpose() * theta.matrix().transpose() * c.conjugate();
    out = 0.5 * (out + out.adjoint()).eval();
    const double mass = out.trace().real();
    return FockOperator::density(purification.cutoff(), std::move(out), mass);
}

bool MayersReport::passes() const {
    constexpr double tol = 1e-8;
    bool ok = marginal_residual <= tol && completeness_residual <= tol && remainder_min_eigenvalue >= -1e-10 &&
              projector_residual <= 1e-10 && std::abs(fidelities.two_sided - 1.0) <= tol &&
              no_signalling_residual <= tol && u_unitarity_defect <= tol && u_map_residual <= tol &&
              u_conjugation_residual <= tol;
    for (const auto& row : outcomes)
        for (double p : row) ok = ok && std::abs(p - 1.0 / M) <= tol;
    for (const auto& row : conditional_fidelity)
        for (double f : row) ok = ok && f >= 1.0 - tol;
    for (bool bij : map_is_bijection) ok = ok && bij;
    return ok;
}

MayersReport verify(const MayersKit& kit) {
    const auto& p = kit.params;
    MayersReport r;
    r.t = p.t;
    r.M = p.M;
    r.cutoff = p.N;
    r.eigenvalues = kit.eig0.values;
    r.discarded_mass = kit.discarded_mass;

    for (int b = 0; b < 2; ++b) {
        const auto& phi = kit.purification(b);
        r.purification_norm_defect = std::max(r.purification_norm_defect, std::abs(phi.squared_norm() - 1.0));
        const auto sigma = code::build_sigma(b, p);
        for (std::size_t keep = 0; keep < 2; ++keep)
            r.marginal_residual =
                std::max(r.marginal_residual, fock::trace_norm(fock::reduced_state(phi, keep) - sigma));

        Eigen::JacobiSVD<Matrix> svd(fock::amplitude_matrix(phi));
        std::vector<double> lambdas;
        for (int s : kit.sectors) lambdas.push_back(kit.eig0.values[s]);
        std::sort(lambdas.rbegin(), lambdas.rend());
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            const double s = svd.singularValues()[static_cast<Eigen::Index>(i)];
            r.schmidt_residual = std::max(r.schmidt_residual, std::abs(s * s - lambdas[i]));
        }
    }

    // U on the span of the normalized b = 0 eigenvectors.
    const auto ns = static_cast<Eigen::Index>(kit.sectors.size());
    Matrix q0(static_cast<Eigen::Index>(p.N + 1), ns), q1(static_cast<Eigen::Index>(p.N + 1), ns);
    for (Eigen::Index i = 0; i < ns; ++i) {
        q0.col(i) = normalized_sector(kit.eig0, kit.sectors[static_cast<std::size_t>(i)]).amps();
        q1.col(i) = normalized_sector(kit.eig1, kit.sectors[static_cast<std::size_t>(i)]).amps();
    }
    const Matrix uq = kit.U.matrix() * q0;
    r.u_unitarity_defect = max_abs(uq.adjoint() * uq - Matrix::Identity(ns, ns));
    for (Eigen::Index i = 0; i < ns; ++i) r.u_map_residual = std::max(r.u_map_residual, (uq.col(i) - q1.col(i)).norm());
    {
        const Matrix conj = kit.U.matrix() * code::build_sigma(0, p).matrix() * kit.U.matrix().adjoint();
        Matrix diff = conj - code::build_sigma(1, p).matrix();
        diff = 0.5 * (diff + diff.adjoint()).eval();
        r.u_conjugation_residual = fock::trace_norm(FockOperator::hermitian(p.N, diff));
    }
    r.fidelities = switch_fidelities(kit);

    const auto d = static_cast<Eigen::Index>(p.N + 1);
    r.remainder_min_eigenvalue = 0.0;
    bool first = true;
    for (int b = 0; b < 2; ++b) {
        const Povm& povm = kit.povm(b);
        Matrix sum = Matrix::Zero(d, d);
        for (const auto& e : povm.elements) sum += e.matrix();
        r.completeness_residual = std::max(r.completeness_residual, max_abs(sum - Matrix::Identity(d, d)));
        const auto ev = fock::hermitian_eigenvalues(povm.elements.back());
        const double min_ev = ev.empty() ? 0.0 : ev.front();
        r.remainder_min_eigenvalue = first ? min_ev : std::min(r.remainder_min_eigenvalue, min_ev);
        first = false;
        for (std::size_t m = 0; m < povm.vectors.size(); ++m) {
            const Matrix& th = povm.elements[m].matrix();
            r.projector_residual = std::max(r.projector_residual, max_abs(th * th - th));
            for (std::size_t m2 = 0; m2 < povm.vectors.size(); ++m2) {
                const Complex ip = povm.vectors[m].inner(povm.vectors[m2]);
                r.chi_orthonormality_defect =
                    std::max(r.chi_orthonormality_defect, std::abs(ip - (m == m2 ? 1.0 : 0.0)));
            }
        }

        const auto dist = outcome_distribution(b, kit);
        r.outcomes.push_back(dist.probabilities);
        r.remainder_mass.push_back(dist.remainder);

        std::vector<double> fids;
        std::vector<int> map;
        for (int m = 0; m < p.M; ++m) {
            const auto match = conditional_bob_state(m, b, kit);
            fids.push_back(match.fidelity);
            map.push_back(match.matched_index);
        }
        r.map_is_bijection.push_back(std::set<int>(map.begin(), map.end()).size() == static_cast<std::size_t>(p.M) &&
                                     std::find(map.begin(), map.end(), -1) == map.end());
        r.conditional_fidelity.push_back(std::move(fids));
        r.conditional_map.push_back(std::move(map));

        const auto untouched = fock::reduced_state(kit.purification(b), 1);
        for (const Povm* pv : {&kit.povms.povm0, &kit.povms.povm1})
            r.no_signalling_residual = std::max(
                r.no_signalling_residual, fock::trace_norm(bob_state_after(kit.purification(b), *pv) - untouched));
    }

    r.literal_u_min_fidelity = 1.0;
    for (int m = 0; m < p.M; ++m)
        r.literal_u_min_fidelity =
            std::min(r.literal_u_min_fidelity, conditional_bob_state(m, 1, kit, kit.povms.povm1_via_u).fidelity);
    return r;
}

Document to_document(const MayersReport& r) {
    Document d;
    d["t"] = r.t;
    d["M"] = r.M;
    d["cutoff"] = r.cutoff;
    d["eigenvalues"] = r.eigenvalues;
    d["discarded_mass"] = r.discarded_mass;
    d["purification_norm_defect"] = r.purification_norm_defect;
    d["marginal_residual"] = r.marginal_residual;
    d["schmidt_residual"] = r.schmidt_residual;
    d["u_unitarity_defect"] = r.u_unitarity_defect;
    d["u_map_residual"] = r.u_map_residual;
    d["u_conjugation_residual"] = r.u_conjugation_residual;
    d["fidelity_one_sided"] = r.fidelities.one_sided;
    d["fidelity_two_sided"] = r.fidelities.two_sided;
    d["povm_completeness_residual"] = r.completeness_residual;
    d["povm_remainder_min_eigenvalue"] = r.remainder_min_eigenvalue;
    d["povm_projector_residual"] = r.projector_residual;
    d["chi_orthonormality_defect"] = r.chi_orthonormality_defect;
    d["outcomes"] = r.outcomes;
    d["remainder_mass"] = r.remainder_mass;
    d["conditional_fidelity"] = r.conditional_fidelity;
    d["conditional_map"] = r.conditional_map;
    d["map_is_bijection"] = r.map_is_bijection;
    d["no_signalling_residual"] = r.no_signalling_residual;
    d["literal_u_min_fidelity_b1"] = r.literal_u_min_fidelity;
    d["passes"] = r.passes();
    return d;
}

}  // namespace qbc::mayers
