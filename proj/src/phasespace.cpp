#include "qbc/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qbc/errors.hpp"

namespace qbc::phase {

GridSpec GridSpec::around(double t, std::size_t points) {
    const double h = std::abs(t) + 4.0;
    return {-h, h, -h, h, points, points};
}

void GridSpec::validate() const {
    if (!(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(p_min) && std::isfinite(p_max)))
        throw ParameterError("grid bounds must be finite");
    if (!(x_max > x_min) || !(p_max > p_min)) throw ParameterError("grid ranges must be nonempty");
    if (nx < 2 || np < 2) throw ParameterError("grid needs at least 2 points per axis");
}

double GridSpec::dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
double GridSpec::dp() const { return (p_max - p_min) / static_cast<double>(np - 1); }

double WignerGrid::x(std::size_t ix) const { return spec.x_min + static_cast<double>(ix) * spec.dx(); }
double WignerGrid::p(std::size_t ip) const { return spec.p_min + static_cast<double>(ip) * spec.dp(); }

double WignerGrid::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * spec.dx() * spec.dp();
}

double WignerGrid::min() const { return *std::min_element(values.begin(), values.end()); }
double WignerGrid::max() const { return *std::max_element(values.begin(), values.end()); }

WignerGrid wigner_mixture(const std::vector<WeightedPoint>& points, const GridSpec& spec) {
    if (points.empty()) throw ParameterError("wigner_mixture needs at least one point");
    double total = 0.0;
    for (const auto& pt : points) {
        if (!(pt.weight >= 0.0) || !std::isfinite(pt.alpha.real()) || !std::isfinite(pt.alpha.imag()))
            throw ParameterError("weights must be nonnegative and points finite");
        total += pt.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ParameterError("weights must sum to 1");
    spec.validate();

    WignerGrid g{spec, std::vector<double>(spec.nx * spec.np, 0.0)};
    for (std::size_t ix = 0; ix < spec.nx; ++ix) {
        const double x = g.x(ix);
        for (std::size_t ip = 0; ip < spec.np; ++ip) {
            const Complex z(x, g.p(ip));
            double w = 0.0;
            for (const auto& pt : points) w += pt.weight * std::exp(-std::norm(pt.alpha - z));
            g.values[ix * spec.np + ip] = w / std::numbers::pi;
        }
    }
    return g;
}

std::vector<WeightedPoint> code_state_points(double t, int M, int b) {
    if (M < 1) throw ParameterError("M must be positive");
    std::vector<WeightedPoint> pts;
    for (int m = 0; m < M; ++m)
        pts.push_back({1.0 / M, std::polar(t, 2.0 * std::numbers::pi * (m + 0.5 * b) / M)});
    return pts;
}

double max_gap(const WignerGrid& a, const WignerGrid& b) {
    if (a.values.size() != b.values.size() || a.spec.nx != b.spec.nx)
        throw DimensionMismatch("grids differ in shape");
    double g = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) g = std::max(g, std::abs(a.values[i] - b.values[i]));
    return g;
}

void write_csv(std::ostream& out, const WignerGrid& grid) {
    out << "x,p,w\n";
    for (std::size_t ix = 0; ix < grid.spec.nx; ++ix)
        for (std::size_t ip = 0; ip < grid.spec.np; ++ip)
            out << format_double(grid.x(ix)) << ',' << format_double(grid.p(ip)) << ','
                << format_double(grid.at(ix, ip)) << '\n';
}

std::string to_csv(const WignerGrid& grid) {
    std::ostringstream os;
    write_csv(os, grid);
    return os.str();
}

std::size_t StellarPolynomial::zero_multiplicity() const {
    std::size_t i = 0;
    while (i < coefficients.size() && coefficients[i] == Complex(0.0)) ++i;
    return i;
}

Complex StellarPolynomial::operator()(Complex z) const {
    Complex acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * z + *it;
    return acc;
}

StellarPolynomial stellar_polynomial(const FockVector& v) {
    if (v.modes() != 1) throw DimensionMismatch("stellar polynomial needs a single-mode vector");
    StellarPolynomial p;
    for (std::size_t n = 0; n < v.dim(); ++n)
        p.coefficients.push_back(v[n] * std::exp(-0.5 * std::lgamma(static_cast<double>(n) + 1.0)));
    while (!p.coefficients.empty() && p.coefficients.back() == Complex(0.0)) p.coefficients.pop_back();
    if (p.coefficients.empty()) throw ParameterError("stellar polynomial of the zero vector");
    return p;
}

std::size_t RootReport::inside_count() const {
    std::size_t n = 0;
    for (const auto& r : inside) n += r.multiplicity;
    return n;
}

RootReport stellar_roots(const StellarPolynomial& poly, double radius, std::size_t cutoff) {
    if (poly.coefficients.empty()) throw ParameterError("stellar roots of the zero polynomial");
    RootReport rep;
    rep.radius = radius < 0.0 ? std::sqrt(static_cast<double>(cutoff)) : radius;
    rep.degree = poly.degree();
    rep.zero_multiplicity = poly.zero_multiplicity();

    // Deflate the roots at the origin, then rescale z = s w so that the constant
    // and leading coefficients have equal modulus.
    const std::vector<Complex> e(poly.coefficients.begin() + static_cast<std::ptrdiff_t>(rep.zero_multiplicity),
                                 poly.coefficients.end());
    const auto deg = static_cast<Eigen::Index>(e.size() - 1);
    std::vector<Complex> roots;
    if (deg > 0) {
        const double log_s = (std::log(std::abs(e.front())) - std::log(std::abs(e.back()))) / static_cast<double>(deg);
        const Complex lead = e.back() * std::exp(log_s * static_cast<double>(deg));
        fock::Matrix comp = fock::Matrix::Zero(deg, deg);
        for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
        for (Eigen::Index j = 0; j < deg; ++j)
            comp(j, deg - 1) = -e[static_cast<std::size_t>(j)] * std::exp(log_s * static_cast<double>(j)) / lead;
        Eigen::ComplexEigenSolver<fock::Matrix> solver(comp, false);
        const double s = std::exp(log_s);
        for (Eigen::Index i = 0; i < deg; ++i) roots.push_back(solver.eigenvalues()[i] * s);
    }

    if (rep.zero_multiplicity > 0) rep.inside.push_back({Complex(0.0), rep.zero_multiplicity});
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : std::arg(a) < std::arg(b);
    });
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        StellarRoot cluster{roots[i], 1};
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (!used[j] && std::abs(roots[j] - roots[i]) <= 1e-6 * std::max(1.0, std::abs(roots[i]))) {
                used[j] = true;
                ++cluster.multiplicity;
            }
        }
        if (std::abs(cluster.z) <= rep.radius)
            rep.inside.push_back(cluster);
        else
            rep.outside += cluster.multiplicity;
    }
    return rep;
}

RootReport stellar_roots(const FockVector& v, double radius) {
    return stellar_roots(stellar_polynomial(v), radius, v.cutoff());
}

Document to_document(const RootReport& r) {
    Document d;
    d["radius"] = r.radius;
    d["degree"] = r.degree;
    d["zero_multiplicity"] = r.zero_multiplicity;
    d["inside_count"] = r.inside_count();
    d["outside_count"] = r.outside;
    Document roots = Document::array();
    for (const auto& root : r.inside)
        roots.push_back({{"re", root.z.real()}, {"im", root.z.imag()}, {"multiplicity", root.multiplicity}});
    d["roots"] = roots;
    return d;
}

}  // namespace qbc::phase
