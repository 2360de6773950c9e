#pragma once

// Wigner functions of coherent-state mixtures on a rectangular grid, and the
// stellar polynomial of a truncated state with its roots.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "qbc/document.hpp"
#include "qbc/fockcore.hpp"

namespace qbc::phase {

using fock::Complex;
using fock::FockVector;

struct GridSpec {
    double x_min = -5.0, x_max = 5.0;
    double p_min = -5.0, p_max = 5.0;
    std::size_t nx = 101, np = 101;   // points per axis, endpoints included

    /// Square window [-(t+4), t+4]^2.
    static GridSpec around(double t, std::size_t points = 101);
    void validate() const;
    double dx() const;
    double dp() const;
};

struct WignerGrid {
    GridSpec spec;
    std::vector<double> values;   // row-major: index = ix * np + ip

    double x(std::size_t ix) const;
    double p(std::size_t ip) const;
    double at(std::size_t ix, std::size_t ip) const { return values[ix * spec.np + ip]; }

    /// Riemann sum of values * dx * dp.
    double integral() const;
    double min() const;
    double max() const;
};

struct WeightedPoint {
    double weight = 0.0;
    Complex alpha;
};

/// W(x, p) = (1/pi) sum_j w_j exp(-|alpha_j - (x + i p)|^2).
/// Throws ParameterError on an empty list, negative weights or weights not
/// summing to 1 within 1e-9.
WignerGrid wigner_mixture(const std::vector<WeightedPoint>& points, const GridSpec& spec);

/// The M code states of bit b with equal weights.
std::vector<WeightedPoint> code_state_points(double t, int M, int b);

/// max |W_a - W_b| over a common grid.
double max_gap(const WignerGrid& a, const WignerGrid& b);

/// "x,p,w" header followed by one row per grid point, %.17g values.
void write_csv(std::ostream& out, const WignerGrid& grid);
std::string to_csv(const WignerGrid& grid);

struct StellarPolynomial {
    std::vector<Complex> coefficients;   // d_n = c_n / sqrt(n!), trailing zeros stripped

    std::size_t degree() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
    /// Index of the first nonzero coefficient.
    std::size_t zero_multiplicity() const;
    Complex operator()(Complex z) const;
};

/// Throws ParameterError for the zero vector.
StellarPolynomial stellar_polynomial(const FockVector& v);

struct StellarRoot {
    Complex z;
    std::size_t multiplicity = 1;   // size of the cluster of numerically coincident roots
};

struct RootReport {
    double radius = 0.0;
    std::size_t degree = 0;
    std::size_t zero_multiplicity = 0;
    std::vector<StellarRoot> inside;   // |z| <= radius
    std::size_t outside = 0;           // count (with multiplicity) beyond the radius

    std::size_t inside_count() const;
};

/// Roots with |z| <= radius, from the eigenvalues of the companion matrix of the
/// deflated polynomial. A negative radius selects the default sqrt(N).
RootReport stellar_roots(const StellarPolynomial& poly, double radius, std::size_t cutoff);
RootReport stellar_roots(const FockVector& v, double radius = -1.0);

Document to_document(const RootReport& report);

}  // namespace qbc::phase
