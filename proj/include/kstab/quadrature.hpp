// quadrature.hpp
// Exact integration of polynomials (and convex PL x polynomial products) over
// rational polytopes and their boundaries, plus a graded floating-point rule
// for integrands with logarithmic singularities on the boundary.
#pragma once

#include <functional>

#include "kstab/polynomial.hpp"
#include "kstab/polytope.hpp"

namespace kstab {

/// Exact integral of h over a simplex: affine pull-back onto the standard
/// simplex, then the monomial formula.
Rational integral_simplex(const QPolynomial& h, const Simplex& s);

/// Exact integral of h d mu over P.
Rational integral_polytope(const QPolynomial& h, const RationalPolytope& p);

/// Exact integral of h d sigma over one facet.
Rational facet_integral(const QPolynomial& h, const RationalPolytope& p, int facet);

/// Exact integral of h d sigma over the boundary of P.
Rational boundary_integral(const QPolynomial& h, const RationalPolytope& p);

/// Exact integral of f h d mu, splitting P into the linearity cells of f.
Rational integral_pl_poly(const PiecewiseAffine& f, const QPolynomial& h, const RationalPolytope& p);

/// Exact integral of f h d sigma over the boundary of P.
Rational boundary_integral_pl_poly(const PiecewiseAffine& f, const QPolynomial& h, const RationalPolytope& p);

struct GradedQuadratureSpec {
  /// Number of geometrically shrinking cells toward each end of every axis.
  int depth = 12;
  /// Grading ratio between consecutive cells, in (0, 1).
  Rational ratio = Rational(3, 20);
  /// Gauss-Legendre nodes per cell. Every graded cell sees the singularity at
  /// the same relative distance, so accuracy is set by this count, not by depth.
  int nodes = 16;
  double tolerance = 1e-9;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  /// |I(depth, nodes) - I(depth - 1, nodes - 2)|.
  double error = 0.0;
  bool within_tolerance = true;
};

using Integrand = std::function<double(const Eigen::VectorXd&)>;

/// Triangulates P, maps each simplex from the unit cube with the collapsed
/// (Duffy) coordinates and applies a tensor Gauss rule on a mesh graded toward
/// both ends of each axis. Throws CheckFailure on a non-finite sample.
QuadratureResult graded_integral(const Integrand& fn, const RationalPolytope& p, const GradedQuadratureSpec& spec);

/// Gauss-Legendre nodes and weights on [0, 1] (Golub-Welsch).
void gauss_legendre(int count, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Sums values with a fixed-shape pairwise tree.
double pairwise_sum(const std::vector<double>& values);

}  // namespace kstab
