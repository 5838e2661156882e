// polytope.hpp
// Exact rational polytopes with dual H/V representations, unimodular facet
// charts for the boundary measure, convex piecewise-affine functions and the
// lifted polytope of a test configuration.
#pragma once

#include <optional>
#include <vector>

#include "kstab/polynomial.hpp"
#include "kstab/rational.hpp"

namespace kstab {

/// normal . x >= offset, normal arbitrary rational (primitivized on use).
struct Halfspace {
  QVector normal;
  Rational offset;
};

/// l_F(x) = normal . x - offset >= 0 with a primitive inward integer normal.
struct Facet {
  ZVector normal;
  Rational offset;

  Rational value(const QVector& x) const;
  double value(const Eigen::VectorXd& x) const;
};

/// Bounded full-dimensional polytope. Dimension 0 is allowed and denotes a
/// single point (used for facet images of one-dimensional polytopes).
class RationalPolytope {
 public:
  static RationalPolytope from_vertices(const std::vector<QVector>& points);
  static RationalPolytope from_halfspaces(const std::vector<Halfspace>& halfspaces);
  /// nullopt when the intersection is empty or lower-dimensional; throws when unbounded.
  static std::optional<RationalPolytope> try_from_halfspaces(int dim, const std::vector<Halfspace>& halfspaces);
  static RationalPolytope point();

  int dim() const { return dim_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<QVector>& vertices() const { return vertices_; }
  /// Indices of the vertices lying on facet f, sorted.
  const std::vector<int>& facet_vertices(int f) const { return facet_vertices_.at(static_cast<std::size_t>(f)); }

  /// All vertices integral (offsets are then integral as well).
  bool is_integer() const;
  bool contains(const QVector& x) const;
  bool contains_in_interior(const QVector& x) const;
  bool contains_in_interior(const Eigen::VectorXd& x) const;
  Rational volume() const;
  std::vector<Halfspace> halfspaces() const;

  /// Lexicographic min/max of coordinate i over the vertices.
  Rational min_coordinate(int i) const;
  Rational max_coordinate(int i) const;

 private:
  RationalPolytope() = default;
  void attach_facet_vertices();

  int dim_ = 0;
  std::vector<Facet> facets_;
  std::vector<QVector> vertices_;
  std::vector<std::vector<int>> facet_vertices_;
};

/// Unimodular affine chart y = U x + t of a facet, with U in GL(n, Z) whose last
/// row is the facet normal, so that the facet lands in {y_n = 0} and the
/// boundary measure d sigma becomes Lebesgue measure on the first n-1 coordinates.
struct FacetChart {
  int facet = 0;
  ZMatrix linear;
  QVector translation;
  RationalPolytope image = RationalPolytope::point();

  /// x = embed_linear * y' + embed_offset for y' in the image.
  QMatrix embed_linear;
  QVector embed_offset;

  QVector apply(const QVector& x) const;
  QVector embed(const QVector& y) const;
};

FacetChart facet_chart(const RationalPolytope& p, int facet);

/// d sigma measure of a facet.
Rational facet_measure(const RationalPolytope& p, int facet);

struct AffinePiece {
  QVector gradient;
  Rational constant;
};

/// f(x) = max_i (a_i . x + b_i): convex, continuous and rational.
class PiecewiseAffine {
 public:
  explicit PiecewiseAffine(std::vector<AffinePiece> pieces);
  static PiecewiseAffine constant(int dim, const Rational& c);

  int dim() const { return dim_; }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  Rational operator()(const QVector& x) const;
  double eval(const Eigen::VectorXd& x) const;
  /// lcm of all coefficient denominators.
  Integer denominator_lcm() const;

  /// f o g^{-1}, i.e. the same function in coordinates x' = g x.
  PiecewiseAffine transformed(const ZMatrix& g) const;
  PiecewiseAffine plus(const Rational& c) const;
  PiecewiseAffine scaled(const Rational& s) const;

 private:
  int dim_ = 0;
  std::vector<AffinePiece> pieces_;
};

/// Closure of Q = {(x, t) : x in P, 0 <= t <= R - f(x)}.
RationalPolytope lift_polytope(const RationalPolytope& p, const PiecewiseAffine& f, const Rational& r);

using Simplex = std::vector<QVector>;

/// Pulling triangulation: simplices with disjoint interiors covering P.
std::vector<Simplex> triangulate(const RationalPolytope& p);
Rational simplex_volume(const Simplex& s);

RationalPolytope transform(const RationalPolytope& p, const ZMatrix& g);
bool is_in_positive_chamber(const RationalPolytope& p);

/// Regions of P on which a single piece of f is active (full-dimensional ones only).
std::vector<std::pair<int, RationalPolytope>> linearity_cells(const RationalPolytope& p, const PiecewiseAffine& f);

}  // namespace kstab
