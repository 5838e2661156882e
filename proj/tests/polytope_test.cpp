#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kstab/error.hpp"
#include "kstab/polytope.hpp"
#include "support.hpp"

using namespace kstab;
using namespace kstab::testing;

namespace {

RationalPolytope random_polytope(std::mt19937& rng, int dim, int points) {
  std::uniform_int_distribution<int> d(-6, 6);
  while (true) {
    std::vector<QVector> pts;
    for (int i = 0; i < points; ++i) {
      QVector v(dim);
      for (int j = 0; j < dim; ++j) v(j) = Rational(d(rng), 1 + (i + j) % 3);
      pts.push_back(v);
    }
    try {
      return RationalPolytope::from_vertices(pts);
    } catch (const InputError&) {
      // degenerate sample, draw again
    }
  }
}

// Area of a convex polygon by the shoelace formula after sorting by angle.
double shoelace(const RationalPolytope& p) {
  std::vector<Eigen::Vector2d> v;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& q : p.vertices()) {
    v.emplace_back(q(0).to_double(), q(1).to_double());
    c += v.back();
  }
  c /= static_cast<double>(v.size());
  std::sort(v.begin(), v.end(), [&](const auto& a, const auto& b) {
    return std::atan2(a.y() - c.y(), a.x() - c.x()) < std::atan2(b.y() - c.y(), b.x() - c.x());
  });
  double area = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    area += a.x() * b.y() - a.y() * b.x();
  }
  return std::abs(area) / 2.0;
}

QVector centroid(const RationalPolytope& p) {
  QVector c = QVector::Zero(p.dim());
  for (const auto& v : p.vertices()) c += v;
  return c / Rational(static_cast<long>(p.vertices().size()));
}

}  // namespace

TEST(Polytope, SquareBasics) {
  const auto p = box(0, 1);
  EXPECT_EQ(p.dim(), 2);
  EXPECT_EQ(p.facets().size(), 4u);
  EXPECT_EQ(p.vertices().size(), 4u);
  EXPECT_EQ(p.volume(), Rational(1));
  EXPECT_TRUE(p.is_integer());
  EXPECT_TRUE(p.contains(qv({1, Rational(1, 2)})));
  EXPECT_FALSE(p.contains_in_interior(qv({1, Rational(1, 2)})));
  EXPECT_TRUE(p.contains_in_interior(qv({Rational(1, 3), Rational(1, 2)})));
  EXPECT_FALSE(p.contains(qv({2, 0})));
}

TEST(Polytope, InteriorPointsAreNotVertices) {
  const auto p = polytope({{0, 0}, {2, 0}, {0, 2}, {2, 2}, {1, 1}, {1, 0}});
  EXPECT_EQ(p.vertices().size(), 4u);
  EXPECT_THROW(polytope({{0, 0}, {1, 1}, {2, 2}}), InputError);
}

TEST(Polytope, HalfspaceRoundTrip) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_polytope(rng, 2 + trial % 2, 7);
    const auto q = RationalPolytope::from_halfspaces(p.halfspaces());
    EXPECT_EQ(q.vertices(), p.vertices());
    EXPECT_EQ(q.volume(), p.volume());
  }
}

TEST(Polytope, UnboundedAndEmptyHalfspaces) {
  std::vector<Halfspace> quadrant{{qv({1, 0}), 0}, {qv({0, 1}), 0}};
  EXPECT_THROW(RationalPolytope::from_halfspaces(quadrant), InputError);
  std::vector<Halfspace> empty{{qv({1}), 2}, {qv({-1}), -1}};
  EXPECT_FALSE(RationalPolytope::try_from_halfspaces(1, empty).has_value());
}

TEST(Polytope, VolumeMatchesShoelace) {
  std::mt19937 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_polytope(rng, 2, 8);
    EXPECT_NEAR(p.volume().to_double(), shoelace(p), 1e-12);
    Rational tri(0);
    for (const auto& s : triangulate(p)) tri += simplex_volume(s);
    EXPECT_EQ(tri, p.volume());
  }
}

TEST(Polytope, SlantedFacetMeasure) {
  const auto p2 = corner_simplex({2, 3});
  const auto p3 = corner_simplex({2, 3, 5});
  Rational slanted2(0), slanted3(0);
  for (std::size_t f = 0; f < p2.facets().size(); ++f)
    if (p2.facets()[f].offset != Rational(0)) slanted2 = facet_measure(p2, static_cast<int>(f));
  for (std::size_t f = 0; f < p3.facets().size(); ++f)
    if (p3.facets()[f].offset != Rational(0)) slanted3 = facet_measure(p3, static_cast<int>(f));
  EXPECT_EQ(slanted2, Rational(1));
  EXPECT_EQ(slanted3, Rational(1, 2));
}

TEST(Polytope, AxisFacetMeasureIsLebesgue) {
  const auto p = corner_simplex({2, 3, 5});
  for (std::size_t f = 0; f < p.facets().size(); ++f) {
    const ZVector& v = p.facets()[f].normal;
    if (v == ZVector::Unit(3, 0)) EXPECT_EQ(facet_measure(p, static_cast<int>(f)), Rational(15, 2));
    if (v == ZVector::Unit(3, 2)) EXPECT_EQ(facet_measure(p, static_cast<int>(f)), Rational(3));
  }
}

TEST(Polytope, PyramidIdentityForBoundaryMeasure) {
  // Coning each facet to an interior point x0: sum_F l_F(x0) dsigma(F) = n vol(P).
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const auto p = random_polytope(rng, n, n + 4);
    const QVector x0 = centroid(p);
    Rational total(0);
    for (std::size_t f = 0; f < p.facets().size(); ++f) {
      total += p.facets()[f].value(x0) * facet_measure(p, static_cast<int>(f));
    }
    EXPECT_EQ(total, Rational(n) * p.volume());
  }
}

TEST(Polytope, FacetChartMapsFacetIntoHyperplane) {
  std::mt19937 rng(24);
  const auto p = random_polytope(rng, 3, 8);
  for (std::size_t f = 0; f < p.facets().size(); ++f) {
    const FacetChart chart = facet_chart(p, static_cast<int>(f));
    for (int vi : p.facet_vertices(static_cast<int>(f))) {
      const QVector y = chart.apply(p.vertices()[static_cast<std::size_t>(vi)]);
      EXPECT_EQ(y(2), Rational(0));
      EXPECT_EQ(chart.embed(y.head(2)), p.vertices()[static_cast<std::size_t>(vi)]);
    }
  }
}

TEST(Polytope, LiftedPolytope) {
  const auto q = lift_polytope(interval(1, 2), pl({{{1}, 0}}), 3);
  EXPECT_EQ(q.vertices(), (std::vector<QVector>{qv({1, 0}), qv({1, 2}), qv({2, 0}), qv({2, 1})}));
  EXPECT_EQ(q.volume(), Rational(3, 2));
  EXPECT_THROW(lift_polytope(interval(1, 2), pl({{{1}, 0}}), Rational(5, 2)), PreconditionError);
}

TEST(Polytope, LinearityCellsPartitionP) {
  const auto cells = linearity_cells(interval(1, 2), pl({{{0}, 0}, {{2}, -3}}));
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].second.volume() + cells[1].second.volume(), Rational(1));
  std::mt19937 rng(25);
  std::uniform_int_distribution<int> d(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_polytope(rng, 2, 6);
    const auto f = pl({{{d(rng), d(rng)}, d(rng)}, {{d(rng), d(rng)}, d(rng)}, {{d(rng), d(rng)}, d(rng)}});
    Rational total(0);
    for (const auto& [piece, cell] : linearity_cells(p, f)) {
      total += cell.volume();
      const auto& a = f.pieces()[static_cast<std::size_t>(piece)];
      EXPECT_EQ(f(centroid(cell)), a.gradient.dot(centroid(cell)) + a.constant);
    }
    EXPECT_EQ(total, p.volume());
  }
}

TEST(Polytope, TransformPreservesVolumeAndFunctionValues) {
  ZMatrix g(2, 2);
  g << 1, 1, 0, 1;
  const auto p = box(1, 2);
  const auto tp = transform(p, g);
  EXPECT_EQ(tp.volume(), p.volume());
  const auto f = pl({{{0, 0}, 0}, {{1, 1}, -3}});
  const auto tf = f.transformed(g);
  for (const auto& v : p.vertices()) EXPECT_EQ(tf(QVector(to_rational(g) * v)), f(v));
  EXPECT_TRUE(is_in_positive_chamber(p));
  EXPECT_FALSE(is_in_positive_chamber(box(0, 1)));
}

TEST(Polytope, PiecewiseAffineHelpers) {
  const auto f = pl({{{Rational(1, 2)}, Rational(1, 3)}, {{-1}, 0}});
  EXPECT_EQ(f.denominator_lcm(), Integer(6));
  EXPECT_EQ(f(qv({2})), Rational(4, 3));
  EXPECT_EQ(f.plus(1)(qv({2})), Rational(7, 3));
  EXPECT_EQ(f.scaled(3)(qv({-3})), Rational(9));
  EXPECT_EQ(PiecewiseAffine::constant(2, 5)(qv({7, 8})), Rational(5));
}
