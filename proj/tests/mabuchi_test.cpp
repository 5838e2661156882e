#include <gtest/gtest.h>

#include <Eigen/LU>
#include <cmath>
#include <random>

#include "kstab/error.hpp"
#include "kstab/futaki.hpp"
#include "kstab/mabuchi.hpp"
#include "support.hpp"

using namespace kstab;
using namespace kstab::testing;

namespace {

const RootSystem& a1() {
  static const RootSystem rs = RootSystem::classical(Series::A, 1);
  return rs;
}
const RootSystem& a2() {
  static const RootSystem rs = RootSystem::classical(Series::A, 2);
  return rs;
}

Eigen::VectorXd pt(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const Integrand kZero = [](const Eigen::VectorXd&) { return 0.0; };

// S = -1/2 W^{-1} sum_{jk} d_j d_k (W u^{jk}) + f_G with the second
// derivatives taken by Richardson-extrapolated central differences.
double scalar_by_differences(const RootSystem& rs, const SymplecticPotential& u, const Eigen::VectorXd& x) {
  const WeightField w(rs);
  const int n = u.dim();
  auto v = [&](const Eigen::VectorXd& y, int j, int k) { return w.value(y) * u.hessian_inverse(y)(j, k); };
  auto second = [&](int j, int k, double h) {
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(n), ek = Eigen::VectorXd::Zero(n);
    ej(j) = h;
    ek(k) = h;
    return (v(x + ej + ek, j, k) - v(x + ej - ek, j, k) - v(x - ej + ek, j, k) + v(x - ej - ek, j, k)) / (4 * h * h);
  };
  double div = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double h = 1e-3;
      div += (4 * second(j, k, h / 2) - second(j, k, h)) / 3;
    }
  return -0.5 * div / w.value(x) + w.f_G.eval(x);
}

}  // namespace

TEST(Mabuchi, CanonicalInverseHessianOnInterval) {
  const SymplecticPotential u(interval(1, 2));
  for (double x : {1.1, 1.5, 1.93}) EXPECT_NEAR(u.hessian_inverse(pt({x}))(0, 0), 2 * (x - 1) * (2 - x), 1e-14);
  EXPECT_NEAR(u.hessian_inverse(pt({1.5}))(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(u.value(pt({1.0})), 0.0, 1e-15);
  EXPECT_NEAR(u.value(pt({1.5})), 0.5 * std::log(0.5), 1e-15);
}

TEST(Mabuchi, ScalarCurvatureOfCanonicalPotential) {
  const SymplecticPotential u12(interval(1, 2)), u13(interval(1, 3));
  for (const auto& x : interior_grid(interval(1, 2), 100)) {
    EXPECT_NEAR(scalar_curvature(a1(), u12, x), 6 - 4 / x(0), 1e-10);
  }
  for (const auto& x : interior_grid(interval(1, 3), 100)) {
    EXPECT_NEAR(scalar_curvature(a1(), u13, x), 3 - 2 / x(0), 1e-10);
  }
}

TEST(Mabuchi, ScalarCurvatureMatchesFiniteDifferences) {
  const QPolynomial x = var(2, 0), y = var(2, 1);
  const SymplecticPotential u(box(1, 2), (x * x + x * y + y * y * Rational(2)) * Rational(1, 5) + x * x * x * Rational(1, 30));
  u.validate();
  for (const auto& p : {pt({1.3, 1.4}), pt({1.5, 1.5}), pt({1.8, 1.2}), pt({1.1, 1.9})}) {
    EXPECT_NEAR(scalar_curvature(a2(), u, p), scalar_by_differences(a2(), u, p), 1e-6);
  }
  const SymplecticPotential v(interval(1, 3), var(1, 0) * var(1, 0) * var(1, 0) * Rational(1, 10));
  for (double p : {1.2, 2.0, 2.7}) EXPECT_NEAR(scalar_curvature(a1(), v, pt({p})), scalar_by_differences(a1(), v, pt({p})), 1e-6);
}

TEST(Mabuchi, ScalarCurvatureAveragesToA) {
  const WeightField w(a1());
  for (const auto& [lo, hi] : {std::pair<long, long>{1, 2}, {1, 3}}) {
    const auto p = interval(lo, hi);
    const SymplecticPotential u(p);
    const auto r = graded_integral([&](const Eigen::VectorXd& x) { return scalar_curvature(w, u, x) * w.value(x); }, p, {});
    EXPECT_NEAR(r.value, (average_scalar(a1(), p) * volume_W(a1(), p)).to_double(), 1e-8);
  }
  // A2 on a triangle, with a polynomial perturbation.
  const auto tri = polytope({{1, 1}, {3, 1}, {1, 3}});
  const WeightField w2(a2());
  const SymplecticPotential u(tri, var(2, 0) * var(2, 0) * Rational(1, 4));
  const auto r = graded_integral([&](const Eigen::VectorXd& x) { return scalar_curvature(w2, u, x) * w2.value(x); }, tri, {});
  EXPECT_NEAR(r.value, (average_scalar(a2(), tri) * volume_W(a2(), tri)).to_double(), 1e-6);
}

TEST(Mabuchi, ResidualForConstantScalarPreset) {
  const auto p = interval(1, 2);
  const SymplecticPotential u(p);
  const WeightField w(a1());
  const Integrand a = make_A(a1(), p, APreset::Csc);
  for (double x : {1.2, 1.5, 1.8}) EXPECT_NEAR(el_residual(w, u, a, pt({x})), 2 * (6 - 4 / x - 10.0 / 3.0), 1e-10);
  const Integrand paper = make_A(a1(), p, APreset::Paper);
  EXPECT_NEAR(paper(pt({1.5})), (10.0 / 3.0 - 2 / 1.5) / 2, 1e-14);
  EXPECT_EQ(make_A(a1(), p, APreset::Zero)(pt({1.5})), 0.0);
  EXPECT_EQ(parse_a_preset("csc"), APreset::Csc);
  EXPECT_EQ(to_string(APreset::Paper), "paper");
  EXPECT_THROW(parse_a_preset("other"), InputError);
}

TEST(Mabuchi, CanonicalValueOnUnitInterval) {
  const auto r = mabuchi_eval(a1(), SymplecticPotential(interval(1, 2)), kZero);
  EXPECT_NEAR(r.value, 1.5 * std::log(2.0) - 3.0, 1e-9);
  EXPECT_LT(r.error, 1e-8);
  EXPECT_TRUE(r.within_tolerance);
  EXPECT_NEAR(r.boundary_term, 0.0, 1e-15);
}

TEST(Mabuchi, CanonicalBoundaryTermOnLongerInterval) {
  // At either end of [1, 3] the far facet contributes 1/2 * 2 log 2.
  const SymplecticPotential u(interval(1, 3));
  EXPECT_NEAR(u.value(pt({1.0})), std::log(2.0), 1e-15);
  EXPECT_NEAR(u.value(pt({3.0})), std::log(2.0), 1e-15);
  const auto r = mabuchi_eval(a1(), u, kZero);
  EXPECT_NEAR(r.boundary_term, 2 * (1 + 3) * std::log(2.0), 1e-12);
}

TEST(Mabuchi, AffineShiftsChangeValueByLinearFunctional) {
  const auto p = interval(1, 2);
  const Integrand a = make_A(a1(), p, APreset::Paper);
  const SymplecticPotential u(p);
  const double base = mabuchi_eval(a1(), u, a).value;
  for (const QPolynomial& l : {cst(1, 2), var(1, 0) * Rational(-3) + cst(1, 1)}) {
    const double shifted = mabuchi_eval(a1(), u.plus(l), a).value;
    EXPECT_NEAR(shifted - base, linear_functional(a1(), p, a, l), 1e-9);
  }
  // The constant-scalar preset annihilates constants.
  EXPECT_NEAR(linear_functional(a1(), p, make_A(a1(), p, APreset::Csc), cst(1, 1)), 0.0, 1e-12);
  EXPECT_NEAR(linear_functional(a2(), box(1, 2), make_A(a2(), box(1, 2), APreset::Csc), cst(2, 1)), 0.0, 1e-9);
}

TEST(Mabuchi, MidpointConvexity) {
  std::mt19937 rng(61);
  std::uniform_int_distribution<int> d(0, 64);
  const auto p = interval(1, 2);
  const Integrand a = make_A(a1(), p, APreset::Csc);
  const QPolynomial x = var(1, 0);
  auto random_convex = [&]() {
    const Rational c2(d(rng), 64), c1(d(rng) - 32, 64);
    return x * x * c2 + x * c1;
  };
  GradedQuadratureSpec spec;
  spec.depth = 8;
  for (int trial = 0; trial < 50; ++trial) {
    const QPolynomial g0 = random_convex(), g1 = random_convex();
    const double f0 = mabuchi_eval(a1(), SymplecticPotential(p, g0), a, spec).value;
    const double f1 = mabuchi_eval(a1(), SymplecticPotential(p, g1), a, spec).value;
    const double fm = mabuchi_eval(a1(), SymplecticPotential(p, (g0 + g1) * Rational(1, 2)), a, spec).value;
    EXPECT_LE(fm, 0.5 * (f0 + f1) + 1e-9);
  }
}

TEST(Mabuchi, VariationMatchesResidual) {
  const auto p = interval(1, 2);
  // Off-centre: for the constant-scalar A the residual is odd about 3/2.
  const auto bump = standard_bump(qv({Rational(5, 4)}), qv({Rational(13, 8)}));
  const auto rep = variation_check(a1(), SymplecticPotential(p), make_A(a1(), p, APreset::Csc), bump, 1e-4);
  EXPECT_LT(rep.relative_discrepancy, 1e-4);
  EXPECT_LT(rep.doubling_discrepancy, 1e-6);
  const auto bump2 = standard_bump(qv({Rational(5, 4), Rational(5, 4)}), qv({Rational(7, 4), Rational(3, 2)}));
  GradedQuadratureSpec spec;
  spec.depth = 4;
  const auto rep2 = variation_check(a2(), SymplecticPotential(box(1, 2)), make_A(a2(), box(1, 2), APreset::Csc), bump2, 1e-4, spec);
  EXPECT_LT(rep2.relative_discrepancy, 1e-4);
}

TEST(Mabuchi, InvalidPotentialsAreRejected) {
  const auto p = interval(1, 2);
  const SymplecticPotential bad(p, var(1, 0) * var(1, 0) * Rational(-10));
  EXPECT_THROW(bad.validate(), PreconditionError);
  EXPECT_THROW(bad.hessian_inverse(pt({1.5})), PreconditionError);
  EXPECT_THROW(SymplecticPotential(p).with_bump(standard_bump(qv({1}), qv({Rational(3, 2)})), 1.0), PreconditionError);
  EXPECT_THROW(SymplecticPotential(p).hessian(pt({2.5})), PreconditionError);
}

TEST(Mabuchi, InteriorGridIsInterior) {
  const auto tri = polytope({{1, 1}, {3, 1}, {1, 3}});
  const auto grid = interior_grid(tri, 10);
  EXPECT_FALSE(grid.empty());
  for (const auto& x : grid) EXPECT_LT(x.sum(), 4.0);
  EXPECT_EQ(interior_grid(interval(1, 2), 100).size(), 100u);
}

TEST(Mabuchi, StableFormAgreesWithDirectInverseInside) {
  const auto tri = polytope({{1, 1}, {3, 1}, {1, 3}});
  const SymplecticPotential u(tri, var(2, 0) * var(2, 1) * Rational(1, 10));
  for (const auto& x : interior_grid(tri, 6)) {
    const Eigen::MatrixXd h = u.hessian(x);
    EXPECT_LT((u.hessian_inverse(x) - h.inverse()).norm(), 1e-12 * h.inverse().norm());
    EXPECT_NEAR(u.log_det_hessian(x), std::log(h.determinant()), 1e-12);
    const auto inv = u.inverse_hessian_derivatives(x);
    const auto dh = u.hessian_derivatives(x);
    for (int k = 0; k < 2; ++k) EXPECT_LT((inv.du[static_cast<std::size_t>(k)] + inv.u * dh[static_cast<std::size_t>(k)] * inv.u).norm(), 1e-10);
  }
}

TEST(Mabuchi, ScalarCurvatureIsContinuousUpToSlantedFacet) {
  const auto tri = polytope({{1, 1}, {3, 1}, {1, 3}});
  const SymplecticPotential u(tri);
  const WeightField w(a2());
  // Approach x + y = 4 along a normal line; S extends smoothly, so the values settle.
  const double near = scalar_curvature(w, u, pt({1.7, 2.3 - 1e-8}));
  const double nearer = scalar_curvature(w, u, pt({1.7, 2.3 - 1e-11}));
  EXPECT_NEAR(near, nearer, 1e-7);
  EXPECT_NEAR(scalar_curvature(w, u, pt({1.0 + 1e-11, 3.0 - 2e-11})), 6.5, 1e-8);
}
