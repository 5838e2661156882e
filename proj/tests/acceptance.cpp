// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "kstab/futaki.hpp"
#include "kstab/lattice.hpp"
#include "kstab/mabuchi.hpp"
#include "kstab/pick.hpp"
#include "support.hpp"

using namespace kstab;
using namespace kstab::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::int64_t> range(std::int64_t first, std::int64_t last, std::int64_t step = 1) {
  std::vector<std::int64_t> out;
  for (auto k = first; k <= last; k += step) out.push_back(k);
  return out;
}

const RootSystem& a1() {
  static const RootSystem rs = RootSystem::classical(Series::A, 1);
  return rs;
}
const RootSystem& a2() {
  static const RootSystem rs = RootSystem::classical(Series::A, 2);
  return rs;
}

void futaki_exactness(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = interval(1, 2);
  const auto f = pl({{{1}, 0}});
  const Rational closed = futaki_closed_form(a1(), p, f);
  o.detail << "closed form " << closed;
  o.expect(closed == Rational(-2, 27), "closed form");
  for (long r : {3, 4}) {
    const auto fit = ehrhart_fit(a1(), p, f, Rational(r), range(1, 8));
    o.detail << ", oracle(R=" << r << ") " << fit.F1;
    o.expect(fit.F1 == Rational(-2, 27), "oracle at R=" + std::to_string(r));
  }
  const double t = seconds_since(t0);
  o.detail << ", " << t << " s";
  o.expect(t < 1.0, "runtime");
}

void futaki_kink(Outcome& o) {
  const auto p = interval(1, 2);
  const auto f = pl({{{0}, 0}, {{2}, -3}});
  const Rational closed = futaki_closed_form(a1(), p, f);
  const auto fit = ehrhart_fit(a1(), p, f, default_R(p, f), range(2, 16, 2));
  o.detail << "closed form " << closed << ", oracle " << fit.F1 << " over k = 2, 4, ..., 16";
  o.expect(closed == Rational(-35, 108), "closed form");
  o.expect(fit.F1 == Rational(-35, 108), "oracle");
}

void constant_vanishing(Outcome& o) {
  struct Case {
    const RootSystem* rs;
    RationalPolytope p;
    std::string name;
  };
  const std::vector<Case> suite{{&a1(), interval(1, 2), "A1 x [1,2]"},
                                {&a1(), interval(1, 3), "A1 x [1,3]"},
                                {&a2(), box(1, 2), "A2 x [1,2]^2"}};
  for (const auto& c : suite) {
    const auto f = PiecewiseAffine::constant(c.p.dim(), Rational(5, 2));
    const Rational closed = futaki_closed_form(*c.rs, c.p, f);
    const auto rep = futaki_cross_check(*c.rs, c.p, f, Rational(4));
    o.detail << c.name << ": " << closed << "/" << *rep.F1_oracle << "; ";
    o.expect(closed == Rational(0) && *rep.F1_oracle == Rational(0), c.name);
  }
}

void slanted_facet_measure(Outcome& o) {
  for (const auto& [ps, expected] : {std::pair<std::vector<long>, Rational>{{2, 3}, Rational(1)},
                                     {{2, 3, 5}, Rational(1, 2)}}) {
    const auto p = corner_simplex(ps);
    for (std::size_t f = 0; f < p.facets().size(); ++f) {
      if (p.facets()[f].offset == Rational(0)) continue;
      const Rational m = facet_measure(p, static_cast<int>(f));
      o.detail << "n=" << ps.size() << ": " << m << "; ";
      o.expect(m == expected, "n=" + std::to_string(ps.size()));
    }
  }
}

void facet_limit(Outcome& o) {
  const std::vector<std::int64_t> ks{8, 16, 32, 64, 128};
  double lo = 1.0, hi = 0.0;
  for (const auto& p : {box(0, 1), corner_simplex({2, 3}), corner_simplex({2, 3, 5})}) {
    const auto limits = facet_limits(p, ks);
    o.expect(facet_limits_halve(limits), "ratio outside [0.25, 0.75]");
    for (const auto& lim : limits)
      for (double r : lim.ratio) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
  }
  o.detail << "error ratios under doubling in [" << lo << ", " << hi << "]";
}

void generalized_pick(Outcome& o) {
  const QPolynomial x = var(2, 0), y = var(2, 1);
  const QPolynomial h = x * x + y * y;
  std::vector<Rational> t, ks_sum;
  int mismatches = 0;
  for (long k = 1; k <= 64; ++k) {
    const Rational s = pick_sum(box(0, 1), h, k);
    const Rational expected = Rational(2, 3) * Rational(k * k) + Rational(5, 3) * Rational(k) + Rational(4, 3) +
                              Rational(1, 3 * k);
    if (s != expected) ++mismatches;
    t.emplace_back(k);
    ks_sum.push_back(Rational(k) * s);
  }
  o.expect(mismatches == 0, std::to_string(mismatches) + " sums differ from the closed form");
  int verified = 0;
  const auto coeffs = interpolate_exact(t, ks_sum, 3, &verified);
  o.detail << "interpolated c2 = " << coeffs[3] << ", c1 = " << coeffs[2] << " (" << verified << " extra samples)";
  o.expect(coeffs[3] == Rational(2, 3) && coeffs[2] == Rational(5, 3), "interpolated coefficients");
  const auto fit = pick_fit(box(0, 1), h, default_pick_samples());
  o.expect(fit.c_top == Rational(2, 3) && fit.c_next == Rational(5, 3), "exact integrals");
  double worst = 0.0;
  for (double r : fit.residuals) worst = std::max(worst, std::abs(r));
  o.detail << "; max |residual| " << worst << ", " << fit.message;
  o.expect(fit.pass && worst <= 2.0, "residual bound");
}

void weyl_dimensions(Outcome& o) {
  for (long l = 0; l <= 30; ++l) o.expect(dimension(a1(), {l}) == Rational(l + 1), "A1 at " + std::to_string(l));
  o.expect(dimension(a2(), {1, 0}) == Rational(3) && dimension(a2(), {1, 1}) == Rational(8), "A2 table");
  const auto b2 = RootSystem::classical(Series::B, 2);
  const auto g2 = RootSystem::classical(Series::G2, 2);
  o.expect(dimension(b2, {1, 0}) * dimension(b2, {0, 1}) == Rational(20) &&
               std::min(dimension(b2, {1, 0}), dimension(b2, {0, 1})) == Rational(4),
           "B2 fundamentals");
  o.expect(std::min(dimension(g2, {1, 0}), dimension(g2, {0, 1})) == Rational(7) &&
               std::max(dimension(g2, {1, 0}), dimension(g2, {0, 1})) == Rational(14),
           "G2 fundamentals");
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> d(0, 12);
  int checked = 0;
  for (const RootSystem* rs : {&a1(), &a2(), &b2, &g2}) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<long> lambda;
      for (int i = 0; i < rs->rank(); ++i) lambda.push_back(d(rng));
      const Rational dim = dimension(*rs, lambda);
      o.expect(dim.is_integer() && dim.sign() > 0, "integrality");
      ++checked;
    }
  }
  o.detail << "tables match; " << checked << " random dominant weights integral";
}

void scalar_identity(Outcome& o) {
  const WeightField w(a1());
  for (const auto& [hi, formula_a, formula_b, total] : {std::tuple<long, double, double, double>{2, 6.0, 4.0, 5.0},
                                                        {3, 3.0, 2.0, 8.0}}) {
    const auto p = interval(1, hi);
    const SymplecticPotential u(p);
    double worst = 0.0;
    const auto grid = interior_grid(p, 100);
    for (const auto& x : grid) worst = std::max(worst, std::abs(scalar_curvature(w, u, x) - (formula_a - formula_b / x(0))));
    const auto integral =
        graded_integral([&](const Eigen::VectorXd& x) { return scalar_curvature(w, u, x) * w.value(x); }, p, {});
    const double exact = (average_scalar(a1(), p) * volume_W(a1(), p)).to_double();
    o.detail << "[1," << hi << "]: max pointwise error " << worst << " on " << grid.size() << " points, int S W = "
             << integral.value << "; ";
    o.expect(grid.size() == 100 && worst <= 1e-8, "pointwise on [1," + std::to_string(hi) + "]");
    o.expect(std::abs(integral.value - total) <= 1e-6 && exact == total, "integral on [1," + std::to_string(hi) + "]");
  }
}

void mabuchi_value(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  GradedQuadratureSpec spec;
  const auto r = mabuchi_eval(a1(), SymplecticPotential(interval(1, 2)), [](const Eigen::VectorXd&) { return 0.0; }, spec);
  const double expected = 1.5 * std::log(2.0) - 3.0;
  const double t = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "value %.12f, expected %.12f, |diff| %.2e at depth %d, %.3f s", r.value, expected,
                std::abs(r.value - expected), spec.depth, t);
  o.detail << buf;
  o.expect(std::abs(r.value - expected) <= 1e-6 && spec.depth <= 12, "value");
  o.expect(t < 5.0, "runtime");
}

void variational_identity(Outcome& o) {
  const auto bump = standard_bump(qv({Rational(5, 4)}), qv({Rational(7, 4)}));
  const auto rep = variation_check(a1(), SymplecticPotential(interval(1, 2)),
                                   [](const Eigen::VectorXd&) { return 0.0; }, bump, 1e-4);
  o.detail << "finite difference " << rep.finite_difference << ", predicted " << rep.predicted << ", relative "
           << rep.relative_discrepancy << ", doubling " << rep.doubling_discrepancy;
  o.expect(rep.relative_discrepancy <= 1e-4, "relative discrepancy");
  o.expect(rep.doubling_discrepancy <= 1e-6, "doubling");
}

void equivariance(Outcome& o) {
  const auto p = box(1, 2);
  const auto f = pl({{{0, 0}, 0}, {{1, 1}, -3}});
  for (const auto& entries : {std::vector<long>{1, 1, 0, 1}, {1, 0, 2, 1}, {2, 1, 1, 1}}) {
    ZMatrix g(2, 2);
    g << entries[0], entries[1], entries[2], entries[3];
    const auto rs2 = a2().transformed(g);
    const auto p2 = transform(p, g);
    const auto f2 = f.transformed(g);
    o.expect(volume_W(rs2, p2) == volume_W(a2(), p), "Vol_W");
    o.expect(average_scalar(rs2, p2) == average_scalar(a2(), p), "a");
    o.expect(futaki_closed_form(rs2, p2, f2) == futaki_closed_form(a2(), p, f), "F1");
  }
  o.detail << "F1 = " << futaki_closed_form(a2(), p, f) << ", Vol_W = " << volume_W(a2(), p)
           << ", a = " << average_scalar(a2(), p) << " under three unimodular maps";
}

void wk_consistency(Outcome& o) {
  struct Case {
    const RootSystem* rs;
    RationalPolytope p;
    PiecewiseAffine f;
    Rational r;
  };
  const std::vector<Case> suite{{&a1(), interval(1, 2), pl({{{1}, 0}}), Rational(3)},
                                {&a1(), interval(1, 2), pl({{{0}, 0}, {{2}, -3}}), Rational(2)},
                                {&a1(), interval(1, 3), pl({{{0}, 0}, {{1}, Rational(-3, 2)}}), Rational(3)},
                                {&a2(), box(1, 2), pl({{{0, 0}, 0}, {{1, 1}, -3}}), Rational(2)}};
  int compared = 0;
  for (const auto& c : suite) {
    for (std::int64_t k = 1; k <= 12; ++k) {
      const Rational kq(static_cast<long>(k));
      bool admissible = (kq * c.r).is_integer();
      for (const auto& piece : c.f.pieces()) admissible = admissible && (kq * piece.constant).is_integer();
      if (!admissible) continue;
      o.expect(weighted_weight_wk(*c.rs, c.p, c.f, c.r, k) == wk_via_lift(*c.rs, c.p, c.f, c.r, k),
               "k=" + std::to_string(k));
      ++compared;
    }
  }
  o.detail << compared << " (case, k) pairs agree exactly";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"Futaki exactness, A1 x [1,2], f = x", futaki_exactness},
      {"Futaki with a kink, f = max(0, 2x - 3)", futaki_kink},
      {"constant f has vanishing invariant", constant_vanishing},
      {"slanted facet measure", slanted_facet_measure},
      {"facet lattice counts converge at rate 1/k", facet_limit},
      {"generalized Pick asymptotics on the unit square", generalized_pick},
      {"Weyl dimension tables and integrality", weyl_dimensions},
      {"scalar curvature identity", scalar_identity},
      {"Mabuchi value of the canonical potential", mabuchi_value},
      {"first variation matches the residual", variational_identity},
      {"GL(2, Z) equivariance", equivariance},
      {"w_k direct sum equals lifted count", wk_consistency},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failures;
    std::string detail = o.detail.str();
    while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
    std::printf("%s %2zu  %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
