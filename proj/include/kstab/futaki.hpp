// futaki.hpp
// Donaldson-Futaki invariant of the test configuration attached to a convex
// rational PL function, computed twice: in closed form by exact integration,
// and from weighted lattice-point sums d_k, w_k by exact interpolation.
#pragma once

#include <optional>
#include <vector>

#include "kstab/polytope.hpp"
#include "kstab/rootsystem.hpp"

namespace kstab {

/// Throws PreconditionError naming a vertex where some M^alpha . v <= 0.
void check_positive_chamber(const RootSystem& rs, const RationalPolytope& p);

/// Vol_W(P) = int_P p d mu.
Rational volume_W(const RootSystem& rs, const RationalPolytope& p);

/// a = 2 (int_P q_{N-1} d mu + 1/2 int_{dP} q_N d sigma) / int_P q_N d mu.
Rational average_scalar(const RootSystem& rs, const RationalPolytope& p);

/// F_1 = -(1 / 2 Vol_W) (int f f_G W + int_{dP} f W d sigma - a int f W).
Rational futaki_closed_form(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f,
                            const Conventions& conv = {});

/// q(lambda) for an integer weight (no division by denom).
Integer weyl_value(const RootSystem& rs, const ZVector& lambda);

/// d_k = sum over kP of q(lambda) / denom.
Rational weighted_count_dk(const RootSystem& rs, const RationalPolytope& p, std::int64_t k);

/// w_k = sum over kP of q(lambda) k (R - f(lambda / k)) / denom. Defined for every
/// k >= 1; it is a polynomial in k along multiples of sampling_step(p, f, R).
Rational weighted_weight_wk(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f,
                            const Rational& r, std::int64_t k);

/// The same w_k counted on the lifted polytope: sum over kQ of q(pi(mu)) / denom
/// minus d_k, pi dropping the last coordinate. Requires integral gradients and
/// integral k R, k b_i.
Rational wk_via_lift(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f, const Rational& r,
                     std::int64_t k);

/// Smallest m such that kP, the linearity cells of f and kQ are lattice
/// polytopes for every multiple k of m (also clears the denominators of f and R).
std::int64_t sampling_step(const RationalPolytope& p, const PiecewiseAffine& f, const Rational& r);

struct EhrhartFit {
  std::int64_t step = 1;
  std::vector<std::int64_t> k;
  std::vector<Rational> d, w;
  /// Coefficients in k, ascending powers; d has degree N+n, w degree N+n+1.
  std::vector<Rational> d_poly, w_poly;
  /// Number of samples beyond those used for interpolation, all reproduced exactly.
  int verified_samples = 0;
  /// Leading coefficients rescaled by denom so that they equal the integrals.
  Rational A, B, C, D;
  Rational F0, F1;
};

/// Interpolates d(k), w(k) on the given samples (multiples of the sampling
/// step, at least N+n+3 of them). Throws CheckFailure when a verification
/// sample is not reproduced.
EhrhartFit ehrhart_fit(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f, const Rational& r,
                       const std::vector<std::int64_t>& samples);

/// Samples {m, 2m, ..., (N+n+4)m}, or all multiples of m up to kmax when that is larger.
std::vector<std::int64_t> default_samples(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f,
                                          const Rational& r, std::int64_t kmax = 0);

/// Smallest integer R with f <= R - 1 on P.
Rational default_R(const RationalPolytope& p, const PiecewiseAffine& f);

struct FutakiReport {
  Rational vol_W;
  Rational a;
  Rational F1_closed;
  std::optional<Rational> F1_oracle;
  std::optional<EhrhartFit> fit;
  /// Fit repeated at R + 1: F1 must not move, F0 must shift by exactly 1.
  std::optional<EhrhartFit> fit_shifted;
  bool r_independent = true;
  bool agreement = true;
  Rational R;
};

FutakiReport futaki_report(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f,
                           const Conventions& conv = {});

FutakiReport futaki_cross_check(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f,
                                const Rational& r, std::int64_t kmax = 0, const Conventions& conv = {});

/// Exact interpolation of values at the nodes t by a polynomial of the given
/// degree in t; returns ascending coefficients, checking every extra sample.
std::vector<Rational> interpolate_exact(const std::vector<Rational>& t, const std::vector<Rational>& values,
                                        int degree, int* verified = nullptr);

}  // namespace kstab
