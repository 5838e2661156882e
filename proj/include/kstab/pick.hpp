// pick.hpp
// Two-term asymptotics of lattice sums S_k = sum_{x in P cap Z^n / k} h(x) and
// the lattice-count limit that characterizes the boundary measure.
#pragma once

#include <string>
#include <vector>

#include "kstab/polytope.hpp"
#include "kstab/quadrature.hpp"

namespace kstab {

Rational pick_sum(const RationalPolytope& p, const QPolynomial& h, std::int64_t k);
double pick_sum(const RationalPolytope& p, const Integrand& h, std::int64_t k);

struct AsymptoticFit {
  int dim = 0;
  bool exact = false;
  std::vector<std::int64_t> k;
  /// Exact data; filled when h is a polynomial.
  std::vector<Rational> sums_exact, residuals_exact;
  Rational c_top, c_next;
  /// Floating data; always filled.
  std::vector<double> sums, residuals;
  double c_top_f = 0.0, c_next_f = 0.0;
  /// |r_k| / k^max(n-2, 0).
  std::vector<double> normalized;
  /// (k, log2 |r_k / r_2k|) for every pair (k, 2k) in the sample set.
  std::vector<std::pair<std::int64_t, double>> decay;
  /// (k, C_2k / C_k) for the same pairs.
  std::vector<std::pair<std::int64_t, double>> ratios;
  bool pass = false;
  std::string message;
};

/// Coefficients fixed to the exact integrals int h and 1/2 int_{dP} h d sigma.
AsymptoticFit pick_fit(const RationalPolytope& p, const QPolynomial& h, const std::vector<std::int64_t>& ks);

/// Least-squares fit of the leading coefficients on the largest half of the samples
/// (three terms when there are at least three samples, so the next order does
/// not leak into c_{n-1}).
AsymptoticFit pick_fit(const RationalPolytope& p, const Integrand& h, const std::vector<std::int64_t>& ks);

/// Default doubling sample set {4, 8, 16, 32, 64}.
std::vector<std::int64_t> default_pick_samples();

struct FacetLimit {
  int facet = 0;
  Rational measure;
  std::vector<std::int64_t> k;
  std::vector<std::int64_t> count;
  /// |count / k^{n-1} - measure|.
  std::vector<double> error;
  /// error(2k) / error(k) for consecutive doublings.
  std::vector<double> ratio;
};

/// Facet counts at the given k (expected to be consecutive doublings).
std::vector<FacetLimit> facet_limits(const RationalPolytope& p, const std::vector<std::int64_t>& ks);

/// True when every ratio lies in [lo, hi]; a facet whose errors are all zero passes.
bool facet_limits_halve(const std::vector<FacetLimit>& limits, double lo = 0.25, double hi = 0.75);

}  // namespace kstab
