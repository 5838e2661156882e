#include "kstab/pick.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/QR>

#include "kstab/error.hpp"
#include "kstab/lattice.hpp"

namespace kstab {

namespace {

constexpr double kRatioBound = 4.5;

void check_samples(const RationalPolytope& p, const std::vector<std::int64_t>& ks) {
  if (!p.is_integer()) throw PreconditionError("the Pick asymptotics need an integer polytope");
  if (ks.empty()) throw InputError("empty k sample set");
  for (auto k : ks)
    if (k <= 0) throw InputError("k samples must be positive");
}

double kpow(std::int64_t k, int e) { return std::pow(static_cast<double>(k), e); }

// Normalized residuals, doubling-pair diagnostics and the pass decision.
void finish(AsymptoticFit& fit) {
  const int shift = std::max(fit.dim - 2, 0);
  std::map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < fit.k.size(); ++i) {
    fit.normalized.push_back(std::abs(fit.residuals[i]) / kpow(fit.k[i], shift));
    index[fit.k[i]] = i;
  }
  // Rounding floor for callback data; exact data compares against zero.
  const double floor = fit.exact ? 0.0 : 1e-9;
  bool ok = true;
  std::string failures;
  for (const auto& [k, i] : index) {
    auto it = index.find(2 * k);
    if (it == index.end()) continue;
    const double r0 = std::abs(fit.residuals[i]), r1 = std::abs(fit.residuals[it->second]);
    const double c0 = fit.normalized[i], c1 = fit.normalized[it->second];
    fit.decay.emplace_back(k, (r0 <= floor || r1 <= floor) ? 0.0 : std::log2(r0 / r1));
    double ratio = 0.0;
    if (c0 <= floor && c1 <= floor) {
      ratio = 1.0;
    } else if (c0 <= floor) {
      ratio = std::numeric_limits<double>::infinity();
    } else {
      ratio = c1 / c0;
    }
    fit.ratios.emplace_back(k, ratio);
    if (!(ratio <= kRatioBound)) {
      ok = false;
      failures += " k=" + std::to_string(k);
    }
  }
  if (fit.ratios.empty()) {
    fit.pass = false;
    fit.message = "inconclusive: the sample set contains no pair (k, 2k)";
  } else if (!ok) {
    fit.pass = false;
    fit.message = "normalized residual grows by more than 4.5x under doubling at" + failures;
  } else {
    fit.pass = true;
    fit.message = "residual is O(k^" + std::to_string(fit.dim - 2) + ")";
  }
}

}  // namespace

Rational pick_sum(const RationalPolytope& p, const QPolynomial& h, std::int64_t k) {
  if (h.nvars() != p.dim()) throw InputError("integrand arity does not match polytope dimension");
  const Rational kq(static_cast<long>(k));
  return lattice_sum<Rational>(p, k, [&](const ZVector& l) {
    const QVector x = to_rational(l) / kq;
    return h.eval<Rational>(x);
  });
}

double pick_sum(const RationalPolytope& p, const Integrand& h, std::int64_t k) {
  std::vector<double> values;
  const double kd = static_cast<double>(k);
  for_each_lattice_point(p, k, [&](const ZVector& l) { values.push_back(h(l.cast<double>() / kd)); });
  return pairwise_sum(values);
}

AsymptoticFit pick_fit(const RationalPolytope& p, const QPolynomial& h, const std::vector<std::int64_t>& ks) {
  check_samples(p, ks);
  AsymptoticFit fit;
  fit.dim = p.dim();
  fit.exact = true;
  fit.c_top = integral_polytope(h, p);
  fit.c_next = Rational(1, 2) * boundary_integral(h, p);
  fit.c_top_f = fit.c_top.to_double();
  fit.c_next_f = fit.c_next.to_double();
  const unsigned n = static_cast<unsigned>(fit.dim);
  for (auto k : ks) {
    const Rational kq(static_cast<long>(k));
    const Rational s = pick_sum(p, h, k);
    const Rational r = s - fit.c_top * pow(kq, n) - fit.c_next * pow(kq, n - 1);
    fit.k.push_back(k);
    fit.sums_exact.push_back(s);
    fit.residuals_exact.push_back(r);
    fit.sums.push_back(s.to_double());
    fit.residuals.push_back(r.to_double());
  }
  finish(fit);
  return fit;
}

AsymptoticFit pick_fit(const RationalPolytope& p, const Integrand& h, const std::vector<std::int64_t>& ks) {
  check_samples(p, ks);
  AsymptoticFit fit;
  fit.dim = p.dim();
  for (auto k : ks) {
    fit.k.push_back(k);
    fit.sums.push_back(pick_sum(p, h, k));
  }
  std::vector<std::size_t> order(ks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ks[a] > ks[b]; });
  if (order.size() < 2) throw InputError("a float fit needs at least two k samples");
  // S_k / k^n = c_n + c_{n-1} / k + c_{n-2} / k^2 + ...; the third column soaks
  // up the next order so that it does not bias c_{n-1}.
  const Eigen::Index cols = order.size() >= 3 ? 3 : 2;
  const std::size_t used = std::max<std::size_t>(static_cast<std::size_t>(cols), (order.size() + 1) / 2);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(used), cols);
  Eigen::VectorXd b(static_cast<Eigen::Index>(used));
  for (std::size_t r = 0; r < used; ++r) {
    const auto i = order[r];
    const double inv = 1.0 / static_cast<double>(ks[i]);
    for (Eigen::Index j = 0; j < cols; ++j) a(static_cast<Eigen::Index>(r), j) = std::pow(inv, static_cast<double>(j));
    b(static_cast<Eigen::Index>(r)) = fit.sums[i] / kpow(ks[i], fit.dim);
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  fit.c_top_f = c(0);
  fit.c_next_f = c(1);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    fit.residuals.push_back(fit.sums[i] - c(0) * kpow(ks[i], fit.dim) - c(1) * kpow(ks[i], fit.dim - 1));
  }
  finish(fit);
  return fit;
}

std::vector<std::int64_t> default_pick_samples() { return {4, 8, 16, 32, 64}; }

std::vector<FacetLimit> facet_limits(const RationalPolytope& p, const std::vector<std::int64_t>& ks) {
  std::vector<FacetLimit> out;
  for (std::size_t f = 0; f < p.facets().size(); ++f) {
    FacetLimit lim;
    lim.facet = static_cast<int>(f);
    lim.measure = facet_measure(p, lim.facet);
    const double m = lim.measure.to_double();
    for (auto k : ks) {
      const auto c = facet_lattice_count(p, lim.facet, k);
      lim.k.push_back(k);
      lim.count.push_back(c);
      lim.error.push_back(std::abs(static_cast<double>(c) / kpow(k, p.dim() - 1) - m));
    }
    for (std::size_t i = 0; i + 1 < lim.error.size(); ++i) {
      lim.ratio.push_back(lim.error[i] == 0.0 ? (lim.error[i + 1] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                              : lim.error[i + 1] / lim.error[i]);
    }
    out.push_back(std::move(lim));
  }
  return out;
}

bool facet_limits_halve(const std::vector<FacetLimit>& limits, double lo, double hi) {
  for (const auto& lim : limits) {
    const bool all_zero = std::all_of(lim.error.begin(), lim.error.end(), [](double e) { return e == 0.0; });
    if (all_zero) continue;
    for (double r : lim.ratio)
      if (!(r >= lo && r <= hi)) return false;
  }
  return true;
}

}  // namespace kstab
