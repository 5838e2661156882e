#include "kstab/lattice.hpp"

#include <atomic>

#include "kstab/error.hpp"

namespace kstab {

namespace {

std::atomic<int> g_threads{1};

struct IntegerConstraint {
  std::vector<std::int64_t> coeffs;  // den * normal
  std::int64_t rhs;                  // k * num
};

struct Enumerator {
  int n = 0;
  std::vector<IntegerConstraint> cons;
  std::vector<std::int64_t> lo, hi;

  Enumerator(const RationalPolytope& p, std::int64_t k) : n(p.dim()) {
    for (const auto& f : p.facets()) {
      IntegerConstraint c;
      const std::int64_t den = to_int64(f.offset.den());
      for (Eigen::Index i = 0; i < f.normal.size(); ++i) c.coeffs.push_back(den * f.normal(i));
      c.rhs = to_int64(Integer(f.offset.num() * static_cast<long>(k)));
      cons.push_back(std::move(c));
    }
    for (int i = 0; i < n; ++i) {
      lo.push_back(to_int64(ceil(p.min_coordinate(i) * Rational(static_cast<long>(k)))));
      hi.push_back(to_int64(floor(p.max_coordinate(i) * Rational(static_cast<long>(k)))));
    }
  }

  static std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  }
  static std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

  // Fills coordinate `level` onwards, given partial sums of fixed coordinates.
  void recurse(int level, ZVector& lambda, std::vector<std::int64_t>& partial,
               const std::function<void(const ZVector&)>& fn) const {
    if (level == n - 1) {
      std::int64_t a = lo[static_cast<std::size_t>(level)], b = hi[static_cast<std::size_t>(level)];
      for (std::size_t c = 0; c < cons.size() && a <= b; ++c) {
        const std::int64_t coeff = cons[c].coeffs[static_cast<std::size_t>(level)];
        const std::int64_t need = cons[c].rhs - partial[c];
        if (coeff > 0) {
          a = std::max(a, ceil_div(need, coeff));
        } else if (coeff < 0) {
          b = std::min(b, floor_div(need, coeff));
        } else if (need > 0) {
          return;
        }
      }
      for (std::int64_t v = a; v <= b; ++v) {
        lambda(level) = v;
        fn(lambda);
      }
      return;
    }
    for (std::int64_t v = lo[static_cast<std::size_t>(level)]; v <= hi[static_cast<std::size_t>(level)]; ++v) {
      lambda(level) = v;
      for (std::size_t c = 0; c < cons.size(); ++c) partial[c] += cons[c].coeffs[static_cast<std::size_t>(level)] * v;
      recurse(level + 1, lambda, partial, fn);
      for (std::size_t c = 0; c < cons.size(); ++c) partial[c] -= cons[c].coeffs[static_cast<std::size_t>(level)] * v;
    }
  }
};

}  // namespace

void set_thread_count(int n) { g_threads = std::max(1, n); }
int thread_count() { return g_threads; }

std::vector<std::int64_t> lattice_slabs(const RationalPolytope& p, std::int64_t k) {
  if (k < 1) throw PreconditionError("dilation factor must be positive");
  if (p.dim() <= 1) return {0};
  const std::int64_t lo = to_int64(ceil(p.min_coordinate(0) * Rational(static_cast<long>(k))));
  const std::int64_t hi = to_int64(floor(p.max_coordinate(0) * Rational(static_cast<long>(k))));
  std::vector<std::int64_t> out;
  for (std::int64_t v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

void for_each_lattice_point_in_slab(const RationalPolytope& p, std::int64_t k, std::int64_t slab,
                                    const std::function<void(const ZVector&)>& fn) {
  if (k < 1) throw PreconditionError("dilation factor must be positive");
  if (p.dim() == 0) {
    fn(ZVector(0));
    return;
  }
  const Enumerator e(p, k);
  ZVector lambda(p.dim());
  std::vector<std::int64_t> partial(e.cons.size(), 0);
  if (p.dim() == 1) {
    e.recurse(0, lambda, partial, fn);
    return;
  }
  lambda(0) = slab;
  for (std::size_t c = 0; c < e.cons.size(); ++c) partial[c] += e.cons[c].coeffs[0] * slab;
  e.recurse(1, lambda, partial, fn);
}

void for_each_lattice_point(const RationalPolytope& p, std::int64_t k, const std::function<void(const ZVector&)>& fn) {
  for (auto slab : lattice_slabs(p, k)) for_each_lattice_point_in_slab(p, k, slab, fn);
}

std::vector<ZVector> dilate_lattice_points(const RationalPolytope& p, std::int64_t k) {
  std::vector<ZVector> out;
  for_each_lattice_point(p, k, [&](const ZVector& l) { out.push_back(l); });
  return out;
}

std::vector<QVector> lattice_points(const RationalPolytope& p, std::int64_t k) {
  std::vector<QVector> out;
  const Rational inv = Rational(1) / Rational(static_cast<long>(k));
  for_each_lattice_point(p, k, [&](const ZVector& l) { out.push_back(to_rational(l) * inv); });
  return out;
}

std::int64_t facet_lattice_count(const RationalPolytope& p, int facet, std::int64_t k) {
  if (k < 1) throw PreconditionError("dilation factor must be positive");
  const Facet& f = p.facets().at(static_cast<std::size_t>(facet));
  // The hyperplane normal . lambda = k c contains lattice points only if k c is integral.
  if (!(f.offset * Rational(static_cast<long>(k))).is_integer()) return 0;
  const FacetChart chart = facet_chart(p, facet);
  std::int64_t count = 0;
  for_each_lattice_point(chart.image, k, [&](const ZVector&) { ++count; });
  return count;
}

}  // namespace kstab
