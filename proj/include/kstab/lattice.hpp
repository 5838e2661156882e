// lattice.hpp
// Enumeration of lattice points of dilated rational polytopes.
#pragma once

#include <cstdint>
#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

#include "kstab/polytope.hpp"

namespace kstab {

/// Caps the worker count used by slab-parallel lattice sums (default 1).
void set_thread_count(int n);
int thread_count();

/// Integer points of kP in lexicographic order. The callback receives lambda in
/// Z^n; the corresponding point of P is lambda / k.
void for_each_lattice_point(const RationalPolytope& p, std::int64_t k, const std::function<void(const ZVector&)>& fn);

/// Slabs of kP: values of the first coordinate (a single dummy slab when dim <= 1).
std::vector<std::int64_t> lattice_slabs(const RationalPolytope& p, std::int64_t k);
void for_each_lattice_point_in_slab(const RationalPolytope& p, std::int64_t k, std::int64_t slab,
                                    const std::function<void(const ZVector&)>& fn);

/// Sums fn over the integer points of kP. Slabs are summed independently and
/// merged in slab order, so the result does not depend on the thread count.
template <typename T, typename Fn>
T lattice_sum(const RationalPolytope& p, std::int64_t k, Fn&& fn) {
  const auto slabs = lattice_slabs(p, k);
  std::vector<T> partial(slabs.size(), T(0));
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t s = begin; s < slabs.size(); s += step) {
      T acc(0);
      for_each_lattice_point_in_slab(p, k, slabs[s], [&](const ZVector& lambda) { acc += fn(lambda); });
      partial[s] = acc;
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
  if (workers == 1 || slabs.size() < 2) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  T total(0);
  for (const auto& v : partial) total += v;
  return total;
}

std::vector<ZVector> dilate_lattice_points(const RationalPolytope& p, std::int64_t k);

/// Points of P intersected with (1/k) Z^n, lexicographic.
std::vector<QVector> lattice_points(const RationalPolytope& p, std::int64_t k);

/// Number of points of F intersected with (1/k) Z^n, via the unimodular facet chart.
std::int64_t facet_lattice_count(const RationalPolytope& p, int facet, std::int64_t k);

}  // namespace kstab
