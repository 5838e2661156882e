#include "kstab/linalg.hpp"

#include <cstdlib>
#include <stdexcept>

namespace kstab {

std::int64_t integer_determinant(const ZMatrix& a) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  if (n == 0) return 1;
  std::vector<Integer> m(static_cast<std::size_t>(n * n));
  auto at = [&](Eigen::Index i, Eigen::Index j) -> Integer& { return m[static_cast<std::size_t>(i * n + j)]; };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) at(i, j) = static_cast<long>(a(i, j));
  int sign = 1;
  Integer prev = 1;
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    if (at(k, k) == 0) {
      Eigen::Index sel = -1;
      for (Eigen::Index r = k + 1; r < n; ++r) {
        if (at(r, k) != 0) {
          sel = r;
          break;
        }
      }
      if (sel < 0) return 0;
      for (Eigen::Index c = 0; c < n; ++c) std::swap(at(k, c), at(sel, c));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        Integer num = at(i, j) * at(k, k) - at(i, k) * at(k, j);
        mpz_divexact(at(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = at(k, k);
  }
  return sign * to_int64(at(n - 1, n - 1));
}

ZVector primitive_integer_vector(const QVector& v) {
  Integer den = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) den = lcm(den, v(i).den());
  Integer g = 0;
  std::vector<Integer> scaled(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    scaled[static_cast<std::size_t>(i)] = v(i).num() * (den / v(i).den());
    g = gcd(g, scaled[static_cast<std::size_t>(i)]);
  }
  ZVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const Integer& s = scaled[static_cast<std::size_t>(i)];
    out(i) = g == 0 ? 0 : to_int64(Integer(s / g));
  }
  return out;
}

ZMatrix complete_to_unimodular(const ZVector& v) {
  const Eigen::Index n = v.size();
  ZVector w = v;
  // inv tracks W^{-1} for the accumulated row operations W with W v = w.
  ZMatrix inv = ZMatrix::Identity(n, n);
  while (true) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w(i) != 0 && (piv < 0 || std::llabs(w(i)) < std::llabs(w(piv)))) piv = i;
    }
    if (piv < 0) throw std::invalid_argument("cannot complete the zero vector");
    bool done = true;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == piv || w(j) == 0) continue;
      const std::int64_t q = w(j) / w(piv);
      w(j) -= q * w(piv);
      inv.col(piv) += q * inv.col(j);
      if (w(j) != 0) done = false;
    }
    if (done) {
      if (std::llabs(w(piv)) != 1) throw std::invalid_argument("vector is not primitive");
      if (piv != 0) {
        std::swap(w(0), w(piv));
        inv.col(0).swap(inv.col(piv));
      }
      if (w(0) < 0) {
        w(0) = -w(0);
        inv.col(0) = -inv.col(0);
      }
      break;
    }
  }
  ZMatrix u(n, n);
  for (Eigen::Index r = 0; r + 1 < n; ++r) u.row(r) = inv.col(r + 1).transpose();
  u.row(n - 1) = inv.col(0).transpose();
  return u;
}

}  // namespace kstab
