// linalg.hpp
// Exact Gaussian elimination over a field scalar (Rational in practice).
// Eigen's decompositions assume floating-point pivoting heuristics, so the
// exact paths live here as free functions over Eigen dense types.
#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

#include "kstab/rational.hpp"

namespace kstab {

/// Reduced row echelon form in place. Returns the pivot columns.
template <typename Scalar>
std::vector<Eigen::Index> rref(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index sel = -1;
    for (Eigen::Index r = row; r < m.rows(); ++r) {
      if (m(r, col) != Scalar(0)) {
        sel = r;
        break;
      }
    }
    if (sel < 0) continue;
    m.row(row).swap(m.row(sel));
    const Scalar inv = Scalar(1) / m(row, col);
    for (Eigen::Index c = col; c < m.cols(); ++c) m(row, c) = m(row, c) * inv;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == Scalar(0)) continue;
      const Scalar factor = m(r, col);
      for (Eigen::Index c = col; c < m.cols(); ++c) m(r, c) = m(r, c) - factor * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <typename Derived>
Eigen::Index exact_rank(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m = a;
  return static_cast<Eigen::Index>(rref(m).size());
}

template <typename Derived>
typename Derived::Scalar exact_determinant(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m = a;
  const Eigen::Index n = m.rows();
  Scalar det(1);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index sel = -1;
    for (Eigen::Index r = col; r < n; ++r) {
      if (m(r, col) != Scalar(0)) {
        sel = r;
        break;
      }
    }
    if (sel < 0) return Scalar(0);
    if (sel != col) {
      m.row(col).swap(m.row(sel));
      det = -det;
    }
    det = det * m(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (m(r, col) == Scalar(0)) continue;
      const Scalar factor = m(r, col) / m(col, col);
      for (Eigen::Index c = col; c < n; ++c) m(r, c) = m(r, c) - factor * m(col, c);
    }
  }
  return det;
}

/// Basis of the right null space {x : a x = 0}, one column per free variable.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> exact_nullspace(
    const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m = a;
  const auto pivots = rref(m);
  std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols()), false);
  for (auto p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> basis(m.cols(), m.cols() - static_cast<Eigen::Index>(pivots.size()));
  Eigen::Index out = 0;
  for (Eigen::Index free = 0; free < m.cols(); ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    for (Eigen::Index r = 0; r < m.cols(); ++r) basis(r, out) = Scalar(0);
    basis(free, out) = Scalar(1);
    for (std::size_t i = 0; i < pivots.size(); ++i) basis(pivots[i], out) = -m(static_cast<Eigen::Index>(i), free);
    ++out;
  }
  return basis;
}

/// Solves a x = b for square nonsingular a; nullopt when a is singular.
template <typename DerivedA, typename DerivedB>
std::optional<Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, 1>> exact_solve(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Eigen::Index n = a.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> aug(n, n + 1);
  aug.leftCols(n) = a;
  aug.col(n) = b;
  const auto pivots = rref(aug);
  if (static_cast<Eigen::Index>(pivots.size()) != n || pivots.back() != n - 1) return std::nullopt;
  return Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(aug.col(n));
}

template <typename Derived>
std::optional<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>> exact_inverse(
    const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = a.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> aug(n, 2 * n);
  aug.leftCols(n) = a;
  aug.rightCols(n).setZero();
  for (Eigen::Index i = 0; i < n; ++i) aug(i, n + i) = Scalar(1);
  const auto pivots = rref(aug);
  if (static_cast<Eigen::Index>(pivots.size()) < n || pivots[static_cast<std::size_t>(n - 1)] != n - 1) return std::nullopt;
  return Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(aug.rightCols(n));
}

/// Integer determinant via the Bareiss fraction-free recurrence.
std::int64_t integer_determinant(const ZMatrix& a);

/// Smallest positive integer multiple of v that is integral, divided by the gcd
/// of its entries. Zero vectors are returned unchanged.
ZVector primitive_integer_vector(const QVector& v);

/// A unimodular matrix whose last row is the primitive vector v.
ZMatrix complete_to_unimodular(const ZVector& v);

}  // namespace kstab
