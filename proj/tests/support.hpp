// Small builders shared by the unit tests.
#pragma once

#include <initializer_list>
#include <random>
#include <vector>

#include "kstab/polytope.hpp"

namespace kstab::testing {

inline QVector qv(std::initializer_list<Rational> xs) {
  QVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const auto& x : xs) v(i++) = x;
  return v;
}

inline RationalPolytope polytope(std::initializer_list<std::initializer_list<Rational>> vs) {
  std::vector<QVector> pts;
  for (const auto& v : vs) pts.push_back(qv(v));
  return RationalPolytope::from_vertices(pts);
}

inline RationalPolytope interval(const Rational& a, const Rational& b) { return polytope({{a}, {b}}); }

inline RationalPolytope box(const Rational& lo, const Rational& hi) {
  return polytope({{lo, lo}, {hi, lo}, {lo, hi}, {hi, hi}});
}

/// conv{0, p_1 e_1, ..., p_n e_n}.
inline RationalPolytope corner_simplex(const std::vector<long>& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  std::vector<QVector> pts{QVector::Zero(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    QVector v = QVector::Zero(n);
    v(i) = Rational(p[static_cast<std::size_t>(i)]);
    pts.push_back(v);
  }
  return RationalPolytope::from_vertices(pts);
}

inline PiecewiseAffine pl(std::initializer_list<std::pair<std::initializer_list<Rational>, Rational>> pieces) {
  std::vector<AffinePiece> out;
  for (const auto& [a, b] : pieces) out.push_back({qv(a), b});
  return PiecewiseAffine(out);
}

inline QPolynomial var(int n, int i) { return QPolynomial::variable(n, i); }
inline QPolynomial cst(int n, const Rational& c) { return QPolynomial::constant(n, c); }

}  // namespace kstab::testing
