#include <gtest/gtest.h>

#include <random>

#include "kstab/linalg.hpp"

using namespace kstab;

namespace {

QMatrix random_matrix(std::mt19937& rng, int rows, int cols) {
  std::uniform_int_distribution<int> d(-4, 4);
  QMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Rational(d(rng), 1 + std::abs(d(rng)));
  return m;
}

}  // namespace

TEST(Linalg, DeterminantMatchesCofactorExpansion) {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const QMatrix m = random_matrix(rng, 3, 3);
    const Rational cofactor = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                              m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                              m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    EXPECT_EQ(exact_determinant(m), cofactor);
  }
}

TEST(Linalg, InverseAndSolve) {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const QMatrix m = random_matrix(rng, 4, 4);
    const auto inv = exact_inverse(m);
    if (exact_determinant(m) == Rational(0)) {
      EXPECT_FALSE(inv.has_value());
      continue;
    }
    ASSERT_TRUE(inv.has_value());
    EXPECT_EQ(QMatrix(m * *inv), QMatrix(QMatrix::Identity(4, 4)));
    const QVector b = random_matrix(rng, 4, 1).col(0);
    const auto x = exact_solve(m, b);
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ(QVector(m * *x), b);
  }
}

TEST(Linalg, NullspaceAndRank) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    QMatrix m = random_matrix(rng, 3, 5);
    m.row(2) = m.row(0) + m.row(1);
    EXPECT_LE(exact_rank(m), 2);
    const QMatrix ns = exact_nullspace(m);
    EXPECT_EQ(ns.cols(), 5 - exact_rank(m));
    EXPECT_TRUE((m * ns).isZero());
  }
}

TEST(Linalg, IntegerDeterminantBareiss) {
  ZMatrix m(3, 3);
  m << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  EXPECT_EQ(integer_determinant(m), 4);
  ZMatrix s(2, 2);
  s << 1, 1, 0, 1;
  EXPECT_EQ(integer_determinant(s), 1);
}

TEST(Linalg, PrimitiveVector) {
  QVector v(3);
  v << Rational(2, 3), Rational(-4, 9), Rational(0);
  const ZVector p = primitive_integer_vector(v);
  EXPECT_EQ(p(0), 3);
  EXPECT_EQ(p(1), -2);
  EXPECT_EQ(p(2), 0);
}

TEST(Linalg, UnimodularCompletionProperty) {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    QVector v(n);
    for (int i = 0; i < n; ++i) v(i) = Rational(d(rng));
    if (v.isZero()) continue;
    const ZVector p = primitive_integer_vector(v);
    const ZMatrix u = complete_to_unimodular(p);
    EXPECT_EQ(std::llabs(integer_determinant(u)), 1);
    EXPECT_EQ(ZVector(u.row(n - 1).transpose()), p);
  }
}
