// rootsystem.hpp
// Lie-theoretic input data: positive coroots written in the basis of simple
// coroots, the Weyl dimension polynomial and the Duistermaat-Heckman weight.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kstab/polynomial.hpp"
#include "kstab/rational.hpp"

namespace kstab {

enum class Series { A, B, C, D, G2, F4 };

Series parse_series(std::string_view name);
std::string to_string(Series s);

/// Factor conventions that the formulas depend on. Defaults are the only
/// internally consistent choices; they are reported verbatim by the CLI.
/// The constant C in W = C p is fixed to 1 everywhere (it cancels).
struct Conventions {
  /// q_{N-1} = qnm1_factor * p * f_G.
  Rational qnm1_factor = Rational(1, 2);
  /// S = -divergence_factor * W^{-1} (W u^{jk})_{jk} + f_G.
  Rational divergence_factor = Rational(1, 2);
};

/// Positive coroots M^alpha (integer vectors of length rank) together with the
/// shift vector rho, so that the dimension polynomial is
///   q(lambda) = prod_alpha M^alpha . (lambda + rho).
/// For a genuine root system rho = (1, ..., 1) and M^alpha . rho = |M^alpha|.
/// After a GL(n, Z) change of coordinates both M and rho move, which keeps
/// every derived quantity equivariant.
class RootSystem {
 public:
  static RootSystem classical(Series series, int rank);
  static RootSystem from_cartan(const ZMatrix& cartan);
  /// Validates the invariants of a genuine root system (nonnegative nonzero
  /// entries, simple coroots present).
  static RootSystem from_coroots(int rank, std::vector<ZVector> coroots);

  /// Image under x -> g x: M -> g^{-T} M, rho -> g rho. Requires det g = +-1.
  RootSystem transformed(const ZMatrix& g) const;

  int rank() const { return rank_; }
  int num_positive() const { return static_cast<int>(coroots_.size()); }
  const std::vector<ZVector>& coroots() const { return coroots_; }
  const ZVector& rho() const { return rho_; }
  /// M^alpha . rho, i.e. |M^alpha| in the untransformed basis.
  std::int64_t height(int alpha) const;
  /// prod_alpha |M^alpha|.
  Integer denom() const;

 private:
  RootSystem(int rank, std::vector<ZVector> coroots, ZVector rho);

  int rank_ = 0;
  std::vector<ZVector> coroots_;
  ZVector rho_;
};

/// Cartan matrix with entries <alpha_i^vee, alpha_j> = 2(alpha_i, alpha_j)/(alpha_i, alpha_i).
ZMatrix cartan_matrix(Series series, int rank);

/// q(lambda) = prod_alpha (|M^alpha| + lambda . M^alpha).
QPolynomial weyl_polynomial(const RootSystem& rs);

struct HomogeneousParts {
  QPolynomial top;   // q_N
  QPolynomial next;  // q_{N-1}
  QPolynomial rest;  // r, degree <= N - 2
};

HomogeneousParts homogeneous_parts(const QPolynomial& q, int degree);

/// p(x) = prod_alpha M^alpha . x, the Duistermaat-Heckman weight (W with C = 1).
QPolynomial dh_weight(const RootSystem& rs);

struct RationalFunction {
  QPolynomial numerator;
  QPolynomial denominator;

  double eval(const Eigen::VectorXd& x) const;
};

/// f_G = 2 d_rho log p = (2 d_rho p) / p.
RationalFunction f_G_fraction(const RootSystem& rs);

/// Weyl dimension q(lambda)/denom for a dominant integral weight.
Rational dimension(const RootSystem& rs, const std::vector<long>& lambda);

}  // namespace kstab
