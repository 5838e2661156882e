// mabuchi.hpp
// Symplectic potentials u = u_sigma + g (+ compactly supported bumps), the
// weighted scalar curvature, the Mabuchi functional F_A and a finite-difference
// check of its first variation.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kstab/polytope.hpp"
#include "kstab/quadrature.hpp"
#include "kstab/rootsystem.hpp"

namespace kstab {

/// poly on the closed box [lower, upper], zero elsewhere. The box must lie in
/// the interior of P and poly must vanish to second order on the box boundary.
struct Bump {
  QVector lower, upper;
  QPolynomial poly;
};

/// prod_i (x_i - lower_i)^2 (upper_i - x_i)^2.
Bump standard_bump(const QVector& lower, const QVector& upper);

class SymplecticPotential {
 public:
  /// u = [canonical] 1/2 sum_F l_F log l_F + g.
  explicit SymplecticPotential(RationalPolytope p, QPolynomial g = {}, bool canonical = true);

  SymplecticPotential with_bump(const Bump& b, double scale) const;
  SymplecticPotential plus(const QPolynomial& g) const;

  const RationalPolytope& polytope() const { return p_; }
  const QPolynomial& perturbation() const { return g_; }
  bool canonical() const { return canonical_; }
  int dim() const { return p_.dim(); }

  /// Defined on the closed polytope (l log l is continued by 0).
  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;
  /// Throws PreconditionError when the Hessian is not positive definite.
  Eigen::MatrixXd hessian_inverse(const Eigen::VectorXd& x) const;
  double log_det_hessian(const Eigen::VectorXd& x) const;

  struct InverseHessian {
    Eigen::MatrixXd u;
    /// Entry k is d_k U; entry j * n + k is d_j d_k U.
    std::vector<Eigen::MatrixXd> du, ddu;
  };
  /// U = H^{-1} and its first two derivatives, accurate up to the boundary.
  InverseHessian inverse_hessian_derivatives(const Eigen::VectorXd& x) const;
  /// Entry k is d_k of the Hessian.
  std::vector<Eigen::MatrixXd> hessian_derivatives(const Eigen::VectorXd& x) const;
  /// Entry j * n + k is d_j d_k of the Hessian.
  std::vector<Eigen::MatrixXd> hessian_second_derivatives(const Eigen::VectorXd& x) const;

  /// Probes positive definiteness on an interior grid.
  void validate(int per_axis = 9) const;

 private:
  struct Derivatives {
    DPolynomial f;
    std::vector<DPolynomial> d1, d2, d3, d4;
  };
  struct ScaledBump {
    Eigen::VectorXd lower, upper;
    Derivatives d;
    double scale;
  };

  struct Stable {
    Eigen::MatrixXd u;
    std::vector<Eigen::MatrixXd> du, ddu;
    double log_det = 0.0;
  };

  static Derivatives derivatives_of(const QPolynomial& q);
  std::optional<Stable> stable_form(const Eigen::VectorXd& x, bool with_jets) const;
  template <int N>
  std::optional<Stable> stable_form_n(const Eigen::VectorXd& x) const;
  void require_interior(const Eigen::VectorXd& x) const;
  template <typename Fn>
  void each_active(const Eigen::VectorXd& x, Fn&& fn) const;

  RationalPolytope p_;
  QPolynomial g_;
  bool canonical_ = true;
  Derivatives gd_;
  std::vector<ScaledBump> bumps_;
  std::vector<Eigen::VectorXd> normals_;
  std::vector<double> offsets_;
  std::vector<double> shifts_;
};

/// The weight W = p with its first and second derivatives and f_G, prepared once.
struct WeightField {
  DPolynomial p;
  std::vector<DPolynomial> dp, ddp;
  RationalFunction f_G;

  explicit WeightField(const RootSystem& rs);
  double value(const Eigen::VectorXd& x) const;
};

/// W^{-1} sum_{jk} d_j d_k (W u^{jk}).
double weighted_divergence(const WeightField& w, const SymplecticPotential& u, const Eigen::VectorXd& x);

/// S = -divergence_factor W^{-1} (W u^{jk})_{jk} + f_G.
double scalar_curvature(const WeightField& w, const SymplecticPotential& u, const Eigen::VectorXd& x,
                        const Conventions& conv = {});
double scalar_curvature(const RootSystem& rs, const SymplecticPotential& u, const Eigen::VectorXd& x,
                        const Conventions& conv = {});

enum class APreset { Paper, Csc, Zero };
APreset parse_a_preset(const std::string& name);
std::string to_string(APreset a);

/// Paper: (a - f_G) / 2, Csc: 2 (a - f_G), Zero: 0.
Integrand make_A(const RootSystem& rs, const RationalPolytope& p, APreset preset);

/// r = -W^{-1} (W u^{jk})_{jk} - A.
double el_residual(const WeightField& w, const SymplecticPotential& u, const Integrand& a, const Eigen::VectorXd& x);

/// Cell-centred sample points of the bounding box that lie in the interior of P.
std::vector<Eigen::VectorXd> interior_grid(const RationalPolytope& p, int per_axis);

struct MabuchiResult {
  double value = 0.0;
  /// Quadrature error estimate of the interior integral.
  double error = 0.0;
  bool within_tolerance = true;
  double log_det_term = 0.0;
  double boundary_term = 0.0;
  double linear_term = 0.0;
};

/// F_A(u) = -int log det(u_jk) W + 2 int_{dP} u W d sigma - int u A W.
MabuchiResult mabuchi_eval(const RootSystem& rs, const SymplecticPotential& u, const Integrand& a,
                           const GradedQuadratureSpec& spec = {});

/// L_A(g) = 2 int_{dP} g W d sigma - int A g W for a polynomial g.
double linear_functional(const RootSystem& rs, const RationalPolytope& p, const Integrand& a, const QPolynomial& g,
                         const GradedQuadratureSpec& spec = {});

struct VariationReport {
  /// (F_A(u + eps du) - F_A(u - eps du)) / (2 eps).
  double finite_difference = 0.0;
  /// int r du W.
  double predicted = 0.0;
  double relative_discrepancy = 0.0;
  /// The same finite difference for 2 du, and |fd(2 du) / (2 fd(du)) - 1|.
  double finite_difference_doubled = 0.0;
  double doubling_discrepancy = 0.0;
  std::string advisory;
};

/// Only the bump support contributes to the difference, so every integral is
/// taken over the bump box.
VariationReport variation_check(const RootSystem& rs, const SymplecticPotential& u, const Integrand& a,
                                const Bump& bump, double eps, const GradedQuadratureSpec& spec = {});

}  // namespace kstab
