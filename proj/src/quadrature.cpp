#include "kstab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "kstab/error.hpp"
#include "kstab/linalg.hpp"

namespace kstab {

namespace {

PiecewiseAffine restrict_to_chart(const PiecewiseAffine& f, const FacetChart& chart) {
  std::vector<AffinePiece> pieces;
  for (const auto& piece : f.pieces()) {
    pieces.push_back({chart.embed_linear.transpose() * piece.gradient, piece.gradient.dot(chart.embed_offset) + piece.constant});
  }
  return PiecewiseAffine(std::move(pieces));
}

QPolynomial pull_back(const QPolynomial& h, const FacetChart& chart) {
  return h.substitute_affine(chart.embed_linear, chart.embed_offset);
}

constexpr double kFaceGuard = 1e-15;

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Rule1D graded_rule(int depth, double ratio, int count) {
  Eigen::VectorXd gx, gw;
  gauss_legendre(count, gx, gw);
  std::vector<double> breaks{0.0};
  for (int j = depth; j >= 1; --j) breaks.push_back(0.5 * std::pow(ratio, j));
  breaks.push_back(0.5);
  for (int j = 1; j <= depth; ++j) breaks.push_back(1.0 - 0.5 * std::pow(ratio, j));
  breaks.push_back(1.0);
  Rule1D r;
  for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
    const double a = breaks[c], h = breaks[c + 1] - breaks[c];
    for (Eigen::Index i = 0; i < gx.size(); ++i) {
      r.nodes.push_back(a + h * gx(i));
      r.weights.push_back(h * gw(i));
    }
  }
  return r;
}

double integrate_simplex_graded(const Integrand& fn, const Simplex& s, const Rule1D& rule) {
  const auto n = static_cast<Eigen::Index>(s.size()) - 1;
  const Eigen::VectorXd v0 = to_double(s[0]);
  if (n == 0) return fn(v0);
  Eigen::MatrixXd edges(v0.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) edges.col(i) = to_double(s[static_cast<std::size_t>(i + 1)]) - v0;
  const double scale = std::abs(edges.determinant());
  const auto m = rule.nodes.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(std::pow(static_cast<double>(m), static_cast<double>(n))));
  Eigen::VectorXd bary(n), x(v0.size());
  while (true) {
    // Collapsed coordinates: bary_i = t_i prod_{j<i} (1 - t_j); the Jacobian
    // prod_j (1 - t_j)^{n-1-j} is the product of `remaining` over the axes.
    double weight = scale, remaining = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = rule.nodes[idx[static_cast<std::size_t>(i)]];
      bary(i) = remaining * t;
      weight *= rule.weights[idx[static_cast<std::size_t>(i)]] * remaining;
      remaining *= 1.0 - t;
    }
    // Products of collapsed coordinates can put a node within rounding distance
    // of a face; such nodes carry weights of the same tiny order and are skipped.
    const double last = 1.0 - bary.sum();
    if (std::min(bary.minCoeff(), last) > kFaceGuard) {
      x = v0 + edges * bary;
      const double fx = fn(x);
      if (!std::isfinite(fx)) throw CheckFailure("non-finite integrand value at an interior quadrature node");
      values.push_back(weight * fx);
    }
    Eigen::Index axis = n - 1;
    while (axis >= 0 && ++idx[static_cast<std::size_t>(axis)] == m) {
      idx[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return pairwise_sum(values);
}

}  // namespace

Rational integral_simplex(const QPolynomial& h, const Simplex& s) {
  const auto n = static_cast<Eigen::Index>(s.size()) - 1;
  if (n == 0) return h.eval<Rational>(s[0]);
  QMatrix edges(s[0].size(), n);
  for (Eigen::Index i = 0; i < n; ++i) edges.col(i) = s[static_cast<std::size_t>(i + 1)] - s[0];
  const Rational jac = abs(exact_determinant(edges));
  const QPolynomial pulled = h.substitute_affine(edges, s[0]);
  Rational total(0);
  for (const auto& [e, c] : pulled.terms()) total += c * standard_simplex_monomial_integral(e);
  return total * jac;
}

Rational integral_polytope(const QPolynomial& h, const RationalPolytope& p) {
  if (h.nvars() != p.dim()) throw InputError("integrand arity does not match polytope dimension");
  Rational total(0);
  for (const auto& s : triangulate(p)) total += integral_simplex(h, s);
  return total;
}

Rational facet_integral(const QPolynomial& h, const RationalPolytope& p, int facet) {
  const FacetChart chart = facet_chart(p, facet);
  return integral_polytope(pull_back(h, chart), chart.image);
}

Rational boundary_integral(const QPolynomial& h, const RationalPolytope& p) {
  if (h.nvars() != p.dim()) throw InputError("integrand arity does not match polytope dimension");
  Rational total(0);
  for (std::size_t f = 0; f < p.facets().size(); ++f) total += facet_integral(h, p, static_cast<int>(f));
  return total;
}

Rational integral_pl_poly(const PiecewiseAffine& f, const QPolynomial& h, const RationalPolytope& p) {
  if (f.dim() != p.dim() || h.nvars() != p.dim()) throw InputError("integrand arity does not match polytope dimension");
  Rational total(0);
  for (const auto& [piece, cell] : linearity_cells(p, f)) {
    const auto& a = f.pieces()[static_cast<std::size_t>(piece)];
    total += integral_polytope(QPolynomial::linear(a.gradient, a.constant) * h, cell);
  }
  return total;
}

Rational boundary_integral_pl_poly(const PiecewiseAffine& f, const QPolynomial& h, const RationalPolytope& p) {
  if (f.dim() != p.dim() || h.nvars() != p.dim()) throw InputError("integrand arity does not match polytope dimension");
  Rational total(0);
  for (std::size_t facet = 0; facet < p.facets().size(); ++facet) {
    const FacetChart chart = facet_chart(p, static_cast<int>(facet));
    total += integral_pl_poly(restrict_to_chart(f, chart), pull_back(h, chart), chart.image);
  }
  return total;
}

void GradedQuadratureSpec::validate() const {
  if (depth < 1) throw InputError("quadrature depth must be >= 1");
  if (ratio.sign() <= 0 || ratio >= Rational(1)) throw InputError("quadrature grading ratio must lie in (0, 1)");
  if (nodes < 2) throw InputError("quadrature node count must be >= 2");
}

QuadratureResult graded_integral(const Integrand& fn, const RationalPolytope& p, const GradedQuadratureSpec& spec) {
  spec.validate();
  const auto simplices = triangulate(p);
  auto at_level = [&](int depth, int nodes) {
    const Rule1D rule = graded_rule(depth, spec.ratio.to_double(), nodes);
    std::vector<double> parts;
    for (const auto& s : simplices) parts.push_back(integrate_simplex_graded(fn, s, rule));
    return pairwise_sum(parts);
  };
  QuadratureResult r;
  r.value = at_level(spec.depth, spec.nodes);
  r.error = std::abs(r.value - at_level(std::max(spec.depth - 1, 1), std::max(spec.nodes - 2, 2)));
  r.within_tolerance = r.error <= spec.tolerance;
  return r;
}

void gauss_legendre(int count, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  nodes = (eig.eigenvalues().array() + 1.0) * 0.5;
  weights = eig.eigenvectors().row(0).transpose().array().square();
}

double pairwise_sum(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  std::vector<double> level = values;
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = level[2 * i] + (2 * i + 1 < level.size() ? level[2 * i + 1] : 0.0);
    level.swap(next);
  }
  return level.front();
}

}  // namespace kstab
