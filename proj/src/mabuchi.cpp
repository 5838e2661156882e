#include "kstab/mabuchi.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "kstab/error.hpp"
#include "kstab/futaki.hpp"

namespace kstab {

namespace {

std::string describe(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ")";
  return os.str();
}

std::size_t idx(int a) { return static_cast<std::size_t>(a); }

bool in_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

RationalPolytope box_polytope(const QVector& lo, const QVector& hi) {
  std::vector<Halfspace> hs;
  const auto n = lo.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    QVector e = QVector::Zero(n);
    e(i) = Rational(1);
    hs.push_back({e, lo(i)});
    hs.push_back({QVector(-e), -hi(i)});
  }
  return RationalPolytope::from_halfspaces(hs);
}

// Boundary integral of a double-valued function against d sigma, facet by
// facet through the unimodular charts.
double boundary_quadrature(const RationalPolytope& p, const Integrand& fn, const GradedQuadratureSpec& spec) {
  std::vector<double> parts;
  for (std::size_t f = 0; f < p.facets().size(); ++f) {
    const FacetChart chart = facet_chart(p, static_cast<int>(f));
    const Eigen::MatrixXd lin = chart.embed_linear.unaryExpr([](const Rational& r) { return r.to_double(); });
    const Eigen::VectorXd off = to_double(chart.embed_offset);
    const Integrand pulled = [&](const Eigen::VectorXd& y) { return fn(lin * y + off); };
    parts.push_back(graded_integral(pulled, chart.image, spec).value);
  }
  return pairwise_sum(parts);
}

// Second-order forward jet in N variables: value, gradient, Hessian.
template <int N>
struct Jet {
  double v = 0.0;
  std::array<double, N> g{};
  std::array<double, N * N> h{};

  static Jet constant(double c) {
    Jet j;
    j.v = c;
    return j;
  }
  double& hess(int a, int b) { return h[idx(a * N + b)]; }
  double hess(int a, int b) const { return h[idx(a * N + b)]; }
};

template <int N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) {
  a.v += b.v;
  for (int i = 0; i < N; ++i) a.g[idx(i)] += b.g[idx(i)];
  for (int i = 0; i < N * N; ++i) a.h[idx(i)] += b.h[idx(i)];
  return a;
}

template <int N>
Jet<N> operator*(double s, Jet<N> a) {
  a.v *= s;
  for (auto& x : a.g) x *= s;
  for (auto& x : a.h) x *= s;
  return a;
}

template <int N>
Jet<N> operator-(const Jet<N>& a, const Jet<N>& b) {
  return a + (-1.0) * b;
}

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r = Jet<N>::constant(a.v * b.v);
  for (int i = 0; i < N; ++i) r.g[idx(i)] = a.v * b.g[idx(i)] + b.v * a.g[idx(i)];
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      r.hess(i, j) = a.v * b.hess(i, j) + b.v * a.hess(i, j) + a.g[idx(i)] * b.g[idx(j)] + b.g[idx(i)] * a.g[idx(j)];
  return r;
}

template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
  const double inv = 1.0 / a.v;
  Jet<N> r = Jet<N>::constant(inv);
  for (int i = 0; i < N; ++i) r.g[idx(i)] = -a.g[idx(i)] * inv * inv;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      r.hess(i, j) = -a.hess(i, j) * inv * inv + 2.0 * a.g[idx(i)] * a.g[idx(j)] * inv * inv * inv;
  return r;
}

template <int N>
using JetMatrix = std::vector<std::vector<Jet<N>>>;

// Solves A X = B by Gauss-Jordan elimination with partial pivoting on the
// values. Returns false when a pivot is negligible.
template <int N>
bool jet_solve(JetMatrix<N> a, JetMatrix<N>& b) {
  const std::size_t m = a.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (const auto& e : row) scale = std::max(scale, std::abs(e.v));
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::abs(a[r][c].v) > std::abs(a[piv][c].v)) piv = r;
    if (!(std::abs(a[piv][c].v) > 1e-13 * scale)) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    const Jet<N> inv = reciprocal(a[c][c]);
    for (auto& e : a[c]) e = e * inv;
    for (auto& e : b[c]) e = e * inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c) continue;
      const Jet<N> factor = a[r][c];
      for (std::size_t k = c; k < m; ++k) a[r][k] = a[r][k] - factor * a[c][k];
      for (std::size_t k = 0; k < b[r].size(); ++k) b[r][k] = b[r][k] - factor * b[c][k];
    }
  }
  return true;
}

template <int N>
JetMatrix<N> jet_identity(std::size_t m) {
  JetMatrix<N> out(m, std::vector<Jet<N>>(m));
  for (std::size_t i = 0; i < m; ++i) out[i][i].v = 1.0;
  return out;
}

constexpr int kMaxJetDim = 4;

}  // namespace

Bump standard_bump(const QVector& lower, const QVector& upper) {
  const int n = static_cast<int>(lower.size());
  if (upper.size() != n) throw InputError("bump box corners have different dimensions");
  QPolynomial poly = QPolynomial::constant(n, Rational(1));
  for (int i = 0; i < n; ++i) {
    if (lower(i) >= upper(i)) throw InputError("bump box is empty");
    const QPolynomial x = QPolynomial::variable(n, i);
    const QPolynomial a = x - QPolynomial::constant(n, lower(i));
    const QPolynomial b = QPolynomial::constant(n, upper(i)) - x;
    poly = poly * a * a * b * b;
  }
  return {lower, upper, poly};
}

SymplecticPotential::Derivatives SymplecticPotential::derivatives_of(const QPolynomial& q) {
  Derivatives d;
  const int n = q.nvars();
  d.f = q.cast<double>();
  for (int i = 0; i < n; ++i) d.d1.push_back(d.f.derivative(i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d.d2.push_back(d.d1[idx(i)].derivative(j));
  for (int a = 0; a < n * n; ++a)
    for (int k = 0; k < n; ++k) d.d3.push_back(d.d2[idx(a)].derivative(k));
  for (int a = 0; a < n * n * n; ++a)
    for (int k = 0; k < n; ++k) d.d4.push_back(d.d3[idx(a)].derivative(k));
  return d;
}

SymplecticPotential::SymplecticPotential(RationalPolytope p, QPolynomial g, bool canonical)
    : p_(std::move(p)), g_(std::move(g)), canonical_(canonical) {
  const int n = p_.dim();
  if (n < 1) throw InputError("symplectic potential needs a polytope of dimension >= 1");
  if (g_.nvars() == 0 && g_.is_zero()) g_ = QPolynomial(n);
  if (g_.nvars() != n) throw InputError("perturbation arity does not match polytope dimension");
  gd_ = derivatives_of(g_);
  for (const auto& f : p_.facets()) {
    normals_.push_back(f.normal.cast<double>());
    offsets_.push_back(f.offset.to_double());
    double reach = 0.0;
    for (const auto& v : p_.vertices()) reach = std::max(reach, f.value(v).to_double());
    shifts_.push_back(0.25 / reach);
  }
}

SymplecticPotential SymplecticPotential::with_bump(const Bump& b, double scale) const {
  if (b.poly.nvars() != dim()) throw InputError("bump arity does not match polytope dimension");
  const RationalPolytope box = box_polytope(b.lower, b.upper);
  for (const auto& v : box.vertices()) {
    if (!p_.contains_in_interior(v)) throw PreconditionError("bump support must lie strictly inside the polytope");
  }
  SymplecticPotential out = *this;
  out.bumps_.push_back({to_double(b.lower), to_double(b.upper), derivatives_of(b.poly), scale});
  return out;
}

SymplecticPotential SymplecticPotential::plus(const QPolynomial& g) const {
  SymplecticPotential out(p_, g_ + g, canonical_);
  out.bumps_ = bumps_;
  return out;
}

void SymplecticPotential::require_interior(const Eigen::VectorXd& x) const {
  if (!p_.contains_in_interior(x)) throw PreconditionError("point " + describe(x) + " is not in the interior of P");
}

template <typename Fn>
void SymplecticPotential::each_active(const Eigen::VectorXd& x, Fn&& fn) const {
  fn(gd_, 1.0);
  for (const auto& b : bumps_)
    if (in_box(x, b.lower, b.upper)) fn(b.d, b.scale);
}

double SymplecticPotential::value(const Eigen::VectorXd& x) const {
  double v = 0.0;
  if (canonical_) {
    for (std::size_t f = 0; f < normals_.size(); ++f) {
      const double l = normals_[f].dot(x) - offsets_[f];
      if (l > 0.0) v += 0.5 * l * std::log(l);
    }
  }
  each_active(x, [&](const Derivatives& d, double s) { v += s * d.f.eval<double>(x); });
  return v;
}

Eigen::VectorXd SymplecticPotential::gradient(const Eigen::VectorXd& x) const {
  require_interior(x);
  const int n = dim();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  if (canonical_) {
    for (std::size_t f = 0; f < normals_.size(); ++f) {
      const double l = normals_[f].dot(x) - offsets_[f];
      g += 0.5 * (std::log(l) + 1.0) * normals_[f];
    }
  }
  each_active(x, [&](const Derivatives& d, double s) {
    for (int i = 0; i < n; ++i) g(i) += s * d.d1[idx(i)].eval<double>(x);
  });
  return g;
}

Eigen::MatrixXd SymplecticPotential::hessian(const Eigen::VectorXd& x) const {
  require_interior(x);
  const int n = dim();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  if (canonical_) {
    for (std::size_t f = 0; f < normals_.size(); ++f) {
      const double l = normals_[f].dot(x) - offsets_[f];
      h += (0.5 / l) * normals_[f] * normals_[f].transpose();
    }
  }
  each_active(x, [&](const Derivatives& d, double s) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) += s * d.d2[idx(i * n + j)].eval<double>(x);
  });
  return h;
}


// With e_F = 2 l_F / (1 - 2 c_F l_F) and K = G + sum_F c_F n_F n_F^T the
// Hessian is K + N^T E^{-1} N, so by Woodbury
//   U = K^{-1} - K^{-1} N^T C^{-1} N K^{-1},  C = E + N K^{-1} N^T,
// and nothing in this form blows up at the boundary. c_F < 1 / (2 max l_F)
// keeps e_F finite on P.
template <int N>
std::optional<SymplecticPotential::Stable> SymplecticPotential::stable_form_n(const Eigen::VectorXd& x) const {
  using J = Jet<N>;
  const int n = dim();
  constexpr int jn = N;
  JetMatrix<N> k(idx(n), std::vector<J>(idx(n)));
  each_active(x, [&](const Derivatives& d, double s) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        J& e = k[idx(i)][idx(j)];
        e.v += s * d.d2[idx(i * n + j)].eval<double>(x);
        for (int a = 0; a < jn; ++a) {
          e.g[idx(a)] += s * d.d3[idx((i * n + j) * n + a)].eval<double>(x);
          for (int b = 0; b < jn; ++b) e.hess(a, b) += s * d.d4[idx(((i * n + j) * n + a) * n + b)].eval<double>(x);
        }
      }
  });
  const std::size_t m = canonical_ ? normals_.size() : 0;
  std::vector<J> e(m);
  for (std::size_t f = 0; f < m; ++f) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k[idx(i)][idx(j)].v += shifts_[f] * normals_[f](i) * normals_[f](j);
    J l = J::constant(normals_[f].dot(x) - offsets_[f]);
    for (int a = 0; a < jn; ++a) l.g[idx(a)] = normals_[f](a);
    e[f] = 2.0 * l * reciprocal(J::constant(1.0) - 2.0 * shifts_[f] * l);
  }

  Stable out;
  JetMatrix<N> kinv = jet_identity<N>(idx(n));
  {
    Eigen::MatrixXd kv(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) kv(i, j) = k[idx(i)][idx(j)].v;
    out.log_det = std::log(std::abs(kv.determinant()));
  }
  if (!jet_solve(k, kinv)) return std::nullopt;
  JetMatrix<N> u = kinv;
  if (m > 0) {
    // B = N K^{-1} (m x n), C = E + B N^T (m x m).
    JetMatrix<N> b(m, std::vector<J>(idx(n)));
    for (std::size_t f = 0; f < m; ++f)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) b[f][idx(j)] = b[f][idx(j)] + normals_[f](i) * kinv[idx(i)][idx(j)];
    JetMatrix<N> c(m, std::vector<J>(m));
    Eigen::MatrixXd cv(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t f = 0; f < m; ++f)
      for (std::size_t g = 0; g < m; ++g) {
        J& entry = c[f][g];
        if (f == g) entry = e[f];
        for (int j = 0; j < n; ++j) entry = entry + normals_[g](j) * b[f][idx(j)];
        cv(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(g)) = entry.v;
      }
    JetMatrix<N> xs = b;
    if (!jet_solve(c, xs)) return std::nullopt;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (std::size_t f = 0; f < m; ++f) u[idx(i)][idx(j)] = u[idx(i)][idx(j)] - b[f][idx(i)] * xs[f][idx(j)];
    // det H = det K det C / prod e_F.
    out.log_det += std::log(std::abs(cv.determinant()));
    for (const auto& ef : e) out.log_det -= std::log(ef.v);
  }

  out.u = Eigen::MatrixXd(n, n);
  out.du.assign(idx(jn), Eigen::MatrixXd(n, n));
  out.ddu.assign(idx(jn * jn), Eigen::MatrixXd(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const J& v = u[idx(i)][idx(j)];
      out.u(i, j) = v.v;
      for (int a = 0; a < jn; ++a) {
        out.du[idx(a)](i, j) = v.g[idx(a)];
        for (int b = 0; b < jn; ++b) out.ddu[idx(a * n + b)](i, j) = v.hess(a, b);
      }
    }
  return out;
}

std::optional<SymplecticPotential::Stable> SymplecticPotential::stable_form(const Eigen::VectorXd& x,
                                                                           bool with_jets) const {
  if (!with_jets) return stable_form_n<0>(x);
  switch (dim()) {
    case 1: return stable_form_n<1>(x);
    case 2: return stable_form_n<2>(x);
    case 3: return stable_form_n<3>(x);
    case kMaxJetDim: return stable_form_n<kMaxJetDim>(x);
    default: return std::nullopt;
  }
}

Eigen::MatrixXd SymplecticPotential::hessian_inverse(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd h = hessian(x);
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) {
    throw PreconditionError("invalid potential: Hessian is not positive definite at " + describe(x));
  }
  if (auto st = stable_form(x, false)) return st->u;
  return h.fullPivLu().inverse();
}

double SymplecticPotential::log_det_hessian(const Eigen::VectorXd& x) const {
  if (auto st = stable_form(x, false)) return st->log_det;
  return std::log(hessian(x).determinant());
}

SymplecticPotential::InverseHessian SymplecticPotential::inverse_hessian_derivatives(const Eigen::VectorXd& x) const {
  if (Eigen::LLT<Eigen::MatrixXd>(hessian(x)).info() != Eigen::Success) {
    throw PreconditionError("invalid potential: Hessian is not positive definite at " + describe(x));
  }
  if (auto st = stable_form(x, true)) return {st->u, st->du, st->ddu};
  const Eigen::MatrixXd uinv = hessian(x).fullPivLu().inverse();
  const int n = dim();
  const auto dh = hessian_derivatives(x);
  const auto ddh = hessian_second_derivatives(x);
  // d_k U = -U (d_k H) U;  d_j d_k U = U H_j U H_k U + U H_k U H_j U - U H_jk U.
  InverseHessian out{uinv, {}, {}};
  for (int k = 0; k < n; ++k) out.du.push_back(-uinv * dh[idx(k)] * uinv);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      out.ddu.push_back(uinv * dh[idx(j)] * uinv * dh[idx(k)] * uinv + uinv * dh[idx(k)] * uinv * dh[idx(j)] * uinv -
                        uinv * ddh[idx(j * n + k)] * uinv);
  return out;
}

std::vector<Eigen::MatrixXd> SymplecticPotential::hessian_derivatives(const Eigen::VectorXd& x) const {
  require_interior(x);
  const int n = dim();
  std::vector<Eigen::MatrixXd> out(idx(n), Eigen::MatrixXd::Zero(n, n));
  if (canonical_) {
    for (std::size_t f = 0; f < normals_.size(); ++f) {
      const double l = normals_[f].dot(x) - offsets_[f];
      const Eigen::MatrixXd vv = normals_[f] * normals_[f].transpose();
      for (int k = 0; k < n; ++k) out[idx(k)] -= (0.5 * normals_[f](k) / (l * l)) * vv;
    }
  }
  each_active(x, [&](const Derivatives& d, double s) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out[idx(k)](i, j) += s * d.d3[idx((i * n + j) * n + k)].eval<double>(x);
  });
  return out;
}

std::vector<Eigen::MatrixXd> SymplecticPotential::hessian_second_derivatives(const Eigen::VectorXd& x) const {
  require_interior(x);
  const int n = dim();
  std::vector<Eigen::MatrixXd> out(idx(n * n), Eigen::MatrixXd::Zero(n, n));
  if (canonical_) {
    for (std::size_t f = 0; f < normals_.size(); ++f) {
      const double l = normals_[f].dot(x) - offsets_[f];
      const Eigen::MatrixXd vv = normals_[f] * normals_[f].transpose();
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out[idx(j * n + k)] += (normals_[f](j) * normals_[f](k) / (l * l * l)) * vv;
    }
  }
  each_active(x, [&](const Derivatives& d, double s) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            out[idx(j * n + k)](a, b) += s * d.d4[idx(((a * n + b) * n + j) * n + k)].eval<double>(x);
  });
  return out;
}

void SymplecticPotential::validate(int per_axis) const {
  for (const auto& x : interior_grid(p_, per_axis)) hessian_inverse(x);
}

WeightField::WeightField(const RootSystem& rs) : p(dh_weight(rs).cast<double>()), f_G(f_G_fraction(rs)) {
  const int n = rs.rank();
  for (int i = 0; i < n; ++i) dp.push_back(p.derivative(i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ddp.push_back(dp[idx(i)].derivative(j));
}

double WeightField::value(const Eigen::VectorXd& x) const { return p.eval<double>(x); }

double weighted_divergence(const WeightField& w, const SymplecticPotential& u, const Eigen::VectorXd& x) {
  const int n = u.dim();
  const auto inv = u.inverse_hessian_derivatives(x);
  const double pv = w.p.eval<double>(x);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const double pj = w.dp[idx(j)].eval<double>(x);
    for (int k = 0; k < n; ++k) {
      const double pjk = w.ddp[idx(j * n + k)].eval<double>(x);
      total += pjk * inv.u(j, k) + 2.0 * pj * inv.du[idx(k)](j, k) + pv * inv.ddu[idx(j * n + k)](j, k);
    }
  }
  return total / pv;
}

double scalar_curvature(const WeightField& w, const SymplecticPotential& u, const Eigen::VectorXd& x,
                        const Conventions& conv) {
  return -conv.divergence_factor.to_double() * weighted_divergence(w, u, x) + w.f_G.eval(x);
}

double scalar_curvature(const RootSystem& rs, const SymplecticPotential& u, const Eigen::VectorXd& x,
                        const Conventions& conv) {
  return scalar_curvature(WeightField(rs), u, x, conv);
}

APreset parse_a_preset(const std::string& name) {
  if (name == "paper") return APreset::Paper;
  if (name == "csc") return APreset::Csc;
  if (name == "zero") return APreset::Zero;
  throw InputError("unknown A preset '" + name + "' (expected paper, csc or zero)");
}

std::string to_string(APreset a) {
  switch (a) {
    case APreset::Paper: return "paper";
    case APreset::Csc: return "csc";
    case APreset::Zero: return "zero";
  }
  return "zero";
}

Integrand make_A(const RootSystem& rs, const RationalPolytope& p, APreset preset) {
  if (preset == APreset::Zero) return [](const Eigen::VectorXd&) { return 0.0; };
  const double a = average_scalar(rs, p).to_double();
  const double factor = preset == APreset::Paper ? 0.5 : 2.0;
  RationalFunction fg = f_G_fraction(rs);
  return [a, factor, fg](const Eigen::VectorXd& x) { return factor * (a - fg.eval(x)); };
}

double el_residual(const WeightField& w, const SymplecticPotential& u, const Integrand& a, const Eigen::VectorXd& x) {
  return -weighted_divergence(w, u, x) - a(x);
}

std::vector<Eigen::VectorXd> interior_grid(const RationalPolytope& p, int per_axis) {
  if (per_axis < 1) throw InputError("grid resolution must be positive");
  const int n = p.dim();
  Eigen::VectorXd lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    lo(i) = p.min_coordinate(i).to_double();
    hi(i) = p.max_coordinate(i).to_double();
  }
  std::vector<Eigen::VectorXd> out;
  std::vector<int> c(idx(n), 0);
  while (true) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = lo(i) + (hi(i) - lo(i)) * (c[idx(i)] + 0.5) / per_axis;
    if (p.contains_in_interior(x)) out.push_back(x);
    int axis = n - 1;
    while (axis >= 0 && ++c[idx(axis)] == per_axis) c[idx(axis--)] = 0;
    if (axis < 0) break;
  }
  return out;
}

MabuchiResult mabuchi_eval(const RootSystem& rs, const SymplecticPotential& u, const Integrand& a,
                           const GradedQuadratureSpec& spec) {
  const RationalPolytope& p = u.polytope();
  check_positive_chamber(rs, p);
  u.validate();
  const WeightField w(rs);
  MabuchiResult r;
  const auto log_det = graded_integral(
      [&](const Eigen::VectorXd& x) { return -u.log_det_hessian(x) * w.value(x); }, p, spec);
  const auto lin = graded_integral([&](const Eigen::VectorXd& x) { return -u.value(x) * a(x) * w.value(x); }, p, spec);
  r.log_det_term = log_det.value;
  r.linear_term = lin.value;
  // The polynomial part is integrated exactly; bumps vanish on the boundary.
  double boundary = boundary_integral(u.perturbation() * dh_weight(rs), p).to_double();
  if (u.canonical()) {
    const SymplecticPotential canonical_only(p);
    boundary += boundary_quadrature(
        p, [&](const Eigen::VectorXd& x) { return canonical_only.value(x) * w.value(x); }, spec);
  }
  r.boundary_term = 2.0 * boundary;
  r.value = r.log_det_term + r.boundary_term + r.linear_term;
  r.error = log_det.error + lin.error;
  r.within_tolerance = r.error <= spec.tolerance;
  return r;
}

double linear_functional(const RootSystem& rs, const RationalPolytope& p, const Integrand& a, const QPolynomial& g,
                         const GradedQuadratureSpec& spec) {
  const QPolynomial gw = g * dh_weight(rs);
  const DPolynomial gwd = gw.cast<double>();
  const double boundary = boundary_integral(gw, p).to_double();
  const double bulk = graded_integral([&](const Eigen::VectorXd& x) { return a(x) * gwd.eval<double>(x); }, p, spec).value;
  return 2.0 * boundary - bulk;
}

VariationReport variation_check(const RootSystem& rs, const SymplecticPotential& u, const Integrand& a,
                                const Bump& bump, double eps, const GradedQuadratureSpec& spec) {
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  check_positive_chamber(rs, u.polytope());
  const RationalPolytope box = box_polytope(bump.lower, bump.upper);
  const WeightField w(rs);
  const DPolynomial du = bump.poly.cast<double>();

  auto derivative = [&](double scale) {
    const SymplecticPotential plus = u.with_bump(bump, scale * eps);
    const SymplecticPotential minus = u.with_bump(bump, -scale * eps);
    const Integrand diff = [&](const Eigen::VectorXd& x) {
      const double ld = plus.log_det_hessian(x) - minus.log_det_hessian(x);
      return (-ld - 2.0 * scale * eps * du.eval<double>(x) * a(x)) * w.value(x) / (2.0 * eps);
    };
    return graded_integral(diff, box, spec).value;
  };

  VariationReport rep;
  rep.finite_difference = derivative(1.0);
  rep.finite_difference_doubled = derivative(2.0);
  rep.predicted = graded_integral(
                      [&](const Eigen::VectorXd& x) { return el_residual(w, u, a, x) * du.eval<double>(x) * w.value(x); },
                      box, spec)
                      .value;
  rep.relative_discrepancy = std::abs(rep.finite_difference - rep.predicted) / std::abs(rep.predicted);
  rep.doubling_discrepancy = std::abs(rep.finite_difference_doubled / (2.0 * rep.finite_difference) - 1.0);

  const Eigen::VectorXd centre = 0.5 * (to_double(bump.lower) + to_double(bump.upper));
  if (eps * std::abs(du.eval<double>(centre)) < 1e-10) {
    rep.advisory = "epsilon is small enough for rounding to dominate the finite difference";
  }
  return rep;
}

}  // namespace kstab
