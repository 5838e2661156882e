#include "kstab/futaki.hpp"

#include <sstream>

#include "kstab/error.hpp"
#include "kstab/lattice.hpp"
#include "kstab/linalg.hpp"
#include "kstab/quadrature.hpp"

namespace kstab {

namespace {

std::string describe(const QVector& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

void check_dims(const RootSystem& rs, const RationalPolytope& p) {
  if (rs.rank() != p.dim()) throw InputError("root system rank does not match polytope dimension");
}

struct Parts {
  QPolynomial q, top, next;
};

Parts parts_of(const RootSystem& rs) {
  Parts out;
  out.q = weyl_polynomial(rs);
  const auto hp = homogeneous_parts(out.q, rs.num_positive());
  out.top = hp.top;
  out.next = hp.next;
  return out;
}

Rational rational_k(std::int64_t k) { return Rational(static_cast<long>(k)); }

}  // namespace

void check_positive_chamber(const RootSystem& rs, const RationalPolytope& p) {
  check_dims(rs, p);
  for (const auto& v : p.vertices()) {
    for (const auto& m : rs.coroots()) {
      if (to_rational(m).dot(v).sign() <= 0) {
        throw PreconditionError("positivity precondition violated: vertex " + describe(v) +
                                " is not in the open positive Weyl chamber");
      }
    }
  }
}

Rational volume_W(const RootSystem& rs, const RationalPolytope& p) {
  check_positive_chamber(rs, p);
  return integral_polytope(dh_weight(rs), p);
}

Rational average_scalar(const RootSystem& rs, const RationalPolytope& p) {
  check_positive_chamber(rs, p);
  const Parts parts = parts_of(rs);
  const Rational c = integral_polytope(parts.top, p);
  const Rational d = integral_polytope(parts.next, p) + Rational(1, 2) * boundary_integral(parts.top, p);
  return Rational(2) * d / c;
}

Rational futaki_closed_form(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f,
                            const Conventions& conv) {
  check_positive_chamber(rs, p);
  if (f.dim() != p.dim()) throw InputError("PL function dimension does not match polytope");
  const Parts parts = parts_of(rs);
  const Rational vol = integral_polytope(parts.top, p);
  const Rational a = average_scalar(rs, p);
  // f_G W = q_{N-1} / qnm1_factor.
  const Rational f_fg_w = integral_pl_poly(f, parts.next, p) / conv.qnm1_factor;
  const Rational f_w_boundary = boundary_integral_pl_poly(f, parts.top, p);
  const Rational f_w = integral_pl_poly(f, parts.top, p);
  return -(f_fg_w + f_w_boundary - a * f_w) / (Rational(2) * vol);
}

Integer weyl_value(const RootSystem& rs, const ZVector& lambda) {
  Integer v = 1;
  for (int a = 0; a < rs.num_positive(); ++a) {
    v *= static_cast<long>(rs.coroots()[static_cast<std::size_t>(a)].dot(lambda) + rs.height(a));
  }
  return v;
}

Rational weighted_count_dk(const RootSystem& rs, const RationalPolytope& p, std::int64_t k) {
  check_dims(rs, p);
  const Integer total = lattice_sum<Integer>(p, k, [&](const ZVector& l) { return weyl_value(rs, l); });
  return Rational(total) / Rational(rs.denom());
}

std::int64_t sampling_step(const RationalPolytope& p, const PiecewiseAffine& f, const Rational& r) {
  Integer m = lcm(f.denominator_lcm(), r.den());
  const RationalPolytope lifted = lift_polytope(p, f, r);
  for (const auto& v : lifted.vertices())
    for (Eigen::Index i = 0; i < v.size(); ++i) m = lcm(m, v(i).den());
  for (const auto& v : p.vertices())
    for (Eigen::Index i = 0; i < v.size(); ++i) m = lcm(m, v(i).den());
  return to_int64(m);
}

Rational weighted_weight_wk(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f,
                            const Rational& r, std::int64_t k) {
  check_dims(rs, p);
  if (k <= 0) throw PreconditionError("k must be positive");
  const Rational kq = rational_k(k);
  const Rational kr = kq * r;
  std::vector<std::pair<QVector, Rational>> pieces;
  for (const auto& piece : f.pieces()) pieces.emplace_back(piece.gradient, kq * piece.constant);
  const Rational total = lattice_sum<Rational>(p, k, [&](const ZVector& l) {
    const QVector lq = to_rational(l);
    Rational kf = pieces.front().first.dot(lq) + pieces.front().second;
    for (const auto& [a, kb] : pieces) kf = std::max(kf, a.dot(lq) + kb);
    return Rational(weyl_value(rs, l)) * (kr - kf);
  });
  return total / Rational(rs.denom());
}

Rational wk_via_lift(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f, const Rational& r,
                     std::int64_t k) {
  check_dims(rs, p);
  const Rational kq = rational_k(k);
  if (!(kq * r).is_integer()) throw PreconditionError("k R must be an integer for the lifted count");
  for (const auto& piece : f.pieces()) {
    for (Eigen::Index i = 0; i < piece.gradient.size(); ++i)
      if (!piece.gradient(i).is_integer()) throw PreconditionError("lifted count needs integral PL gradients");
    if (!(kq * piece.constant).is_integer()) throw PreconditionError("k b_i must be integral for the lifted count");
  }
  const RationalPolytope q = lift_polytope(p, f, r);
  const int n = p.dim();
  const Integer lifted = lattice_sum<Integer>(q, k, [&](const ZVector& mu) { return weyl_value(rs, mu.head(n)); });
  return Rational(lifted) / Rational(rs.denom()) - weighted_count_dk(rs, p, k);
}

std::vector<Rational> interpolate_exact(const std::vector<Rational>& t, const std::vector<Rational>& values, int degree,
                                        int* verified) {
  const auto need = static_cast<std::size_t>(degree + 1);
  if (t.size() < need) throw PreconditionError("not enough samples to interpolate degree " + std::to_string(degree));
  const auto size = static_cast<Eigen::Index>(need);
  QMatrix vander(size, size);
  QVector rhs(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    Rational pw(1);
    for (Eigen::Index j = 0; j < size; ++j) {
      vander(i, j) = pw;
      pw *= t[static_cast<std::size_t>(i)];
    }
    rhs(i) = values[static_cast<std::size_t>(i)];
  }
  const auto sol = exact_solve(vander, rhs);
  if (!sol) throw CheckFailure("interpolation nodes are not distinct");
  std::vector<Rational> coeffs(sol->data(), sol->data() + sol->size());
  int checked = 0;
  for (std::size_t i = need; i < t.size(); ++i) {
    Rational v(0), pw(1);
    for (const auto& c : coeffs) {
      v += c * pw;
      pw *= t[i];
    }
    if (v != values[i]) {
      throw CheckFailure("interpolation mismatch at sample " + t[i].str() + ": predicted " + v.str() + ", enumerated " +
                         values[i].str());
    }
    ++checked;
  }
  if (verified) *verified = checked;
  return coeffs;
}

std::vector<std::int64_t> default_samples(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f,
                                          const Rational& r, std::int64_t kmax) {
  const std::int64_t m = sampling_step(p, f, r);
  const std::int64_t count = rs.num_positive() + p.dim() + 4;
  const std::int64_t last = std::max(count, kmax / m);
  std::vector<std::int64_t> out;
  for (std::int64_t i = 1; i <= last; ++i) out.push_back(i * m);
  return out;
}

EhrhartFit ehrhart_fit(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f, const Rational& r,
                       const std::vector<std::int64_t>& samples) {
  check_dims(rs, p);
  const int deg = rs.num_positive() + p.dim();
  EhrhartFit fit;
  fit.step = sampling_step(p, f, r);
  if (static_cast<int>(samples.size()) < deg + 3) {
    throw PreconditionError("need at least " + std::to_string(deg + 3) + " samples for the Ehrhart fit");
  }
  std::vector<Rational> t;
  for (auto k : samples) {
    if (k <= 0 || k % fit.step != 0) throw PreconditionError("sample k = " + std::to_string(k) + " is not a positive multiple of " + std::to_string(fit.step));
    fit.k.push_back(k);
    fit.d.push_back(weighted_count_dk(rs, p, k));
    fit.w.push_back(weighted_weight_wk(rs, p, f, r, k));
    t.push_back(Rational(static_cast<long>(k / fit.step)));
  }
  int vd = 0, vw = 0;
  const auto d_t = interpolate_exact(t, fit.d, deg, &vd);
  const auto w_t = interpolate_exact(t, fit.w, deg + 1, &vw);
  fit.verified_samples = std::min(vd, vw);
  // k = m t, so the coefficient of k^j is c_j / m^j.
  const Rational m(static_cast<long>(fit.step));
  auto rescale = [&](const std::vector<Rational>& c) {
    std::vector<Rational> out;
    Rational pw(1);
    for (const auto& v : c) {
      out.push_back(v / pw);
      pw *= m;
    }
    return out;
  };
  fit.d_poly = rescale(d_t);
  fit.w_poly = rescale(w_t);
  const Rational denom(rs.denom());
  fit.C = fit.d_poly[static_cast<std::size_t>(deg)] * denom;
  fit.D = fit.d_poly[static_cast<std::size_t>(deg - 1)] * denom;
  fit.A = fit.w_poly[static_cast<std::size_t>(deg + 1)] * denom;
  fit.B = fit.w_poly[static_cast<std::size_t>(deg)] * denom;
  fit.F0 = fit.A / fit.C;
  fit.F1 = (fit.B * fit.C - fit.A * fit.D) / (fit.C * fit.C);
  return fit;
}

Rational default_R(const RationalPolytope& p, const PiecewiseAffine& f) {
  Rational mx = f(p.vertices().front());
  for (const auto& v : p.vertices()) mx = std::max(mx, f(v));
  return Rational(ceil(mx)) + Rational(1);
}

FutakiReport futaki_report(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f,
                           const Conventions& conv) {
  FutakiReport rep;
  rep.vol_W = volume_W(rs, p);
  rep.a = average_scalar(rs, p);
  rep.F1_closed = futaki_closed_form(rs, p, f, conv);
  rep.R = default_R(p, f);
  return rep;
}

FutakiReport futaki_cross_check(const RootSystem& rs, const RationalPolytope& p, const PiecewiseAffine& f,
                                const Rational& r, std::int64_t kmax, const Conventions& conv) {
  FutakiReport rep = futaki_report(rs, p, f, conv);
  rep.R = r;
  const Rational r1 = r + Rational(1);
  rep.fit = ehrhart_fit(rs, p, f, r, default_samples(rs, p, f, r, kmax));
  rep.fit_shifted = ehrhart_fit(rs, p, f, r1, default_samples(rs, p, f, r1, kmax));
  rep.F1_oracle = rep.fit->F1;
  rep.r_independent = rep.fit_shifted->F1 == rep.fit->F1 && rep.fit_shifted->F0 == rep.fit->F0 + Rational(1);
  rep.agreement = *rep.F1_oracle == rep.F1_closed && rep.r_independent;
  return rep;
}

}  // namespace kstab
