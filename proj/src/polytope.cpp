#include "kstab/polytope.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "kstab/error.hpp"
#include "kstab/linalg.hpp"

namespace kstab {

namespace {

using Key = std::vector<std::string>;

Key key_of(const QVector& v) {
  Key k;
  for (Eigen::Index i = 0; i < v.size(); ++i) k.push_back(v(i).str());
  return k;
}

std::string describe(const QVector& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

/// Calls fn on every size-k subset of {0, ..., n-1} in lexicographic order.
void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k > n) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

Eigen::Index affine_rank(const std::vector<QVector>& pts, const std::vector<int>& subset) {
  if (subset.size() <= 1) return 0;
  const auto dim = pts[static_cast<std::size_t>(subset[0])].size();
  QMatrix d(static_cast<Eigen::Index>(subset.size() - 1), dim);
  for (std::size_t i = 1; i < subset.size(); ++i)
    d.row(static_cast<Eigen::Index>(i - 1)) = (pts[static_cast<std::size_t>(subset[i])] - pts[static_cast<std::size_t>(subset[0])]).transpose();
  return exact_rank(d);
}

std::optional<Facet> primitive_facet(const Halfspace& h) {
  const ZVector v = primitive_integer_vector(h.normal);
  if (v.isZero()) return std::nullopt;
  Eigen::Index i = 0;
  while (v(i) == 0) ++i;
  const Rational scale = h.normal(i) / Rational(static_cast<long>(v(i)));
  return Facet{v, h.offset / scale};
}

bool same_facet(const Facet& a, const Facet& b) { return a.normal == b.normal && a.offset == b.offset; }

}  // namespace

Rational Facet::value(const QVector& x) const { return to_rational(normal).dot(x) - offset; }

double Facet::value(const Eigen::VectorXd& x) const { return normal.cast<double>().dot(x) - offset.to_double(); }

RationalPolytope RationalPolytope::point() {
  RationalPolytope p;
  p.dim_ = 0;
  p.vertices_.push_back(QVector(0));
  return p;
}

RationalPolytope RationalPolytope::from_vertices(const std::vector<QVector>& input) {
  if (input.empty()) throw InputError("polytope needs at least one vertex");
  const int n = static_cast<int>(input.front().size());
  std::vector<QVector> pts;
  std::set<Key> seen;
  for (const auto& p : input) {
    if (p.size() != n) throw InputError("vertices have inconsistent dimensions");
    if (seen.insert(key_of(p)).second) pts.push_back(p);
  }
  if (n == 0) return point();
  std::vector<int> all(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) all[i] = static_cast<int>(i);
  if (affine_rank(pts, all) != n) throw InputError("degenerate polytope: points do not span dimension " + std::to_string(n));

  RationalPolytope poly;
  poly.dim_ = n;
  const int count = static_cast<int>(pts.size());
  auto add_facet = [&](const QVector& normal, const QVector& through) {
    bool lower = true, upper = true;
    const Rational base = normal.dot(through);
    for (const auto& q : pts) {
      const Rational v = normal.dot(q);
      if (v < base) lower = false;
      if (v > base) upper = false;
      if (!lower && !upper) return;
    }
    Halfspace h{upper ? QVector(-normal) : normal, upper ? Rational(-base) : base};
    auto f = primitive_facet(h);
    for (const auto& g : poly.facets_)
      if (same_facet(g, *f)) return;
    poly.facets_.push_back(*f);
  };
  if (n == 1) {
    QVector e(1);
    e(0) = Rational(1);
    auto [mn, mx] = std::minmax_element(pts.begin(), pts.end(), [](const QVector& a, const QVector& b) { return a(0) < b(0); });
    add_facet(e, *mn);
    add_facet(e, *mx);
  } else {
    for_each_subset(count, n, [&](const std::vector<int>& s) {
      QMatrix d(n - 1, n);
      for (int i = 1; i < n; ++i)
        d.row(i - 1) = (pts[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])] - pts[static_cast<std::size_t>(s[0])]).transpose();
      const QMatrix ns = exact_nullspace(d);
      if (ns.cols() != 1) return;
      add_facet(ns.col(0), pts[static_cast<std::size_t>(s[0])]);
    });
  }

  for (const auto& p : pts) {
    std::vector<Eigen::Index> tight;
    for (std::size_t f = 0; f < poly.facets_.size(); ++f)
      if (poly.facets_[f].value(p) == 0) tight.push_back(static_cast<Eigen::Index>(f));
    if (static_cast<int>(tight.size()) < n) continue;
    ZMatrix normals(static_cast<Eigen::Index>(tight.size()), n);
    for (std::size_t i = 0; i < tight.size(); ++i) normals.row(static_cast<Eigen::Index>(i)) = poly.facets_[static_cast<std::size_t>(tight[i])].normal.transpose();
    if (exact_rank(to_rational(normals)) == n) poly.vertices_.push_back(p);
  }
  std::sort(poly.vertices_.begin(), poly.vertices_.end(), [](const QVector& a, const QVector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  std::sort(poly.facets_.begin(), poly.facets_.end(), [](const Facet& a, const Facet& b) {
    if (a.normal != b.normal)
      return std::lexicographical_compare(a.normal.data(), a.normal.data() + a.normal.size(), b.normal.data(), b.normal.data() + b.normal.size());
    return a.offset < b.offset;
  });
  poly.attach_facet_vertices();
  return poly;
}

std::optional<RationalPolytope> RationalPolytope::try_from_halfspaces(int n, const std::vector<Halfspace>& input) {
  std::vector<Facet> hs;
  for (const auto& h : input) {
    if (h.normal.size() != n) throw InputError("halfspace normal has wrong dimension");
    auto f = primitive_facet(h);
    if (!f) {
      if (h.offset > 0) return std::nullopt;  // 0 >= positive: infeasible
      continue;
    }
    if (std::none_of(hs.begin(), hs.end(), [&](const Facet& g) { return same_facet(g, *f); })) hs.push_back(*f);
  }
  if (n == 0) return point();
  std::vector<QVector> verts;
  std::set<Key> seen;
  for_each_subset(static_cast<int>(hs.size()), n, [&](const std::vector<int>& s) {
    QMatrix a(n, n);
    QVector b(n);
    for (int i = 0; i < n; ++i) {
      a.row(i) = to_rational(hs[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])].normal).transpose();
      b(i) = hs[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])].offset;
    }
    const auto x = exact_solve(a, b);
    if (!x) return;
    for (const auto& f : hs)
      if (f.value(*x) < 0) return;
    if (seen.insert(key_of(*x)).second) verts.push_back(*x);
  });
  // Fewer than n + 1 vertices: empty, lower-dimensional, or unbounded without vertices.
  if (static_cast<int>(verts.size()) < n + 1) return std::nullopt;
  std::vector<int> all(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) all[i] = static_cast<int>(i);
  if (affine_rank(verts, all) != n) return std::nullopt;
  RationalPolytope poly = from_vertices(verts);
  for (const auto& f : poly.facets_) {
    if (std::none_of(hs.begin(), hs.end(), [&](const Facet& g) { return same_facet(g, f); })) {
      throw InputError("halfspace intersection is unbounded");
    }
  }
  return poly;
}

RationalPolytope RationalPolytope::from_halfspaces(const std::vector<Halfspace>& halfspaces) {
  if (halfspaces.empty()) throw InputError("no halfspaces given");
  const int n = static_cast<int>(halfspaces.front().normal.size());
  auto p = try_from_halfspaces(n, halfspaces);
  if (!p) throw InputError("degenerate polytope: halfspace intersection is empty, lower-dimensional or unbounded");
  return *p;
}

void RationalPolytope::attach_facet_vertices() {
  facet_vertices_.clear();
  for (const auto& f : facets_) {
    std::vector<int> on;
    for (std::size_t v = 0; v < vertices_.size(); ++v)
      if (f.value(vertices_[v]) == 0) on.push_back(static_cast<int>(v));
    facet_vertices_.push_back(on);
  }
}

bool RationalPolytope::is_integer() const {
  for (const auto& v : vertices_)
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (!v(i).is_integer()) return false;
  return true;
}

bool RationalPolytope::contains(const QVector& x) const {
  return std::all_of(facets_.begin(), facets_.end(), [&](const Facet& f) { return f.value(x) >= 0; });
}

bool RationalPolytope::contains_in_interior(const QVector& x) const {
  return std::all_of(facets_.begin(), facets_.end(), [&](const Facet& f) { return f.value(x) > 0; });
}

bool RationalPolytope::contains_in_interior(const Eigen::VectorXd& x) const {
  return std::all_of(facets_.begin(), facets_.end(), [&](const Facet& f) { return f.value(x) > 0.0; });
}

Rational RationalPolytope::volume() const {
  if (dim_ == 0) return Rational(1);
  Rational v(0);
  for (const auto& s : triangulate(*this)) v += simplex_volume(s);
  return v;
}

std::vector<Halfspace> RationalPolytope::halfspaces() const {
  std::vector<Halfspace> out;
  for (const auto& f : facets_) out.push_back({to_rational(f.normal), f.offset});
  return out;
}

Rational RationalPolytope::min_coordinate(int i) const {
  Rational m = vertices_.front()(i);
  for (const auto& v : vertices_) m = std::min(m, v(i));
  return m;
}

Rational RationalPolytope::max_coordinate(int i) const {
  Rational m = vertices_.front()(i);
  for (const auto& v : vertices_) m = std::max(m, v(i));
  return m;
}

QVector FacetChart::apply(const QVector& x) const { return to_rational(linear) * x + translation; }

QVector FacetChart::embed(const QVector& y) const { return embed_linear * y + embed_offset; }

FacetChart facet_chart(const RationalPolytope& p, int facet) {
  const int n = p.dim();
  if (n < 1) throw InputError("a point has no facets");
  const Facet& f = p.facets().at(static_cast<std::size_t>(facet));
  FacetChart chart;
  chart.facet = facet;
  chart.linear = complete_to_unimodular(f.normal);
  chart.translation = QVector::Constant(n, Rational(0));
  chart.translation(n - 1) = -f.offset;
  const QMatrix inv = *exact_inverse(to_rational(chart.linear));
  chart.embed_linear = inv.leftCols(n - 1);
  chart.embed_offset = inv * (-chart.translation);
  if (n == 1) {
    chart.image = RationalPolytope::point();
  } else {
    std::vector<QVector> pts;
    for (int v : p.facet_vertices(facet)) pts.push_back(chart.apply(p.vertices()[static_cast<std::size_t>(v)]).head(n - 1));
    chart.image = RationalPolytope::from_vertices(pts);
  }
  return chart;
}

Rational facet_measure(const RationalPolytope& p, int facet) { return facet_chart(p, facet).image.volume(); }

PiecewiseAffine::PiecewiseAffine(std::vector<AffinePiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw InputError("piecewise-affine function needs at least one piece");
  dim_ = static_cast<int>(pieces_.front().gradient.size());
  for (const auto& p : pieces_)
    if (p.gradient.size() != dim_) throw InputError("affine pieces have inconsistent dimensions");
}

PiecewiseAffine PiecewiseAffine::constant(int dim, const Rational& c) {
  return PiecewiseAffine({AffinePiece{QVector::Constant(dim, Rational(0)), c}});
}

Rational PiecewiseAffine::operator()(const QVector& x) const {
  Rational best = pieces_.front().gradient.dot(x) + pieces_.front().constant;
  for (const auto& p : pieces_) best = std::max(best, p.gradient.dot(x) + p.constant);
  return best;
}

double PiecewiseAffine::eval(const Eigen::VectorXd& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pieces_) best = std::max(best, to_double(p.gradient).dot(x) + p.constant.to_double());
  return best;
}

Integer PiecewiseAffine::denominator_lcm() const {
  Integer m = 1;
  for (const auto& p : pieces_) {
    m = lcm(m, p.constant.den());
    for (Eigen::Index i = 0; i < p.gradient.size(); ++i) m = lcm(m, p.gradient(i).den());
  }
  return m;
}

PiecewiseAffine PiecewiseAffine::transformed(const ZMatrix& g) const {
  if (std::llabs(integer_determinant(g)) != 1) throw PreconditionError("transform is not in GL(n,Z)");
  const QMatrix inv_t = exact_inverse(to_rational(g))->transpose();
  std::vector<AffinePiece> out;
  for (const auto& p : pieces_) out.push_back({inv_t * p.gradient, p.constant});
  return PiecewiseAffine(std::move(out));
}

PiecewiseAffine PiecewiseAffine::plus(const Rational& c) const {
  std::vector<AffinePiece> out = pieces_;
  for (auto& p : out) p.constant += c;
  return PiecewiseAffine(std::move(out));
}

PiecewiseAffine PiecewiseAffine::scaled(const Rational& s) const {
  if (s.sign() <= 0) throw PreconditionError("scaling must be positive to preserve convexity");
  std::vector<AffinePiece> out = pieces_;
  for (auto& p : out) {
    p.gradient *= s;
    p.constant *= s;
  }
  return PiecewiseAffine(std::move(out));
}

RationalPolytope lift_polytope(const RationalPolytope& p, const PiecewiseAffine& f, const Rational& r) {
  const int n = p.dim();
  if (f.dim() != n) throw InputError("piecewise-affine function has wrong dimension");
  // f is convex, so its maximum over P is attained at a vertex.
  for (const auto& v : p.vertices()) {
    if (f(v) > r - Rational(1)) {
      throw PreconditionError("R too small: f(" + describe(v) + ") = " + f(v).str() + " exceeds R - 1 = " + (r - Rational(1)).str());
    }
  }
  std::vector<Halfspace> hs;
  for (const auto& h : p.halfspaces()) {
    QVector normal(n + 1);
    normal.head(n) = h.normal;
    normal(n) = Rational(0);
    hs.push_back({normal, h.offset});
  }
  QVector up = QVector::Constant(n + 1, Rational(0));
  up(n) = Rational(1);
  hs.push_back({up, Rational(0)});
  for (const auto& piece : f.pieces()) {
    QVector normal(n + 1);
    normal.head(n) = -piece.gradient;
    normal(n) = Rational(-1);
    hs.push_back({normal, piece.constant - r});
  }
  return RationalPolytope::from_halfspaces(hs);
}

Rational simplex_volume(const Simplex& s) {
  const auto n = static_cast<Eigen::Index>(s.size()) - 1;
  if (n == 0) return Rational(1);
  QMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m.col(i) = s[static_cast<std::size_t>(i + 1)] - s[0];
  return abs(exact_determinant(m)) / Rational(factorial(static_cast<unsigned>(n)));
}

std::vector<Simplex> triangulate(const RationalPolytope& p) {
  const auto& verts = p.vertices();
  if (p.dim() == 0) return {Simplex{verts.front()}};
  std::vector<std::vector<int>> facet_sets;
  for (std::size_t f = 0; f < p.facets().size(); ++f) facet_sets.push_back(p.facet_vertices(static_cast<int>(f)));

  std::vector<std::vector<int>> out;
  std::function<void(const std::vector<int>&, int, std::vector<int>&)> pull =
      [&](const std::vector<int>& face, int d, std::vector<int>& apexes) {
        if (d == 0) {
          std::vector<int> simplex = apexes;
          simplex.push_back(face.front());
          out.push_back(simplex);
          return;
        }
        const int apex = face.front();
        std::set<std::vector<int>> subfaces;
        for (const auto& fs : facet_sets) {
          std::vector<int> g;
          std::set_intersection(face.begin(), face.end(), fs.begin(), fs.end(), std::back_inserter(g));
          if (g.empty() || g.front() == apex || g.size() == face.size()) continue;
          if (static_cast<int>(affine_rank(verts, g)) != d - 1) continue;
          subfaces.insert(g);
        }
        apexes.push_back(apex);
        for (const auto& g : subfaces) pull(g, d - 1, apexes);
        apexes.pop_back();
      };
  std::vector<int> all(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) all[i] = static_cast<int>(i);
  std::vector<int> apexes;
  pull(all, p.dim(), apexes);

  std::vector<Simplex> simplices;
  for (const auto& idx : out) {
    Simplex s;
    for (int i : idx) s.push_back(verts[static_cast<std::size_t>(i)]);
    simplices.push_back(std::move(s));
  }
  return simplices;
}

RationalPolytope transform(const RationalPolytope& p, const ZMatrix& g) {
  if (g.rows() != p.dim() || g.cols() != p.dim()) throw InputError("transform has wrong shape");
  if (std::llabs(integer_determinant(g)) != 1) throw PreconditionError("transform is not in GL(n,Z)");
  const QMatrix gq = to_rational(g);
  std::vector<QVector> pts;
  for (const auto& v : p.vertices()) pts.push_back(gq * v);
  return RationalPolytope::from_vertices(pts);
}

bool is_in_positive_chamber(const RationalPolytope& p) {
  for (const auto& v : p.vertices())
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (v(i).sign() <= 0) return false;
  return true;
}

std::vector<std::pair<int, RationalPolytope>> linearity_cells(const RationalPolytope& p, const PiecewiseAffine& f) {
  const auto& pieces = f.pieces();
  std::vector<std::pair<int, RationalPolytope>> cells;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    bool duplicate = false;
    for (std::size_t j = 0; j < i; ++j)
      if (pieces[j].gradient == pieces[i].gradient && pieces[j].constant == pieces[i].constant) duplicate = true;
    if (duplicate) continue;
    std::vector<Halfspace> hs = p.halfspaces();
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      if (j == i) continue;
      hs.push_back({pieces[i].gradient - pieces[j].gradient, pieces[j].constant - pieces[i].constant});
    }
    auto cell = RationalPolytope::try_from_halfspaces(p.dim(), hs);
    if (cell) cells.emplace_back(static_cast<int>(i), std::move(*cell));
  }
  return cells;
}

}  // namespace kstab
