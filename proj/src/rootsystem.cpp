#include "kstab/rootsystem.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "kstab/error.hpp"
#include "kstab/linalg.hpp"

namespace kstab {

namespace {

struct Realization {
  std::vector<QVector> simple;
  std::vector<QVector> positive;
};

QVector unit(int dim, int i, const Rational& scale = Rational(1)) {
  QVector v = QVector::Constant(dim, Rational(0));
  v(i) = scale;
  return v;
}

Realization realize(Series series, int n) {
  Realization r;
  auto add_pairs = [&](int dim, int count, bool with_sums) {
    for (int i = 0; i < count; ++i) {
      for (int j = i + 1; j < count; ++j) {
        r.positive.push_back(unit(dim, i) - unit(dim, j));
        if (with_sums) r.positive.push_back(unit(dim, i) + unit(dim, j));
      }
    }
  };
  switch (series) {
    case Series::A:
      if (n < 1) break;
      for (int i = 0; i < n; ++i) r.simple.push_back(unit(n + 1, i) - unit(n + 1, i + 1));
      add_pairs(n + 1, n + 1, false);
      return r;
    case Series::B:
      if (n < 2) break;
      for (int i = 0; i + 1 < n; ++i) r.simple.push_back(unit(n, i) - unit(n, i + 1));
      r.simple.push_back(unit(n, n - 1));
      add_pairs(n, n, true);
      for (int i = 0; i < n; ++i) r.positive.push_back(unit(n, i));
      return r;
    case Series::C:
      if (n < 2) break;
      for (int i = 0; i + 1 < n; ++i) r.simple.push_back(unit(n, i) - unit(n, i + 1));
      r.simple.push_back(unit(n, n - 1, 2));
      add_pairs(n, n, true);
      for (int i = 0; i < n; ++i) r.positive.push_back(unit(n, i, 2));
      return r;
    case Series::D:
      if (n < 3) break;
      for (int i = 0; i + 1 < n; ++i) r.simple.push_back(unit(n, i) - unit(n, i + 1));
      r.simple.push_back(unit(n, n - 2) + unit(n, n - 1));
      add_pairs(n, n, true);
      return r;
    case Series::G2: {
      if (n != 2) break;
      auto v = [](long a, long b, long c) {
        QVector x(3);
        x << Rational(a), Rational(b), Rational(c);
        return x;
      };
      r.simple = {v(1, -1, 0), v(-2, 1, 1)};
      r.positive = {v(1, -1, 0), v(-2, 1, 1), v(-1, 0, 1), v(0, -1, 1), v(1, -2, 1), v(-1, -1, 2)};
      return r;
    }
    case Series::F4: {
      if (n != 4) break;
      const Rational h(1, 2);
      QVector s4(4);
      s4 << h, -h, -h, -h;
      r.simple = {unit(4, 1) - unit(4, 2), unit(4, 2) - unit(4, 3), unit(4, 3), s4};
      add_pairs(4, 4, true);
      for (int i = 0; i < 4; ++i) r.positive.push_back(unit(4, i));
      for (int signs = 0; signs < 8; ++signs) {
        QVector x(4);
        x << h, (signs & 1) ? -h : h, (signs & 2) ? -h : h, (signs & 4) ? -h : h;
        r.positive.push_back(x);
      }
      return r;
    }
  }
  throw InputError("unsupported root system " + to_string(series) + std::to_string(n));
}

QVector coroot_of(const QVector& a) { return a * (Rational(2) / a.dot(a)); }

void sort_coroots(std::vector<ZVector>& v) {
  std::sort(v.begin(), v.end(), [](const ZVector& a, const ZVector& b) {
    const auto ha = a.sum(), hb = b.sum();
    if (ha != hb) return ha < hb;
    return std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(), a.data() + a.size());
  });
}

std::vector<long> key_of(const ZVector& v) { return std::vector<long>(v.data(), v.data() + v.size()); }

// Upper bound on the number of positive roots of a finite-type system of the
// given rank (E8 per block of 8 simple roots, B_n/C_n otherwise).
std::size_t positive_root_bound(int rank) {
  return static_cast<std::size_t>(std::max<long>(static_cast<long>(rank) * rank, 120L * ((rank + 7) / 8)));
}

void check_symmetrizable(const ZMatrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<std::optional<Rational>> d(static_cast<std::size_t>(n));
  for (Eigen::Index start = 0; start < n; ++start) {
    if (d[static_cast<std::size_t>(start)]) continue;
    d[static_cast<std::size_t>(start)] = Rational(1);
    std::vector<Eigen::Index> stack{start};
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j || a(i, j) == 0) continue;
        // d_i a_ij = d_j a_ji
        const Rational dj = *d[static_cast<std::size_t>(i)] * Rational(static_cast<long>(a(i, j))) /
                            Rational(static_cast<long>(a(j, i)));
        auto& slot = d[static_cast<std::size_t>(j)];
        if (!slot) {
          slot = dj;
          stack.push_back(j);
        } else if (*slot != dj) {
          throw InputError("Cartan matrix is not symmetrizable");
        }
      }
    }
  }
}

}  // namespace

Series parse_series(std::string_view name) {
  if (name == "A") return Series::A;
  if (name == "B") return Series::B;
  if (name == "C") return Series::C;
  if (name == "D") return Series::D;
  if (name == "G2" || name == "G") return Series::G2;
  if (name == "F4" || name == "F") return Series::F4;
  throw InputError("unknown root system series \"" + std::string(name) + "\"");
}

std::string to_string(Series s) {
  switch (s) {
    case Series::A: return "A";
    case Series::B: return "B";
    case Series::C: return "C";
    case Series::D: return "D";
    case Series::G2: return "G";
    case Series::F4: return "F";
  }
  return "?";
}

RootSystem::RootSystem(int rank, std::vector<ZVector> coroots, ZVector rho)
    : rank_(rank), coroots_(std::move(coroots)), rho_(std::move(rho)) {}

RootSystem RootSystem::classical(Series series, int rank) {
  const Realization r = realize(series, rank);
  const int n = static_cast<int>(r.simple.size());
  QMatrix gram(n, n);
  std::vector<QVector> simple_coroots;
  for (const auto& s : r.simple) simple_coroots.push_back(coroot_of(s));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gram(i, j) = simple_coroots[static_cast<std::size_t>(i)].dot(simple_coroots[static_cast<std::size_t>(j)]);
  std::vector<ZVector> coroots;
  for (const auto& root : r.positive) {
    const QVector target = coroot_of(root);
    QVector rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = simple_coroots[static_cast<std::size_t>(i)].dot(target);
    const auto coeffs = exact_solve(gram, rhs);
    if (!coeffs) throw CheckFailure("singular simple-coroot Gram matrix");
    ZVector m(n);
    for (int i = 0; i < n; ++i) {
      if (!(*coeffs)(i).is_integer()) throw CheckFailure("non-integral coroot expansion");
      m(i) = to_int64((*coeffs)(i).num());
    }
    coroots.push_back(m);
  }
  return from_coroots(rank, std::move(coroots));
}

RootSystem RootSystem::from_cartan(const ZMatrix& cartan) {
  const Eigen::Index n = cartan.rows();
  if (n < 1 || cartan.cols() != n) throw InputError("Cartan matrix must be square and nonempty");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j && cartan(i, j) != 2) throw InputError("Cartan matrix diagonal entries must be 2");
      if (i != j && cartan(i, j) > 0) throw InputError("Cartan matrix off-diagonal entries must be <= 0");
      if (i != j && (cartan(i, j) == 0) != (cartan(j, i) == 0))
        throw InputError("Cartan matrix zero pattern must be symmetric");
    }
  }
  check_symmetrizable(cartan);

  // Root-string closure in the coroot system, whose Cartan matrix is the transpose.
  const ZMatrix k = cartan.transpose();
  const std::size_t bound = positive_root_bound(static_cast<int>(n));
  std::set<std::vector<long>> seen;
  std::vector<ZVector> roots;
  std::vector<ZVector> layer;
  for (Eigen::Index i = 0; i < n; ++i) {
    ZVector e = ZVector::Zero(n);
    e(i) = 1;
    layer.push_back(e);
    seen.insert(key_of(e));
    roots.push_back(e);
  }
  while (!layer.empty()) {
    std::vector<ZVector> next;
    for (const auto& beta : layer) {
      for (Eigen::Index i = 0; i < n; ++i) {
        long p = 0;
        ZVector down = beta;
        while (true) {
          down(i) -= 1;
          if (!seen.count(key_of(down))) break;
          ++p;
        }
        const long pairing = static_cast<long>((k.row(i) * beta)(0));
        const long q = p - pairing;
        if (q <= 0) continue;
        ZVector up = beta;
        up(i) += 1;
        if (seen.insert(key_of(up)).second) {
          if (up.maxCoeff() > 6 || roots.size() >= bound) {
            throw InputError("Cartan matrix is not of finite type (root closure does not terminate)");
          }
          roots.push_back(up);
          next.push_back(up);
        }
      }
    }
    layer = std::move(next);
  }
  return from_coroots(static_cast<int>(n), std::move(roots));
}

RootSystem RootSystem::from_coroots(int rank, std::vector<ZVector> coroots) {
  if (rank < 1) throw InputError("root system rank must be positive");
  std::set<std::vector<long>> keys;
  for (const auto& m : coroots) {
    if (m.size() != rank) throw InputError("coroot vector has wrong length");
    if (m.minCoeff() < 0 || m.maxCoeff() == 0) throw InputError("coroot vectors must be nonzero and nonnegative");
    if (!keys.insert(key_of(m)).second) throw InputError("duplicate coroot vector");
  }
  for (int j = 0; j < rank; ++j) {
    ZVector e = ZVector::Zero(rank);
    e(j) = 1;
    if (!keys.count(key_of(e))) throw InputError("simple coroot e_" + std::to_string(j + 1) + " missing");
  }
  sort_coroots(coroots);
  return RootSystem(rank, std::move(coroots), ZVector::Ones(rank));
}

RootSystem RootSystem::transformed(const ZMatrix& g) const {
  if (g.rows() != rank_ || g.cols() != rank_) throw InputError("transform has wrong shape");
  if (std::llabs(integer_determinant(g)) != 1) throw PreconditionError("transform is not in GL(n,Z)");
  const auto inv = exact_inverse(to_rational(g));
  const QMatrix inv_t = inv->transpose();
  std::vector<ZVector> moved;
  for (const auto& m : coroots_) {
    const QVector image = inv_t * to_rational(m);
    ZVector z(rank_);
    for (int i = 0; i < rank_; ++i) z(i) = to_int64(image(i).num());
    moved.push_back(z);
  }
  return RootSystem(rank_, std::move(moved), g * rho_);
}

std::int64_t RootSystem::height(int alpha) const { return coroots_.at(static_cast<std::size_t>(alpha)).dot(rho_); }

Integer RootSystem::denom() const {
  Integer d = 1;
  for (int a = 0; a < num_positive(); ++a) d *= static_cast<long>(height(a));
  return d;
}

ZMatrix cartan_matrix(Series series, int rank) {
  const Realization r = realize(series, rank);
  const auto n = static_cast<Eigen::Index>(r.simple.size());
  ZMatrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& ai = r.simple[static_cast<std::size_t>(i)];
      const auto& aj = r.simple[static_cast<std::size_t>(j)];
      const Rational v = Rational(2) * ai.dot(aj) / ai.dot(ai);
      c(i, j) = to_int64(v.num());
    }
  }
  return c;
}

QPolynomial weyl_polynomial(const RootSystem& rs) {
  const int n = rs.rank();
  QPolynomial q = QPolynomial::constant(n, Rational(1));
  for (int a = 0; a < rs.num_positive(); ++a) {
    q = q * QPolynomial::linear(to_rational(rs.coroots()[static_cast<std::size_t>(a)]), Rational(static_cast<long>(rs.height(a))));
  }
  return q;
}

HomogeneousParts homogeneous_parts(const QPolynomial& q, int degree) {
  HomogeneousParts parts{q.homogeneous_part(degree), q.homogeneous_part(degree - 1), QPolynomial(q.nvars())};
  parts.rest = q - parts.top - parts.next;
  return parts;
}

QPolynomial dh_weight(const RootSystem& rs) {
  const int n = rs.rank();
  QPolynomial p = QPolynomial::constant(n, Rational(1));
  for (const auto& m : rs.coroots()) p = p * QPolynomial::linear(to_rational(m), Rational(0));
  return p;
}

RationalFunction f_G_fraction(const RootSystem& rs) {
  const QPolynomial p = dh_weight(rs);
  QPolynomial directional(rs.rank());
  for (int l = 0; l < rs.rank(); ++l) directional += p.derivative(l) * Rational(static_cast<long>(rs.rho()(l)));
  return {directional * Rational(2), p};
}

double RationalFunction::eval(const Eigen::VectorXd& x) const {
  return numerator.eval<double>(x) / denominator.eval<double>(x);
}

Rational dimension(const RootSystem& rs, const std::vector<long>& lambda) {
  if (static_cast<int>(lambda.size()) != rs.rank()) throw InputError("weight has wrong length");
  for (long l : lambda) {
    if (l < 0) throw PreconditionError("weight is not dominant (negative entry)");
  }
  // Evaluate the product directly; expanding q is expensive for large N.
  Integer q = 1;
  for (int a = 0; a < rs.num_positive(); ++a) {
    const ZVector& m = rs.coroots()[static_cast<std::size_t>(a)];
    long value = rs.height(a);
    for (int i = 0; i < rs.rank(); ++i) value += m(i) * lambda[static_cast<std::size_t>(i)];
    q *= value;
  }
  return Rational(q, rs.denom());
}

}  // namespace kstab
