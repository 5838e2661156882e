// polynomial.hpp
// Sparse multivariate polynomials with canonical term ordering.
//
// Terms are kept in a std::map keyed by exponent vectors, so two polynomials
// with the same coefficients compare equal structurally. Zero coefficients are
// never stored. Instantiated for Rational (exact work) and double (fast
// evaluation inside the floating-point Mabuchi paths).
#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "kstab/rational.hpp"

namespace kstab {

using Exponent = std::vector<int>;

template <typename Scalar>
class Polynomial {
 public:
  using Terms = std::map<Exponent, Scalar>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, const Scalar& c) {
    Polynomial p(nvars);
    p.add_term(Exponent(static_cast<std::size_t>(nvars), 0), c);
    return p;
  }

  static Polynomial variable(int nvars, int index) {
    Polynomial p(nvars);
    Exponent e(static_cast<std::size_t>(nvars), 0);
    e.at(static_cast<std::size_t>(index)) = 1;
    p.add_term(e, Scalar(1));
    return p;
  }

  /// c . x + c0
  template <typename Derived>
  static Polynomial linear(const Eigen::MatrixBase<Derived>& c, const Scalar& c0) {
    const int n = static_cast<int>(c.size());
    Polynomial p = constant(n, c0);
    for (int i = 0; i < n; ++i) {
      Exponent e(static_cast<std::size_t>(n), 0);
      e[static_cast<std::size_t>(i)] = 1;
      p.add_term(e, Scalar(c(i)));
    }
    return p;
  }

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  Scalar coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  void add_term(const Exponent& e, const Scalar& c) {
    if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("exponent arity mismatch");
    if (c == Scalar(0)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second = it->second + c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(const Scalar& s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c = c * s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Scalar& s) { return a *= s; }
  friend Polynomial operator*(const Scalar& s, Polynomial a) { return a *= s; }
  Polynomial operator-() const { return *this * Scalar(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_arity(b);
    Polynomial r(a.nvars_);
    Exponent e(static_cast<std::size_t>(a.nvars_));
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    }
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  Polynomial pow(unsigned k) const {
    Polynomial r = constant(nvars_, Scalar(1));
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  Polynomial derivative(int var) const {
    Polynomial r(nvars_);
    const auto v = static_cast<std::size_t>(var);
    for (const auto& [e, c] : terms_) {
      if (e.at(v) == 0) continue;
      Exponent d = e;
      d[v] -= 1;
      r.add_term(d, c * Scalar(e[v]));
    }
    return r;
  }

  Polynomial homogeneous_part(int d) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
      if (total_degree(e) == d) r.terms_.emplace(e, c);
    }
    return r;
  }

  /// Substitutes x = a * y + b where a is nvars x m; returns a polynomial in y.
  template <typename DerivedA, typename DerivedB>
  Polynomial substitute_affine(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) const {
    const int m = static_cast<int>(a.cols());
    if (a.rows() != nvars_ || b.size() != nvars_) throw std::invalid_argument("affine substitution shape mismatch");
    std::vector<std::vector<Polynomial>> powers(static_cast<std::size_t>(nvars_));
    for (int i = 0; i < nvars_; ++i) {
      Polynomial li = constant(m, Scalar(b(i)));
      for (int j = 0; j < m; ++j) {
        Polynomial yj = variable(m, j);
        li += yj * Scalar(a(i, j));
      }
      powers[static_cast<std::size_t>(i)].push_back(constant(m, Scalar(1)));
      powers[static_cast<std::size_t>(i)].push_back(li);
    }
    auto power_of = [&](int i, int k) -> const Polynomial& {
      auto& cache = powers[static_cast<std::size_t>(i)];
      while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * cache[1]);
      return cache[static_cast<std::size_t>(k)];
    };
    Polynomial r(m);
    for (const auto& [e, c] : terms_) {
      Polynomial t = constant(m, c);
      for (int i = 0; i < nvars_; ++i) {
        if (e[static_cast<std::size_t>(i)] > 0) t = t * power_of(i, e[static_cast<std::size_t>(i)]);
      }
      r += t;
    }
    return r;
  }

  /// Evaluates at a point whose scalar type may differ from the coefficients'.
  template <typename T, typename Point>
  T eval(const Point& x) const {
    T acc = T(0);
    for (const auto& [e, c] : terms_) {
      T t = convert<T>(c);
      for (std::size_t i = 0; i < e.size(); ++i) {
        for (int k = 0; k < e[i]; ++k) t = t * T(x[static_cast<Eigen::Index>(i)]);
      }
      acc = acc + t;
    }
    return acc;
  }

  Scalar operator()(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const { return eval<Scalar>(x); }

  template <typename T>
  Polynomial<T> cast() const {
    Polynomial<T> r(nvars_);
    for (const auto& [e, c] : terms_) r.add_term(e, convert<T>(c));
    return r;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!first) os << " + ";
      first = false;
      os << "(" << it->second << ")";
      for (std::size_t i = 0; i < it->first.size(); ++i) {
        if (it->first[i] == 0) continue;
        os << "*x" << (i + 1);
        if (it->first[i] > 1) os << "^" << it->first[i];
      }
    }
    return os.str();
  }

  static int total_degree(const Exponent& e) {
    int d = 0;
    for (int v : e) d += v;
    return d;
  }

 private:
  template <typename T, typename S>
  static T convert(const S& s) {
    if constexpr (std::is_same_v<S, Rational> && std::is_same_v<T, double>) {
      return s.to_double();
    } else {
      return T(s);
    }
  }

  void check_arity(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("polynomial arity mismatch");
  }

  int nvars_ = 0;
  Terms terms_;
};

using QPolynomial = Polynomial<Rational>;
using DPolynomial = Polynomial<double>;

/// Exact integral of x^a over the standard simplex {x >= 0, sum x <= 1}:
/// (prod a_i!) / (n + |a|)!.
Rational standard_simplex_monomial_integral(const Exponent& a);

/// Gradient polynomials d/dx_i p.
template <typename Scalar>
std::vector<Polynomial<Scalar>> gradient(const Polynomial<Scalar>& p) {
  std::vector<Polynomial<Scalar>> g;
  for (int i = 0; i < p.nvars(); ++i) g.push_back(p.derivative(i));
  return g;
}

}  // namespace kstab
