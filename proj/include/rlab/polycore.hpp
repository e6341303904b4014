#pragma once

// Sparse multivariate polynomials over C (double) or Q(i) (exact), with the
// homogeneous wrapper used for sections of O(d) on P^n.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/scalar.hpp"

namespace rlab {

using Exponent = std::vector<int>;

template <class C>
class Polynomial {
 public:
  using Coeff = C;
  // Descending lexicographic order: z0^2 before z0*z1 before z1^2.
  using Terms = std::map<Exponent, C, std::greater<Exponent>>;

  Polynomial() = default;
  explicit Polynomial(int num_vars) : num_vars_(num_vars) {
    if (num_vars < 0) throw DimensionError("negative variable count");
  }

  static Polynomial constant(int num_vars, const C& c) {
    Polynomial p(num_vars);
    p.add_term(Exponent(num_vars, 0), c);
    return p;
  }
  static Polynomial variable(int num_vars, int k) {
    if (k < 0 || k >= num_vars) throw DimensionError("variable index out of range");
    Exponent e(num_vars, 0);
    e[k] = 1;
    Polynomial p(num_vars);
    p.add_term(e, scalar::from_int<C>(1));
    return p;
  }
  static Polynomial monomial(int num_vars, Exponent e, const C& c) {
    Polynomial p(num_vars);
    p.add_term(e, c);
    return p;
  }

  int num_vars() const { return num_vars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Largest total degree of a stored term; -1 for the zero polynomial.
  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, sum(e));
    return d;
  }

  /// Degree in variable k; -1 for the zero polynomial.
  int degree_in(int k) const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.at(k));
    return d;
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    const int d = sum(terms_.begin()->first);
    return std::all_of(terms_.begin(), terms_.end(),
                       [d](const auto& t) { return sum(t.first) == d; });
  }

  void add_term(const Exponent& e, const C& c) {
    if (static_cast<int>(e.size()) != num_vars_)
      throw DimensionError("exponent length does not match variable count");
    for (int v : e)
      if (v < 0) throw DimensionError("negative exponent");
    if (scalar::is_zero(c)) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
      return;
    }
    it->second = it->second + c;
    if (scalar::is_zero(it->second)) terms_.erase(it);
  }

  C coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? scalar::from_int<C>(0) : it->second;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    check_same(a, b);
    Polynomial r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
  }
  friend Polynomial operator-(const Polynomial& a) {
    Polynomial r(a.num_vars_);
    for (const auto& [e, c] : a.terms_) r.terms_.emplace(e, scalar::from_int<C>(0) - c);
    return r;
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    check_same(a, b);
    Polynomial r(a.num_vars_);
    Exponent e(a.num_vars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (int k = 0; k < a.num_vars_; ++k) e[k] = ea[k] + eb[k];
        r.add_term(e, ca * cb);
      }
    }
    return r;
  }
  friend Polynomial operator*(const C& s, const Polynomial& a) {
    Polynomial r(a.num_vars_);
    for (const auto& [e, c] : a.terms_) r.add_term(e, s * c);
    return r;
  }

  Polynomial pow(int k) const {
    if (k < 0) throw DimensionError("negative power");
    Polynomial r = constant(num_vars_, scalar::from_int<C>(1));
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  /// Formal partial derivative in variable k.
  Polynomial partial(int k) const {
    if (k < 0 || k >= num_vars_) throw DimensionError("variable index out of range");
    Polynomial r(num_vars_);
    for (const auto& [e, c] : terms_) {
      if (e[k] == 0) continue;
      Exponent f = e;
      f[k] -= 1;
      r.add_term(f, scalar::from_int<C>(e[k]) * c);
    }
    return r;
  }

  /// Horner-free evaluation with a per-variable power table.
  template <class Z>
  Z eval(std::span<const Z> z) const {
    if (static_cast<int>(z.size()) != num_vars_)
      throw DimensionError("evaluation point has wrong dimension");
    Z acc = Z(0);
    if (terms_.empty()) return acc;
    int maxdeg = 0;
    for (const auto& [e, c] : terms_)
      for (int v : e) maxdeg = std::max(maxdeg, v);
    std::vector<std::vector<Z>> powers(num_vars_, std::vector<Z>(maxdeg + 1, Z(1)));
    for (int k = 0; k < num_vars_; ++k)
      for (int p = 1; p <= maxdeg; ++p) powers[k][p] = powers[k][p - 1] * z[k];
    for (const auto& [e, c] : terms_) {
      Z m = coeff_as<Z>(c);
      for (int k = 0; k < num_vars_; ++k)
        if (e[k] != 0) m = m * powers[k][e[k]];
      acc = acc + m;
    }
    return acc;
  }
  template <class Z>
  Z eval(const std::vector<Z>& z) const {
    return eval(std::span<const Z>(z.data(), z.size()));
  }

  /// Substitutes variable k by subs[k]; all substitutes share a variable count.
  Polynomial compose(const std::vector<Polynomial>& subs) const {
    if (static_cast<int>(subs.size()) != num_vars_)
      throw DimensionError("compose: wrong number of substitutes");
    const int m = subs.empty() ? 0 : subs.front().num_vars();
    Polynomial r(m);
    for (const auto& [e, c] : terms_) {
      Polynomial t = constant(m, c);
      for (int k = 0; k < num_vars_; ++k)
        if (e[k] != 0) t = t * subs[k].pow(e[k]);
      r = r + t;
    }
    return r;
  }

  Polynomial<Complex> to_complex() const {
    Polynomial<Complex> r(num_vars_);
    for (const auto& [e, c] : terms_) r.add_term(e, scalar::to_complex(c));
    return r;
  }

  /// Euclidean norm of the coefficient vector.
  double coefficient_norm() const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += std::norm(scalar::to_complex(c));
    return std::sqrt(s);
  }
  /// Sum of coefficient magnitudes; bounds |P(z)| on the unit polydisc.
  double coefficient_l1() const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += std::abs(scalar::to_complex(c));
    return s;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
  }

 private:
  static int sum(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }
  static void check_same(const Polynomial& a, const Polynomial& b) {
    if (a.num_vars_ != b.num_vars_) throw DimensionError("variable count mismatch");
  }
  template <class Z>
  static Z coeff_as(const C& c) {
    if constexpr (std::is_same_v<Z, C>) {
      return c;
    } else {
      return Z(scalar::to_complex(c));
    }
  }

  int num_vars_ = 0;
  Terms terms_;
};

/// Homogeneous polynomial of a declared degree in z_0..z_n. The zero
/// polynomial keeps its declared degree (it is the zero section of O(d)).
template <class C>
class Homogeneous {
 public:
  Homogeneous() = default;
  Homogeneous(Polynomial<C> p, int degree) : poly_(std::move(p)), degree_(degree) {
    if (degree_ < 0) throw DimensionError("negative degree");
    for (const auto& [e, c] : poly_.terms())
      if (std::accumulate(e.begin(), e.end(), 0) != degree_)
        throw DimensionError("polynomial is not homogeneous of degree " +
                             std::to_string(degree_));
  }
  /// Infers the degree; the zero polynomial gets degree 0.
  static Homogeneous from(Polynomial<C> p) {
    if (!p.is_homogeneous()) throw DimensionError("polynomial is not homogeneous");
    const int d = std::max(0, p.total_degree());
    return Homogeneous(std::move(p), d);
  }

  const Polynomial<C>& poly() const { return poly_; }
  int num_vars() const { return poly_.num_vars(); }
  int degree() const { return degree_; }
  bool is_zero() const { return poly_.is_zero(); }
  const typename Polynomial<C>::Terms& terms() const { return poly_.terms(); }

  template <class Z>
  Z eval(std::span<const Z> z) const { return poly_.eval(z); }
  template <class Z>
  Z eval(const std::vector<Z>& z) const { return poly_.eval(z); }

  Homogeneous partial(int k) const {
    return Homogeneous(poly_.partial(k), std::max(0, degree_ - 1));
  }

  /// Chart representative on U_chart: Q(w) = P(z) / z_chart^deg with
  /// w_j = z_{j'} / z_chart, where j' runs over the indices other than `chart`.
  Polynomial<C> dehomogenize(int chart) const {
    const int nv = poly_.num_vars();
    if (chart < 0 || chart >= nv) throw DimensionError("chart index out of range");
    Polynomial<C> r(nv - 1);
    Exponent f(nv - 1);
    for (const auto& [e, c] : poly_.terms()) {
      for (int k = 0, j = 0; k < nv; ++k)
        if (k != chart) f[j++] = e[k];
      r.add_term(f, c);
    }
    return r;
  }

  Homogeneous<Complex> to_complex() const { return {poly_.to_complex(), degree_}; }

  friend Homogeneous operator*(const Homogeneous& a, const Homogeneous& b) {
    return Homogeneous(a.poly_ * b.poly_, a.degree_ + b.degree_);
  }
  friend Homogeneous operator+(const Homogeneous& a, const Homogeneous& b) {
    if (a.degree_ != b.degree_) throw DimensionError("degree mismatch in sum");
    return Homogeneous(a.poly_ + b.poly_, a.degree_);
  }
  friend bool operator==(const Homogeneous& a, const Homogeneous& b) {
    return a.degree_ == b.degree_ && a.poly_ == b.poly_;
  }

 private:
  Polynomial<C> poly_;
  int degree_ = 0;
};

using AffinePoly = Polynomial<Complex>;
using HomogeneousPoly = Homogeneous<Complex>;
using ExactPoly = Polynomial<GaussRational>;
using ExactHomogeneousPoly = Homogeneous<GaussRational>;

/// Parses the polynomial grammar (variables z0..z9, + - * ^, parentheses,
/// complex literals) into an exact polynomial in `num_vars` variables.
ExactPoly parse_expression(const std::string& text, int num_vars);

/// Parses and checks homogeneity. Throws ParseError / DimensionError.
ExactHomogeneousPoly parse_exact(const std::string& text, int num_vars);
HomogeneousPoly parse_poly(const std::string& text, int num_vars);

/// Canonical text form; parse_exact(to_string(p)) reproduces p exactly.
std::string to_string(const ExactPoly& p);
std::string to_string(const AffinePoly& p);
inline std::string to_string(const ExactHomogeneousPoly& p) { return to_string(p.poly()); }
inline std::string to_string(const HomogeneousPoly& p) { return to_string(p.poly()); }

/// Monomial exponents of total degree `degree` in `num_vars` variables,
/// descending lexicographic order.
std::vector<Exponent> monomials_of_degree(int num_vars, int degree);

}  // namespace rlab
