#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace rlab {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

/// Element of Q(i). Used by the exact Cayley-Bacharach path.
struct GaussRational {
  Rational re{0};
  Rational im{0};

  GaussRational() = default;
  GaussRational(Rational r) : re(std::move(r)) {}  // NOLINT(implicit)
  GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  GaussRational(long long v) : re(v) {}  // NOLINT(implicit)

  bool is_zero() const { return re == 0 && im == 0; }
  GaussRational conj() const { return {re, -im}; }
  Rational norm2() const { return re * re + im * im; }
  Complex to_complex() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }

  friend GaussRational operator+(const GaussRational& a, const GaussRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussRational operator-(const GaussRational& a, const GaussRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussRational operator/(const GaussRational& a, const GaussRational& b) {
    const Rational d = b.norm2();
    if (d == 0) throw std::domain_error("GaussRational: division by zero");
    const GaussRational num = a * b.conj();
    return {num.re / d, num.im / d};
  }
  GaussRational& operator+=(const GaussRational& o) { return *this = *this + o; }
  GaussRational& operator-=(const GaussRational& o) { return *this = *this - o; }
  GaussRational& operator*=(const GaussRational& o) { return *this = *this * o; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

std::string to_string(const GaussRational& v);

/// Best rational approximation with bounded denominator (continued fractions).
Rational rationalize(double x, long long max_denominator);

namespace scalar {

inline bool is_zero(const Complex& c) { return c == Complex(0.0, 0.0); }
inline bool is_zero(const GaussRational& c) { return c.is_zero(); }

inline Complex to_complex(const Complex& c) { return c; }
inline Complex to_complex(const GaussRational& c) { return c.to_complex(); }

template <class C> C from_int(long long v);
template <> inline Complex from_int<Complex>(long long v) {
  return {static_cast<double>(v), 0.0};
}
template <> inline GaussRational from_int<GaussRational>(long long v) {
  return GaussRational(v);
}

}  // namespace scalar
}  // namespace rlab
