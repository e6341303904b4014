#include "rlab/polycore.hpp"

#include <cctype>
#include <iomanip>
#include <limits>
#include <sstream>

namespace rlab {

std::string to_string(const GaussRational& v) {
  std::ostringstream os;
  if (v.im == 0) {
    os << v.re;
  } else if (v.re == 0) {
    os << v.im << "i";
  } else {
    os << "(" << v.re << (v.im < 0 ? "-" : "+") << boost::multiprecision::abs(v.im) << "i)";
  }
  return os.str();
}

Rational rationalize(double x, long long max_denominator) {
  if (!std::isfinite(x)) throw std::domain_error("rationalize: non-finite value");
  const bool negative = x < 0;
  double r = std::fabs(x);
  // Convergents h/k of the continued fraction of r.
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(r);
    if (a > 1e15) break;
    const auto ai = static_cast<long long>(a);
    const long long h2 = ai * h1 + h0;
    const long long k2 = ai * k1 + k0;
    if (k2 > max_denominator) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  if (k1 == 0) return Rational(0);
  Rational q(h1, k1);
  return negative ? Rational(-q) : q;
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, int num_vars) : s_(text), nv_(num_vars) {}

  ExactPoly parse() {
    ExactPoly p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  ExactPoly expr() {
    ExactPoly acc = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        acc = acc + term();
      } else if (peek('-')) {
        ++pos_;
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  ExactPoly term() {
    ExactPoly acc = unary();
    while (peek('*')) {
      ++pos_;
      acc = acc * unary();
    }
    return acc;
  }

  ExactPoly unary() {
    if (peek('-')) {
      ++pos_;
      return -unary();
    }
    if (peek('+')) {
      ++pos_;
      return unary();
    }
    return power();
  }

  ExactPoly power() {
    ExactPoly base = primary();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected nonnegative integer exponent");
      const std::string digits = s_.substr(start, pos_ - start);
      if (digits.size() > 3) fail("exponent too large");
      return base.pow(std::stoi(digits));
    }
    return base;
  }

  ExactPoly primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ExactPoly inner = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == 'z') {
      ++pos_;
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
        fail("expected variable index after 'z'");
      const int idx = s_[pos_] - '0';
      if (idx >= nv_) fail("variable z" + std::to_string(idx) + " out of range");
      ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        fail("variable index out of range (z0..z9)");
      return ExactPoly::variable(nv_, idx);
    }
    if (c == 'i') {
      ++pos_;
      return ExactPoly::constant(nv_, GaussRational(Rational(0), Rational(1)));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      Rational value = number();
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        if (pos_ >= s_.size() ||
            !(std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
          fail("expected denominator");
        const Rational den = number();
        if (den == 0) fail("zero denominator");
        value /= den;
      }
      if (pos_ < s_.size() && s_[pos_] == 'i') {
        ++pos_;
        return ExactPoly::constant(nv_, GaussRational(Rational(0), value));
      }
      return ExactPoly::constant(nv_, GaussRational(value));
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  // Unsigned decimal with optional fraction and exponent, converted exactly.
  Rational number() {
    using boost::multiprecision::cpp_int;
    cpp_int mantissa = 0;
    int scale = 0;
    bool any = false;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      mantissa = mantissa * 10 + (s_[pos_++] - '0');
      any = true;
    }
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        mantissa = mantissa * 10 + (s_[pos_++] - '0');
        --scale;
        any = true;
      }
    }
    if (!any) fail("malformed number");
    if (pos_ + 1 < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      int sign = 1;
      if (s_[p] == '+' || s_[p] == '-') {
        sign = s_[p] == '-' ? -1 : 1;
        ++p;
      }
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        int e = 0;
        while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
          e = e * 10 + (s_[p++] - '0');
          if (e > 400) {
            pos_ = p;
            fail("exponent out of range");
          }
        }
        scale += sign * e;
        pos_ = p;
      }
    }
    Rational r(mantissa);
    const cpp_int ten_pow = boost::multiprecision::pow(cpp_int(10), std::abs(scale));
    if (scale >= 0) {
      r *= Rational(ten_pow);
    } else {
      r /= Rational(ten_pow);
    }
    return r;
  }

  const std::string& s_;
  int nv_;
  std::size_t pos_ = 0;
};

std::string monomial_text(const Exponent& e) {
  std::string out;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k] == 0) continue;
    if (!out.empty()) out += "*";
    out += "z" + std::to_string(k);
    if (e[k] > 1) out += "^" + std::to_string(e[k]);
  }
  return out;
}

std::string real_text(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

// Appends "coef*monomial" with the sign pulled out when the coefficient is
// purely real or purely imaginary.
template <class C, class RealFn>
std::string join_terms(const Polynomial<C>& p, RealFn split) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    auto [negative, body] = split(c);
    const std::string mono = monomial_text(e);
    std::string piece;
    if (mono.empty()) {
      piece = body;
    } else if (body == "1") {
      piece = mono;
    } else {
      piece = body + "*" + mono;
    }
    if (first) {
      out += negative ? "-" + piece : piece;
    } else {
      out += negative ? " - " + piece : " + " + piece;
    }
    first = false;
  }
  return out;
}

}  // namespace

ExactPoly parse_expression(const std::string& text, int num_vars) {
  if (num_vars < 1 || num_vars > 10) throw DimensionError("num_vars must be in 1..10");
  return Parser(text, num_vars).parse();
}

ExactHomogeneousPoly parse_exact(const std::string& text, int num_vars) {
  ExactPoly p = parse_expression(text, num_vars);
  if (!p.is_homogeneous())
    throw DimensionError("inhomogeneous polynomial: all monomials must share one total degree");
  return ExactHomogeneousPoly::from(std::move(p));
}

HomogeneousPoly parse_poly(const std::string& text, int num_vars) {
  return parse_exact(text, num_vars).to_complex();
}

std::string to_string(const ExactPoly& p) {
  return join_terms(p, [](const GaussRational& c) -> std::pair<bool, std::string> {
    if (c.im == 0) {
      const bool neg = c.re < 0;
      std::ostringstream os;
      os << boost::multiprecision::abs(c.re);
      return {neg, os.str()};
    }
    if (c.re == 0) {
      const bool neg = c.im < 0;
      std::ostringstream os;
      os << boost::multiprecision::abs(c.im) << "i";
      return {neg, os.str()};
    }
    return {false, to_string(c)};
  });
}

std::string to_string(const AffinePoly& p) {
  return join_terms(p, [](const Complex& c) -> std::pair<bool, std::string> {
    if (c.imag() == 0.0) return {c.real() < 0, real_text(std::fabs(c.real()))};
    if (c.real() == 0.0) return {c.imag() < 0, real_text(std::fabs(c.imag())) + "i"};
    return {false, "(" + real_text(c.real()) + (c.imag() < 0 ? "-" : "+") +
                       real_text(std::fabs(c.imag())) + "i)"};
  });
}

std::vector<Exponent> monomials_of_degree(int num_vars, int degree) {
  std::vector<Exponent> out;
  if (degree < 0 || num_vars < 1) return out;
  Exponent e(num_vars, 0);
  std::function<void(int, int)> rec = [&](int k, int left) {
    if (k == num_vars - 1) {
      e[k] = left;
      out.push_back(e);
      return;
    }
    for (int v = left; v >= 0; --v) {
      e[k] = v;
      rec(k + 1, left - v);
    }
  };
  rec(0, degree);
  return out;
}

}  // namespace rlab
