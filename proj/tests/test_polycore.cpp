#include <random>

#include "doctest.h"
#include "rlab/polycore.hpp"
#include "test_support.hpp"

using namespace rlab;
using rlab::testing::random_complex;
using rlab::testing::random_homogeneous;
using rlab::testing::random_integer_homogeneous;
using rlab::testing::random_point;

namespace {

double rel_err(Complex a, Complex b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("parse_poly reads the grammar into canonical terms") {
  const auto p = parse_poly("z0^2 + z1*z2", 3);
  CHECK(p.degree() == 2);
  CHECK(p.terms().size() == 2);
  CHECK(p.poly().coefficient({2, 0, 0}) == Complex(1.0));
  CHECK(p.poly().coefficient({0, 1, 1}) == Complex(1.0));

  const auto zero = parse_poly("z0 - z0", 2);
  CHECK(zero.is_zero());
  CHECK(zero.terms().empty());
}

TEST_CASE("parse_poly complex and rational literals") {
  const auto p = parse_exact("(1/2+3i)*z0 - 2.5i*z1 + 3/4*z2", 3);
  CHECK(p.poly().coefficient({1, 0, 0}) == GaussRational(Rational(1, 2), Rational(3)));
  CHECK(p.poly().coefficient({0, 1, 0}) == GaussRational(Rational(0), Rational(-5, 2)));
  CHECK(p.poly().coefficient({0, 0, 1}) == GaussRational(Rational(3, 4)));
  const auto q = parse_exact("i*z0*z1 + -(z1)^2", 2);
  CHECK(q.poly().coefficient({1, 1}) == GaussRational(Rational(0), Rational(1)));
  CHECK(q.poly().coefficient({0, 2}) == GaussRational(Rational(-1)));
  CHECK(parse_exact("1.25e-1*z0", 1).poly().coefficient({1}) == GaussRational(Rational(1, 8)));
}

TEST_CASE("parse_poly errors") {
  CHECK_THROWS_AS(parse_poly("z0^2 + z1", 2), DimensionError);
  CHECK_THROWS_AS(parse_poly("z0 + z3", 3), ParseError);
  CHECK_THROWS_AS(parse_poly("z0 + * z1", 2), ParseError);
  CHECK_THROWS_AS(parse_poly("(z0 + z1", 2), ParseError);
  CHECK_THROWS_AS(parse_poly("z0^-1", 2), ParseError);
  try {
    parse_poly("z0 + $", 2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
}

TEST_CASE("parse -> print -> parse round trip") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int nv = 2 + trial % 3;
    const auto p = random_integer_homogeneous(rng, nv, 1 + trial % 4);
    const auto back = parse_exact(to_string(p), nv);
    CHECK(back == p);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_homogeneous(rng, 3, 3);
    const auto back = parse_poly(to_string(p), 3);
    CHECK(back == p);
  }
}

TEST_CASE("eval examples and homogeneity") {
  const auto p = parse_poly("z0*z1", 2);
  CHECK(p.eval(std::vector<Complex>{2.0, 3.0}) == Complex(6.0));
  const auto q = parse_poly("z0^2 + z1^2", 2);
  CHECK(std::abs(q.eval(std::vector<Complex>{Complex(0, 1), 1.0})) == 0.0);
  CHECK_THROWS_AS(q.eval(std::vector<Complex>{1.0}), DimensionError);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int deg = trial % 6;
    const auto r = random_homogeneous(rng, 3, deg);
    auto z = random_point(rng, 3);
    const Complex lambda = random_complex(rng);
    auto lz = z;
    for (auto& v : lz) v *= lambda;
    const Complex lhs = r.eval(lz);
    const Complex rhs = std::pow(lambda, deg) * r.eval(z);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)) * 10);
  }
}

TEST_CASE("partial derivative examples and Euler identity") {
  const auto p = parse_poly("z0^3", 2);
  CHECK(p.partial(0) == parse_poly("3*z0^2", 2));
  CHECK(parse_poly("z1^2", 2).partial(0).is_zero());
  CHECK_THROWS_AS(p.partial(2), DimensionError);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int deg = 1 + trial % 5;
    const auto r = random_homogeneous(rng, 3, deg);
    const auto z = random_point(rng, 3);
    Complex euler = 0.0;
    for (int k = 0; k < 3; ++k) euler += z[k] * r.partial(k).eval(z);
    CHECK(rel_err(euler, double(deg) * r.eval(z)) <= 1e-11);
  }
}

TEST_CASE("dehomogenize follows F(z)/z_a^deg") {
  const auto p = parse_poly("z0^2 + z1^2", 2);
  CHECK(p.dehomogenize(0) == parse_expression("1 + z0^2", 1).to_complex());
  const auto q = parse_poly("z1", 2);
  CHECK(q.dehomogenize(1) == AffinePoly::constant(1, 1.0));
  CHECK_THROWS_AS(q.dehomogenize(2), DimensionError);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = random_homogeneous(rng, 3, 3);
    const auto w = random_point(rng, 2);
    for (int chart = 0; chart < 3; ++chart) {
      std::vector<Complex> z;
      for (int k = 0, j = 0; k < 3; ++k) z.push_back(k == chart ? Complex(1.0) : w[j++]);
      CHECK(rel_err(r.dehomogenize(chart).eval(w), r.eval(z)) <= 1e-12);
    }
  }
}

TEST_CASE("ring laws: exact and floating") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_integer_homogeneous(rng, 3, 2).poly();
    const auto q = random_integer_homogeneous(rng, 3, 2).poly();
    const auto r = random_integer_homogeneous(rng, 3, 1).poly();
    CHECK((p + q) * r == p * r + q * r);
  }
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_homogeneous(rng, 3, 2).poly();
    const auto q = random_homogeneous(rng, 3, 2).poly();
    const auto r = random_homogeneous(rng, 3, 2).poly();
    const auto z = random_point(rng, 3);
    const Complex lhs = ((p + q) * r).eval(z);
    const Complex rhs = (p * r + q * r).eval(z);
    CHECK(rel_err(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("compose substitutes variables") {
  const auto p = parse_expression("z0^2 + z0*z1", 2);
  // z0 -> z0 + z1, z1 -> z0 - z1  gives 2*z0^2 + 2*z0*z1
  const std::vector<ExactPoly> subs{parse_expression("z0 + z1", 2), parse_expression("z0 - z1", 2)};
  CHECK(p.compose(subs) == parse_expression("2*z0^2 + 2*z0*z1", 2));
}

TEST_CASE("rationalize recovers small fractions") {
  CHECK(rationalize(0.75, 1000) == Rational(3, 4));
  CHECK(rationalize(-1.0 / 3.0, 1000) == Rational(-1, 3));
  CHECK(rationalize(2.0, 10) == Rational(2));
}
