#pragma once

// Random generators shared by the property-style tests.

#include <random>
#include <vector>

#include "rlab/polycore.hpp"
#include "rlab/superalg.hpp"

namespace rlab::testing {

inline Complex random_complex(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng)};
}

inline std::vector<Complex> random_point(std::mt19937_64& rng, int dim, double scale = 1.0) {
  std::vector<Complex> z(dim);
  for (auto& v : z) v = random_complex(rng, scale);
  return z;
}

/// Dense random homogeneous polynomial with Gaussian complex coefficients.
inline HomogeneousPoly random_homogeneous(std::mt19937_64& rng, int num_vars, int degree) {
  AffinePoly p(num_vars);
  for (const auto& e : monomials_of_degree(num_vars, degree)) p.add_term(e, random_complex(rng));
  return {p, degree};
}

/// Dense random homogeneous polynomial with small integer coefficients.
inline ExactHomogeneousPoly random_integer_homogeneous(std::mt19937_64& rng, int num_vars,
                                                       int degree, int bound = 5) {
  std::uniform_int_distribution<int> u(-bound, bound);
  ExactPoly p(num_vars);
  for (const auto& e : monomials_of_degree(num_vars, degree))
    p.add_term(e, GaussRational(Rational(u(rng)), Rational(u(rng))));
  return {p, degree};
}

/// Random element of one (i,j,k,l) block of the fiber algebra.
inline SuperTensor random_block(std::mt19937_64& rng, int n, Block blk) {
  SuperTensor t(n);
  const int full = 1 << n;
  auto pc = [](int m) { return __builtin_popcount(static_cast<unsigned>(m)); };
  for (int I = 0; I < full; ++I) {
    if (pc(I) != blk.i) continue;
    for (int J = 0; J < full; ++J) {
      if (pc(J) != blk.j) continue;
      for (int K = 0; K < full; ++K) {
        if (pc(K) != blk.k) continue;
        for (int L = 0; L < full; ++L) {
          if (pc(L) != blk.l) continue;
          t.add(Basis{static_cast<std::uint8_t>(I), static_cast<std::uint8_t>(J),
                      static_cast<std::uint8_t>(K), static_cast<std::uint8_t>(L)},
                random_complex(rng));
        }
      }
    }
  }
  return t;
}

inline double max_abs_diff(const SuperTensor& a, const SuperTensor& b) {
  return (a - b).max_abs();
}

}  // namespace rlab::testing
