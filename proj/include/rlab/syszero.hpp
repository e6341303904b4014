#pragma once

// Isolated zeros of square polynomial systems in one affine chart, by
// total-degree homotopy continuation.

#include <cstdint>
#include <vector>

#include "rlab/polycore.hpp"
#include "rlab/projgeom.hpp"

namespace rlab {

struct ZeroCertificate {
  double residual = 0.0;    // max_i |f_i(p)| / (‖f_i‖₁ max(1,‖p‖∞)^{d_i})
  double abs_det_J = 0.0;
  double condition = 0.0;   // σ_max/σ_min of the Jacobian
  bool newton_contracts = false;
};

struct ZeroPoint {
  std::vector<Complex> w;
  ZeroCertificate cert;
  int multiplicity = 1;  // number of path endpoints merged into this point
};

struct ZeroSet {
  std::vector<ZeroPoint> points;     // certified simple zeros
  std::vector<ZeroPoint> defective;  // singular or clustered endpoints
  long bezout_count = 0;
  int paths_to_infinity = 0;
  int gamma_restarts = 0;

  /// Every path ended at a simple finite zero or diverged.
  bool complete() const;
};

struct SolveOptions {
  int threads = 1;
  double min_step = 1e-4;
  double max_step = 0.1;
  double cluster_radius = 1e-6;
  double residual_tol = 1e-10;
  int retry_budget = 3;
};

/// All isolated zeros of f (n polynomials in n affine variables, f_i of
/// degree ≤ degrees[i]). Deterministic in (f, degrees, seed) for any thread count.
ZeroSet solve_square_system(const std::vector<AffinePoly>& f, const std::vector<int>& degrees,
                            std::uint64_t seed, const SolveOptions& opts = {});

ZeroCertificate certify_zero(const std::vector<AffinePoly>& f, const std::vector<Complex>& p);

/// True iff the leading forms s_i(0, z_1..z_n) have no common zero on the
/// hyperplane at infinity, so that every zero of s lies in chart 0.
/// A leading form that vanishes identically also returns false.
bool zeros_at_infinity_check(const SectionSpec& s, std::uint64_t seed = 7);

/// Roots of Σ c_k x^k (coefficients lowest degree first), via companion
/// matrix eigenvalues plus Newton polishing. Leading zeros are dropped.
std::vector<Complex> univariate_roots(std::vector<Complex> coeffs);

}  // namespace rlab
