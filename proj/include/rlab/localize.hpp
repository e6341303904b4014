#pragma once

// Monte Carlo checks of the integral representation of the virtual residue
// and of the curvature-corrected curve term.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "rlab/projgeom.hpp"
#include "rlab/superalg.hpp"

namespace rlab {

struct IntegralEstimate {
  Complex value = 0.0;
  double std_error = 0.0;
  long samples = 0;
  double t = 0.0;
  std::uint64_t seed = 0;
  double l1_mass = 0.0;  // L¹ mass of the integrand (mean |sample| unless the sampler says otherwise)
  double max_abs = 0.0;  // max |sample|
  long rejections = 0;
};

struct CurveTerm {
  IntegralEstimate estimate;
  int component = 0;
  double max_pointwise = 0.0;  // max |(1,1) coefficient| over visited curve points
  int sheets = 0;
};

/// (-1)^{n(n-1)/2}: the sign relating dw_1..dw_n dw̄_1..dw̄_n to Π dw_k∧dw̄_k.
/// With the conventions here a simple zero contributes sign·h/det J.
int orientation_sign(int n);

/// (-1)^n/(2πi)^n.
Complex residue_prefactor(int n);

// ---------------------------------------------------------------------------
// Deterministic parallel sampling: samples are processed in chunks of
// kChunk; chunk c draws from its own mt19937_64 seeded by (seed, c) and
// chunk results are reduced in index order, so the result does not depend on
// the thread count.

inline constexpr long kChunk = 512;

struct SampleStats {
  Complex mean = 0.0;
  double std_error = 0.0;
  double l1_mass = 0.0;
  double max_abs = 0.0;
  double max_aux = 0.0;
  long samples = 0;
  long rejections = 0;
};

struct SampleContext {
  std::mt19937_64& rng;
  long rejections = 0;
  double aux = 0.0;  // running max of a caller-defined pointwise quantity
  // When set (≥ 0) by the callback, replaces |sample| in the L¹ mass; used
  // when a sample is a sum of terms whose absolute values should be counted.
  double sample_abs = -1.0;
};

using SampleFn = std::function<Complex(SampleContext&)>;
SampleStats parallel_sample(long samples, std::uint64_t seed, int threads, const SampleFn& fn);

// ---------------------------------------------------------------------------

/// ((-1)^n/(2πi)^n) ∫_{P^n} ψ⌟e^{S/2t} by FS-uniform sampling.
IntegralEstimate virtual_residue_mc(const Instance& inst, double t, long samples,
                                    std::uint64_t seed, int threads = 1);

/// Same integrand restricted to the chart ball |w - center| < radius, sampled
/// uniformly. `zeros` are all zeros in the chart; another zero closer than
/// 2·radius is an overlapping ball.
IntegralEstimate local_mass(const Instance& inst, int chart, const std::vector<Complex>& center,
                            const std::vector<std::vector<Complex>>& zeros, double t,
                            double radius, long samples, std::uint64_t seed, int threads = 1);

/// Flat model on C^n: h ≡ 1, s = w, ψ = dw_1..dw_n ⊗ e_1..e_n. Canonical (n,n)
/// coefficient of ψ⌟e^{S/2t} at w.
Complex flat_model_top_form(int n, double t, const std::vector<Complex>& w);

/// Prefactor·∫_{|w|<radius} of the flat 1-D model by polar Gauss-Legendre
/// quadrature (64 radial nodes); std_error is the difference to the 32-node rule.
IntegralEstimate flat_local_mass(double t, double radius);

/// (-2πi)(1 - a dw̄⊗e^1) in the rank-1 fiber algebra.
SuperTensor det_N_inverse_term(Complex a);

/// True when {f = 0} ⊂ P^2 has no singular point (checked after a random
/// coordinate change). Throws NumericalFailure when undecidable.
bool certify_smooth_curve(const HomogeneousPoly& f, std::uint64_t seed = 11);

/// ∫_Z (ψ/det ds)⌟(-2πi)(1 - R^{V_i}_s) by sheeted quadrature over the
/// FS-distributed w_1 line.
CurveTerm curve_localized_term(const CurveInstance& c, long base_samples, std::uint64_t seed,
                               int threads = 1);

/// The (1,1) coefficient c (along dw_1∧dw̄_1 on Z) at a curve point in chart 0
/// and the sheet contribution c·(-2i)/density. Exposed for tests.
struct CurvePointValue {
  Complex coefficient;
  Complex g;  // ψ/det ds on ∂/∂w_1
  Complex a;  // R^{V_i}_s on ∂/∂w_1
};
CurvePointValue curve_point_value(const CurveInstance& c, const std::vector<Complex>& w);

/// c(τ) = contract(g(τ) dτ⊗e, (-2πi)(1 - a(τ) dτ̄⊗e^1)) at a curve point of any
/// chart; sesquilinear in τ, so c(τ) dτ∧dτ̄ is chart independent.
Complex curve_form_on(const CurveInstance& c, int chart, const std::vector<Complex>& w,
                      const std::vector<Complex>& tau);

/// Roots w_2 of f(w_1, ·) in chart 0.
std::vector<Complex> curve_sheets(const AffinePoly& f_chart0, Complex w1);

}  // namespace rlab
