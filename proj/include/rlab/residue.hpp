#pragma once

// Local Grothendieck residues, the Euler-Jacobi vanishing sum and
// Cayley-Bacharach checks on P^2.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rlab/polycore.hpp"
#include "rlab/projgeom.hpp"
#include "rlab/syszero.hpp"

namespace rlab {

struct ResidueEntry {
  std::vector<Complex> w;  // chart-0 coordinates
  Complex value;
};

struct ResidueLedger {
  std::vector<ResidueEntry> entries;
  Complex total = 0.0;
  double abs_sum = 0.0;
  double relative_vanishing = 0.0;  // |total| / Σ|entry|

  static ResidueLedger from_entries(std::vector<ResidueEntry> entries);
};

/// (-1)^chart H_chart(w) / det(∂s_chart/∂w)(w). H may have any degree; only
/// the Instance overload insists on deg H = Σd_i - n - 1.
Complex local_residue(const SectionSpec& s, const HomogeneousPoly& H, int chart,
                      const std::vector<Complex>& w);
Complex local_residue(const Instance& inst, int chart, const std::vector<Complex>& w);

/// Ledger over every zero of s in chart 0. Throws PreconditionError when s has
/// zeros at infinity or non-simple zeros.
ResidueLedger global_residue_sum(const SectionSpec& s, const HomogeneousPoly& H,
                                 std::uint64_t seed, int threads = 1);

/// Chart-0 zeros of s with the preconditions of global_residue_sum checked.
ZeroSet simple_zeros(const SectionSpec& s, std::uint64_t seed, int threads = 1);

// ---------------------------------------------------------------------------
// Cayley-Bacharach.

/// Representative of a point with largest coordinate 1.
std::vector<Complex> unit_chart_representative(const ProjPoint& p);

/// |P(z)| / (‖coeffs‖₂ max(1,‖z‖)^m) at the largest-coordinate-1 representative.
double normalized_value(const HomogeneousPoly& P, const ProjPoint& p);

/// Basis of degree-m forms on P^2 vanishing at the points (SVD null space,
/// rank tolerance 1e-10 relative to σ_max).
std::vector<HomogeneousPoly> cb_vanishing_space(const std::vector<ProjPoint>& points, int m);

using ExactPoint = std::vector<GaussRational>;

/// Same over Q(i) by exact row reduction.
std::vector<ExactHomogeneousPoly> cb_vanishing_space_exact(const std::vector<ExactPoint>& points,
                                                           int m);

/// Rational homogeneous coordinates if every coordinate ratio is a fraction
/// with denominator ≤ max_den and the result is an exact common zero.
std::optional<ExactPoint> rationalize_point(const ProjPoint& p,
                                            const std::vector<ExactHomogeneousPoly>& must_vanish,
                                            long max_den = 1000000);

struct CBHeldOut {
  ProjPoint point;
  int space_dimension = 0;
  double max_normalized_value = 0.0;
};

struct CBReport {
  int d = 0, e = 0, m = 0;
  std::vector<ProjPoint> intersection;
  std::vector<CBHeldOut> held_out;     // one per intersection point
  double max_normalized_value = 0.0;   // over all held-out points
  double negative_control_value = 0.0; // one point replaced by a random point
  int negative_control_dimension = 0;
  bool exact_available = false;
  bool exact_all_zero = false;         // exact path: every basis form vanishes at p*
  double exact_float_agreement = 0.0;  // max |float - exact| over held-out values
  int coordinate_changes = 0;
};

struct CBOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  bool exact = false;  // try the Gaussian-rational path (f, g must be exact)
};

CBReport cayley_bacharach_verify(const HomogeneousPoly& f, const HomogeneousPoly& g,
                                 const CBOptions& opts);
CBReport cayley_bacharach_verify(const ExactHomogeneousPoly& f, const ExactHomogeneousPoly& g,
                                 const CBOptions& opts);

/// s = (f·u, g): zeros on the curve {f = 0} and points {u = g = 0}.
struct GeneralizedCBReport {
  int curve_side_zeros = 0;
  int point_zeros = 0;
  // ψ = f·φ with φ random of degree deg u + deg g - 3.
  double full_ledger_relative = 0.0;
  double point_ledger_relative = 0.0;
  double curve_entries_max = 0.0;  // max curve-side |residue| / Σ|point residues|
  // φ through all but the last point zero.
  int cb_space_dimension = 0;
  double cb_last_value = 0.0;  // normalized |φ(last)|, max over the basis
  // ψ of full degree, not divisible by f.
  double negative_point_ledger_relative = 0.0;
  std::string hypotheses;
};

GeneralizedCBReport generalized_cb_check(const HomogeneousPoly& f, const HomogeneousPoly& u,
                                         const HomogeneousPoly& g, std::uint64_t seed,
                                         int threads = 1);

}  // namespace rlab
