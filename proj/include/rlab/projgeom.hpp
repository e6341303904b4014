#pragma once

// (P^n, V = ⊕ O(d_i), h, s, ψ) in affine charts.
//
// Chart U_α has coordinates w_j = z_j / z_α (j ≠ α, increasing). A degree-d
// section F is F(z)/z_α^d in the chart frame. ψ ∈ Γ(K ⊗ det V) of degree
// D = Σd_i - n - 1 is  (-1)^α H(z)/z_α^D  dw_1∧…∧dw_n ⊗ e_1∧…∧e_n  on U_α.

#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rlab/polycore.hpp"
#include "rlab/superalg.hpp"

namespace rlab {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct BundleSpec {
  int n = 0;
  std::vector<int> degrees;

  void validate() const;
  /// deg ψ = Σ d_i - n - 1.
  int psi_degree() const;
  long bezout_number() const;
};

struct SectionSpec {
  std::vector<HomogeneousPoly> components;
};

struct PsiSpec {
  HomogeneousPoly H;
};

enum class MetricKind { fubini_study, perturbed };

struct MetricSpec {
  MetricKind kind = MetricKind::fubini_study;
  double epsilon = 0.0;
  int pair_a = 0;  // summand carrying conj(f)
  int pair_b = 1;
  HomogeneousPoly q;  // degree d_b
  int f_index = 0;    // s_{f_index} defines the perturbation's zero set

  static MetricSpec fubini_study() { return {}; }
};

/// Point of P^n with its preferred chart (largest |z_j|).
struct ProjPoint {
  std::vector<Complex> z;
  int chart = 0;

  static ProjPoint from_homogeneous(std::vector<Complex> z);
  static ProjPoint from_affine(int chart, const std::vector<Complex>& w);
  /// Affine coordinates in `chart`; throws if z_chart = 0.
  std::vector<Complex> affine(int chart) const;
  /// Representative with unit Euclidean norm.
  std::vector<Complex> normalized() const;
};

/// Homogeneous index of affine coordinate j in chart α.
int homogeneous_index(int chart, int j);

/// h, ∂h, ∂̄h, ∂∂̄h at one chart point (entries H_ij = ⟨e_i, e_j⟩).
struct MetricJet {
  CMatrix H;
  std::vector<CMatrix> d;       // d[a]    = ∂H/∂w_a
  std::vector<CMatrix> dbar;    // dbar[b] = ∂H/∂w̄_b
  std::vector<CMatrix> d_dbar;  // d_dbar[a*n+b] = ∂²H/∂w_a∂w̄_b
};

struct SectionJet {
  CVector value;     // s_i(w)
  CMatrix jacobian;  // ∂s_i/∂w_a
  double norm2 = 0;  // |s|² = Σ H_ij s_i conj(s_j)
};

/// Chern curvature (1,1)-form: component e_i ⊗ e^j along dw_a ∧ dw̄_b, i.e.
/// R(∂_a, ∂̄_b) e_j = Σ_i R(i, j, a, b) e_i.
class CurvatureValue {
 public:
  explicit CurvatureValue(int n) : n_(n), blocks_(n * n, CMatrix::Zero(n, n)) {}
  int n() const { return n_; }
  Complex operator()(int i, int j, int a, int b) const { return blocks_[a * n_ + b](i, j); }
  CMatrix& form_block(int a, int b) { return blocks_[a * n_ + b]; }
  const CMatrix& form_block(int a, int b) const { return blocks_[a * n_ + b]; }

 private:
  int n_;
  std::vector<CMatrix> blocks_;
};

/// The instantiated data (P^n, V, h, s, ψ) with per-chart dehomogenizations.
class Instance {
 public:
  Instance(BundleSpec bundle, SectionSpec section, PsiSpec psi, MetricSpec metric);

  int n() const { return bundle_.n; }
  const BundleSpec& bundle() const { return bundle_; }
  const SectionSpec& section() const { return section_; }
  const PsiSpec& psi() const { return psi_; }
  const MetricSpec& metric() const { return metric_; }

  CMatrix metric_matrix(int chart, const std::vector<Complex>& w) const;
  MetricJet metric_jet(int chart, const std::vector<Complex>& w) const;
  SectionJet section_jet(int chart, const std::vector<Complex>& w) const;

  /// Chart components f_i(w) and the Jacobian ∂f_i/∂w_a.
  CVector s_values(int chart, const std::vector<Complex>& w) const;
  CMatrix ds(int chart, const std::vector<Complex>& w) const;
  double s_norm2(int chart, const std::vector<Complex>& w) const;

  /// S/(2t) with S = -(|s|² + ∂̄⟨·,s⟩).
  SForm S_form(int chart, const std::vector<Complex>& w, double t) const;

  CurvatureValue chern_curvature(int chart, const std::vector<Complex>& w) const;

  /// Coefficient of dw_1∧…∧dw_n ⊗ e_1∧…∧e_n in ψ on the chart (sign included).
  Complex psi_coefficient(int chart, const std::vector<Complex>& w) const;
  SuperTensor psi_tensor(int chart, const std::vector<Complex>& w) const;

  /// Canonical (n,n) coefficient of ψ⌟e^{S/2t}.
  Complex top_form(int chart, const std::vector<Complex>& w, double t) const;

  const AffinePoly& chart_component(int chart, int i) const { return charts_[chart].f[i]; }
  const AffinePoly& chart_psi(int chart) const { return charts_[chart].psi; }

 private:
  // One metric entry A(w) conj(B(w)) (1+|w|²)^{-m}; A, B holomorphic.
  struct MetricEntry {
    int row = 0, col = 0;
    AffinePoly A, B;
    std::vector<AffinePoly> dA, dB;
    int m = 0;
  };
  struct ChartData {
    std::vector<AffinePoly> f;
    std::vector<std::vector<AffinePoly>> df;  // df[i][a]
    AffinePoly psi;
    std::vector<MetricEntry> entries;
  };

  void build_chart(int chart);
  void certify_metric() const;

  BundleSpec bundle_;
  SectionSpec section_;
  PsiSpec psi_;
  MetricSpec metric_;
  std::vector<ChartData> charts_;
};

/// FS-uniform point of P^n from a standard complex Gaussian in C^{n+1}.
ProjPoint sample_fubini_study(std::mt19937_64& rng, int n);

/// Density of the FS probability measure against Lebesgue measure
/// Π dx_k dy_k of an affine chart: n!/π^n (1+|w|²)^{-(n+1)}.
double fubini_study_density(const std::vector<Complex>& w);

/// Curve instance on P²: V = O(d) ⊕ O(k), s = (f, 0), Z = {f = 0}.
/// V_i is the O(k) summand; Im ds is the O(d) summand.
class CurveInstance {
 public:
  explicit CurveInstance(Instance inst);

  const Instance& instance() const { return inst_; }
  const HomogeneousPoly& curve() const { return inst_.section().components[0]; }

  /// Tangent direction of Z at w (∂f/∂w_2, -∂f/∂w_1) in chart coordinates.
  std::vector<Complex> tangent(int chart, const std::vector<Complex>& w) const;
  /// Normal representative ν with df(ν) = 1 (orthogonal to the tangent in
  /// chart coordinates).
  std::vector<Complex> normal(int chart, const std::vector<Complex>& w) const;

  /// R^{V_i}_s = -(ds)^{-1} P^{Im ds} R(·, j_*·) P^{V_i}, evaluated on τ̄:
  /// the scalar a with R^{V_i}_s(τ̄) = a · e^{V_i} ⊗ id_N.
  Complex R_Vi_s(int chart, const std::vector<Complex>& w, const std::vector<Complex>& tau) const;

  /// P^{Im ds} R(x, ȳ) P^{V_i} for arbitrary holomorphic vectors x, y.
  Complex curvature_offdiag(int chart, const std::vector<Complex>& w,
                            const std::vector<Complex>& x, const std::vector<Complex>& y) const;

  /// ψ/det ds ∈ K_Z ⊗ det V_i evaluated on the tangent vector τ, in the
  /// chart frame of V_i.
  Complex psi_over_det_ds(int chart, const std::vector<Complex>& w,
                          const std::vector<Complex>& tau) const;

  /// |f| / (‖f‖₁ max(1,|w|)^d): zero on Z.
  double curve_residual(int chart, const std::vector<Complex>& w) const;

 private:
  void require_on_curve(int chart, const std::vector<Complex>& w) const;
  Instance inst_;
};

}  // namespace rlab
