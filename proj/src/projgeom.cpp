#include "rlab/projgeom.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "rlab/errors.hpp"

namespace rlab {
namespace {

double rho(const std::vector<Complex>& w) {
  double r = 1.0;
  for (const auto& v : w) r += std::norm(v);
  return r;
}

}  // namespace

void BundleSpec::validate() const {
  if (n < 1 || n > 4) throw DimensionError("dimension n must be in 1..4");
  if (static_cast<int>(degrees.size()) != n)
    throw DimensionError("need exactly n line bundle degrees");
  for (int d : degrees)
    if (d < 1) throw DimensionError("line bundle degrees must be >= 1");
  if (psi_degree() < 0)
    throw DimensionError("sum of degrees must exceed n: deg psi = sum(d_i) - n - 1 = " +
                         std::to_string(psi_degree()) + " < 0 leaves no sections");
}

int BundleSpec::psi_degree() const {
  return std::accumulate(degrees.begin(), degrees.end(), 0) - n - 1;
}

long BundleSpec::bezout_number() const {
  long b = 1;
  for (int d : degrees) b *= d;
  return b;
}

int homogeneous_index(int chart, int j) { return j < chart ? j : j + 1; }

ProjPoint ProjPoint::from_homogeneous(std::vector<Complex> z) {
  if (z.empty()) throw DimensionError("empty homogeneous coordinates");
  int best = 0;
  for (int k = 1; k < static_cast<int>(z.size()); ++k)
    if (std::abs(z[k]) > std::abs(z[best])) best = k;
  if (std::abs(z[best]) == 0.0) throw DimensionError("zero vector is not a point of P^n");
  return {std::move(z), best};
}

ProjPoint ProjPoint::from_affine(int chart, const std::vector<Complex>& w) {
  const int n = static_cast<int>(w.size());
  if (chart < 0 || chart > n) throw DimensionError("chart index out of range");
  std::vector<Complex> z(n + 1);
  z[chart] = 1.0;
  for (int j = 0; j < n; ++j) z[homogeneous_index(chart, j)] = w[j];
  return from_homogeneous(std::move(z));
}

std::vector<Complex> ProjPoint::affine(int c) const {
  const int n = static_cast<int>(z.size()) - 1;
  if (c < 0 || c > n) throw DimensionError("chart index out of range");
  if (std::abs(z[c]) == 0.0) throw DimensionError("point is not in the requested chart");
  std::vector<Complex> w(n);
  for (int j = 0; j < n; ++j) w[j] = z[homogeneous_index(c, j)] / z[c];
  return w;
}

std::vector<Complex> ProjPoint::normalized() const {
  double s = 0.0;
  for (const auto& v : z) s += std::norm(v);
  s = std::sqrt(s);
  std::vector<Complex> out(z);
  for (auto& v : out) v /= s;
  return out;
}

ProjPoint sample_fubini_study(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> z(n + 1);
  for (auto& v : z) {
    const double re = g(rng);
    v = Complex(re, g(rng));
  }
  return ProjPoint::from_homogeneous(std::move(z));
}

double fubini_study_density(const std::vector<Complex>& w) {
  const int n = static_cast<int>(w.size());
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  return fact / std::pow(std::numbers::pi, n) * std::pow(rho(w), -(n + 1));
}

Instance::Instance(BundleSpec bundle, SectionSpec section, PsiSpec psi, MetricSpec metric)
    : bundle_(std::move(bundle)),
      section_(std::move(section)),
      psi_(std::move(psi)),
      metric_(std::move(metric)) {
  bundle_.validate();
  const int n = bundle_.n;
  if (static_cast<int>(section_.components.size()) != n)
    throw DimensionError("section must have n components");
  bool all_zero = true;
  for (int i = 0; i < n; ++i) {
    const auto& s = section_.components[i];
    if (s.num_vars() != n + 1) throw DimensionError("section component has wrong variable count");
    if (s.degree() != bundle_.degrees[i])
      throw DimensionError("section component " + std::to_string(i) + " has degree " +
                           std::to_string(s.degree()) + ", expected " +
                           std::to_string(bundle_.degrees[i]));
    all_zero = all_zero && s.is_zero();
  }
  if (all_zero) throw DimensionError("section is identically zero");
  if (psi_.H.num_vars() != n + 1) throw DimensionError("psi has wrong variable count");
  if (psi_.H.degree() != bundle_.psi_degree())
    throw DimensionError("psi must have degree sum(d_i) - n - 1 = " +
                         std::to_string(bundle_.psi_degree()) + ", got " +
                         std::to_string(psi_.H.degree()));
  if (metric_.kind == MetricKind::perturbed) {
    const auto& m = metric_;
    if (!(m.epsilon > 0.0)) throw DimensionError("perturbed metric needs epsilon > 0");
    if (m.pair_a < 0 || m.pair_a >= n || m.pair_b < 0 || m.pair_b >= n || m.pair_a == m.pair_b)
      throw DimensionError("perturbed metric pair must be two distinct summand indices");
    if (m.f_index < 0 || m.f_index >= n) throw DimensionError("f_index out of range");
    if (bundle_.degrees[m.f_index] != bundle_.degrees[m.pair_a])
      throw DimensionError("perturbation needs deg s_{f_index} = d_a");
    if (m.q.num_vars() != n + 1 || m.q.degree() != bundle_.degrees[m.pair_b])
      throw DimensionError("perturbation polynomial q must have degree d_b");
  }
  for (int c = 0; c <= n; ++c) build_chart(c);
  if (metric_.kind == MetricKind::perturbed) certify_metric();
}

void Instance::build_chart(int chart) {
  const int n = bundle_.n;
  ChartData cd;
  for (int i = 0; i < n; ++i) {
    cd.f.push_back(section_.components[i].dehomogenize(chart));
    std::vector<AffinePoly> row;
    for (int a = 0; a < n; ++a) row.push_back(cd.f.back().partial(a));
    cd.df.push_back(std::move(row));
  }
  cd.psi = psi_.H.dehomogenize(chart);

  auto derivatives = [n](const AffinePoly& p) {
    std::vector<AffinePoly> d;
    for (int a = 0; a < n; ++a) d.push_back(p.partial(a));
    return d;
  };
  const AffinePoly one = AffinePoly::constant(n, 1.0);
  for (int i = 0; i < n; ++i) {
    MetricEntry e{i, i, one, one, derivatives(one), derivatives(one), bundle_.degrees[i]};
    cd.entries.push_back(std::move(e));
  }
  if (metric_.kind == MetricKind::perturbed) {
    const int a = metric_.pair_a, b = metric_.pair_b;
    const AffinePoly q0 = Complex(metric_.epsilon) * metric_.q.dehomogenize(chart);
    const AffinePoly f0 = section_.components[metric_.f_index].dehomogenize(chart);
    const int m = bundle_.degrees[a] + bundle_.degrees[b];
    cd.entries.push_back({a, b, q0, f0, derivatives(q0), derivatives(f0), m});
    cd.entries.push_back({b, a, f0, q0, derivatives(f0), derivatives(q0), m});
  }
  charts_.push_back(std::move(cd));
}

void Instance::certify_metric() const {
  std::mt19937_64 rng(0x5eed);
  for (int trial = 0; trial < 1000; ++trial) {
    const ProjPoint p = sample_fubini_study(rng, bundle_.n);
    const CMatrix H = metric_matrix(p.chart, p.affine(p.chart));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw DimensionError("perturbed metric is not positive definite (epsilon too large)");
  }
}

CMatrix Instance::metric_matrix(int chart, const std::vector<Complex>& w) const {
  const int n = bundle_.n;
  const double r = rho(w);
  CMatrix H = CMatrix::Zero(n, n);
  for (const auto& e : charts_.at(chart).entries)
    H(e.row, e.col) += e.A.eval(w) * std::conj(e.B.eval(w)) * std::pow(r, -e.m);
  return H;
}

MetricJet Instance::metric_jet(int chart, const std::vector<Complex>& w) const {
  const int n = bundle_.n;
  const double r = rho(w);
  MetricJet jet;
  jet.H = CMatrix::Zero(n, n);
  jet.d.assign(n, CMatrix::Zero(n, n));
  jet.dbar.assign(n, CMatrix::Zero(n, n));
  jet.d_dbar.assign(n * n, CMatrix::Zero(n, n));
  for (const auto& e : charts_.at(chart).entries) {
    const Complex A = e.A.eval(w);
    const Complex Bc = std::conj(e.B.eval(w));
    std::vector<Complex> dA(n), dBc(n);
    for (int a = 0; a < n; ++a) {
      dA[a] = e.dA[a].eval(w);
      dBc[a] = std::conj(e.dB[a].eval(w));
    }
    const double m = e.m;
    const double r0 = std::pow(r, -m), r1 = std::pow(r, -m - 1), r2 = std::pow(r, -m - 2);
    jet.H(e.row, e.col) += A * Bc * r0;
    for (int a = 0; a < n; ++a) {
      jet.d[a](e.row, e.col) += dA[a] * Bc * r0 - m * A * Bc * std::conj(w[a]) * r1;
      jet.dbar[a](e.row, e.col) += A * dBc[a] * r0 - m * A * Bc * w[a] * r1;
    }
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        Complex v = dA[a] * dBc[b] * r0 - m * dA[a] * Bc * w[b] * r1 -
                    m * A * dBc[b] * std::conj(w[a]) * r1;
        v -= m * A * Bc * ((a == b ? r1 : 0.0) - (m + 1) * w[b] * std::conj(w[a]) * r2);
        jet.d_dbar[a * n + b](e.row, e.col) += v;
      }
    }
  }
  return jet;
}

CVector Instance::s_values(int chart, const std::vector<Complex>& w) const {
  const int n = bundle_.n;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = charts_.at(chart).f[i].eval(w);
  return v;
}

CMatrix Instance::ds(int chart, const std::vector<Complex>& w) const {
  const int n = bundle_.n;
  CMatrix J(n, n);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) J(i, a) = charts_.at(chart).df[i][a].eval(w);
  return J;
}

double Instance::s_norm2(int chart, const std::vector<Complex>& w) const {
  const CVector s = s_values(chart, w);
  const CMatrix H = metric_matrix(chart, w);
  // Σ_ij H_ij s_i conj(s_j)
  return std::real((s.transpose() * H * s.conjugate()).value());
}

SectionJet Instance::section_jet(int chart, const std::vector<Complex>& w) const {
  SectionJet j;
  j.value = s_values(chart, w);
  j.jacobian = ds(chart, w);
  const CMatrix H = metric_matrix(chart, w);
  j.norm2 = std::real((j.value.transpose() * H * j.value.conjugate()).value());
  return j;
}

SForm Instance::S_form(int chart, const std::vector<Complex>& w, double t) const {
  if (!(t > 0.0)) throw DimensionError("S_form requires t > 0");
  const int n = bundle_.n;
  const MetricJet jet = metric_jet(chart, w);
  const CVector s = s_values(chart, w);
  const CMatrix J = ds(chart, w);
  const double norm2 = std::real((s.transpose() * jet.H * s.conjugate()).value());
  const CVector sbar = s.conjugate();
  SuperTensor one(n);
  for (int i = 0; i < n; ++i) {
    for (int b = 0; b < n; ++b) {
      // ∂̄_b ⟨·,s⟩_i = Σ_j ∂̄_b H_ij conj(s_j) + H_ij conj(∂_b s_j)
      Complex x = 0.0;
      for (int j = 0; j < n; ++j) x += jet.dbar[b](i, j) * sbar(j) + jet.H(i, j) * std::conj(J(j, b));
      one.add(Basis{0, static_cast<std::uint8_t>(1u << b), 0, static_cast<std::uint8_t>(1u << i)},
              -x / (2.0 * t));
    }
  }
  return SForm(Complex(-norm2 / (2.0 * t)), std::move(one));
}

CurvatureValue Instance::chern_curvature(int chart, const std::vector<Complex>& w) const {
  const int n = bundle_.n;
  const MetricJet jet = metric_jet(chart, w);
  // Connection matrix θ = G^{-1} ∂G with G = H^T (∇e_j = Σ_i θ_ij e_i).
  const CMatrix G = jet.H.transpose();
  const Eigen::PartialPivLU<CMatrix> lu(G);
  CurvatureValue R(n);
  for (int a = 0; a < n; ++a) {
    const CMatrix GinvDa = lu.solve(CMatrix(jet.d[a].transpose()));
    for (int b = 0; b < n; ++b) {
      const CMatrix GinvDbarB = lu.solve(CMatrix(jet.dbar[b].transpose()));
      const CMatrix GinvDD = lu.solve(CMatrix(jet.d_dbar[a * n + b].transpose()));
      R.form_block(a, b) = GinvDbarB * GinvDa - GinvDD;
    }
  }
  return R;
}

Complex Instance::psi_coefficient(int chart, const std::vector<Complex>& w) const {
  const Complex h = charts_.at(chart).psi.eval(w);
  return chart % 2 == 0 ? h : -h;
}

SuperTensor Instance::psi_tensor(int chart, const std::vector<Complex>& w) const {
  const int n = bundle_.n;
  const auto all = static_cast<std::uint8_t>((1u << n) - 1u);
  return SuperTensor::basis(n, Basis{all, 0, all, 0}, psi_coefficient(chart, w));
}

Complex Instance::top_form(int chart, const std::vector<Complex>& w, double t) const {
  return top_pairing(psi_tensor(chart, w), exp_S(S_form(chart, w, t)));
}

CurveInstance::CurveInstance(Instance inst) : inst_(std::move(inst)) {
  if (inst_.n() != 2) throw DimensionError("curve instances live on P^2");
  if (!inst_.section().components[1].is_zero())
    throw DimensionError("curve instance needs section (f, 0)");
  if (inst_.section().components[0].is_zero()) throw DimensionError("curve polynomial is zero");
  if (inst_.metric().kind == MetricKind::perturbed && inst_.metric().f_index != 0)
    throw DimensionError("curve instance perturbation must vanish on Z (f_index = 0)");
}

double CurveInstance::curve_residual(int chart, const std::vector<Complex>& w) const {
  const auto& f = inst_.chart_component(chart, 0);
  double scale = 1.0;
  for (const auto& v : w) scale = std::max(scale, std::abs(v));
  return std::abs(f.eval(w)) /
         (f.coefficient_l1() * std::pow(scale, curve().degree()));
}

void CurveInstance::require_on_curve(int chart, const std::vector<Complex>& w) const {
  if (curve_residual(chart, w) > 1e-8) throw PreconditionError("point is not on the curve Z");
}

std::vector<Complex> CurveInstance::tangent(int chart, const std::vector<Complex>& w) const {
  const CMatrix J = inst_.ds(chart, w);
  return {J(0, 1), -J(0, 0)};
}

std::vector<Complex> CurveInstance::normal(int chart, const std::vector<Complex>& w) const {
  const CMatrix J = inst_.ds(chart, w);
  const double g2 = std::norm(J(0, 0)) + std::norm(J(0, 1));
  if (g2 < 1e-24) throw PreconditionError("ds is not injective on the normal direction (singular point of Z)");
  return {std::conj(J(0, 0)) / g2, std::conj(J(0, 1)) / g2};
}

Complex CurveInstance::curvature_offdiag(int chart, const std::vector<Complex>& w,
                                         const std::vector<Complex>& x,
                                         const std::vector<Complex>& y) const {
  const CurvatureValue R = inst_.chern_curvature(chart, w);
  Complex v = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) v += R(0, 1, a, b) * x[a] * std::conj(y[b]);
  return v;
}

Complex CurveInstance::R_Vi_s(int chart, const std::vector<Complex>& w,
                              const std::vector<Complex>& tau) const {
  require_on_curve(chart, w);
  const auto nu = normal(chart, w);
  // (ds)^{-1} sends the e_1 component c to c·ν, so the End N_i scalar is -c.
  return -curvature_offdiag(chart, w, nu, tau);
}

Complex CurveInstance::psi_over_det_ds(int chart, const std::vector<Complex>& w,
                                       const std::vector<Complex>& tau) const {
  require_on_curve(chart, w);
  const auto nu = normal(chart, w);
  // (dw_1∧dw_2)(τ, ν) with df(ν) = 1.
  return inst_.psi_coefficient(chart, w) * (tau[0] * nu[1] - tau[1] * nu[0]);
}

}  // namespace rlab
