#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rlab/errors.hpp"
#include "rlab/localize.hpp"
#include "rlab/residue.hpp"
#include "test_support.hpp"

using namespace rlab;
using rlab::testing::random_complex;
using Pt = std::vector<Complex>;

namespace {

Instance fs_instance(int n, std::vector<int> degrees, std::vector<std::string> s, std::string psi) {
  SectionSpec sec;
  for (const auto& e : s) sec.components.push_back(parse_poly(e, n + 1));
  return Instance(BundleSpec{n, degrees}, sec, PsiSpec{parse_poly(psi, n + 1)}, MetricSpec::fubini_study());
}

Instance p1_o2() { return fs_instance(1, {2}, {"z1^2 - z0^2"}, "1"); }

// V = O(3) ⊕ O(2) on P², s = (f, 0) with a smooth cubic f.
CurveInstance cubic_curve(double eps) {
  SectionSpec sec{{parse_poly("z1^3 + z2^3 - z0^3 + z0*z1*z2", 3), HomogeneousPoly(AffinePoly(3), 2)}};
  MetricSpec m;
  if (eps > 0) {
    m.kind = MetricKind::perturbed;
    m.epsilon = eps;
    m.q = parse_poly("z0*z1 + z2^2", 3);
  }
  return CurveInstance(Instance(BundleSpec{2, {3, 2}}, sec, PsiSpec{parse_poly("z0*z1 + z2^2", 3)}, m));
}

Pt point_on(const AffinePoly& f, std::mt19937_64& rng) {
  for (;;) {
    const Complex w1 = random_complex(rng, 0.8);
    for (const auto& w2 : curve_sheets(f, w1))
      if (std::abs(w2) < 3.0 && std::abs(f.partial(1).eval(Pt{w1, w2})) > 1e-2) return {w1, w2};
  }
}

// ∂w^β/∂w^α at the point with chart-α coordinates w.
CMatrix chart_jacobian(int alpha, int beta, const Pt& w) {
  const int n = static_cast<int>(w.size());
  std::vector<Complex> z(n + 1);
  z[alpha] = 1.0;
  for (int j = 0; j < n; ++j) z[homogeneous_index(alpha, j)] = w[j];
  CMatrix dz = CMatrix::Zero(n + 1, n);
  for (int j = 0; j < n; ++j) dz(homogeneous_index(alpha, j), j) = 1.0;
  CMatrix J(n, n);
  for (int i = 0; i < n; ++i) {
    const int k = homogeneous_index(beta, i);
    for (int j = 0; j < n; ++j) J(i, j) = dz(k, j) / z[beta] - z[k] * dz(beta, j) / (z[beta] * z[beta]);
  }
  return J;
}

}  // namespace

TEST_CASE("orientation sign and prefactor") {
  CHECK(orientation_sign(1) == 1);
  CHECK(orientation_sign(2) == -1);
  CHECK(orientation_sign(3) == -1);
  CHECK(orientation_sign(4) == 1);
  const Complex p1 = residue_prefactor(1);
  CHECK(std::abs(p1 - Complex(0.0, 1.0 / (2 * std::numbers::pi))) < 1e-16);
  CHECK(std::abs(residue_prefactor(2) - Complex(-1.0 / (4 * std::numbers::pi * std::numbers::pi))) < 1e-16);
}

TEST_CASE("flat model: unit mass by quadrature and sign in every dimension") {
  for (double t : {0.1, 1.0}) {
    const auto e = flat_local_mass(t, 12.0 * std::sqrt(t));
    CHECK(std::abs(e.value - 1.0) < 1e-10);
    CHECK(e.std_error < 1e-10);
  }
  // Against a Gaussian density the ratio is constant, so one point gives the
  // whole integral: prefactor·(-1)^{n(n-1)/2}(-2i)^n·top/density = sign(n).
  std::mt19937_64 rng(80);
  for (int n = 1; n <= 4; ++n) {
    const double t = 0.3;
    Pt w(n);
    double r2 = 0;
    for (auto& v : w) {
      v = random_complex(rng, 0.5);
      r2 += std::norm(v);
    }
    const double density = std::exp(-r2 / (2 * t)) / std::pow(2 * std::numbers::pi * t, n);
    Complex lf = double(orientation_sign(n));
    for (int k = 0; k < n; ++k) lf *= Complex(0.0, -2.0);
    const Complex v = residue_prefactor(n) * lf * flat_model_top_form(n, t, w) / density;
    CHECK(std::abs(v - double(orientation_sign(n))) < 1e-12);
  }
  CHECK_THROWS_AS(flat_local_mass(0.0, 1.0), DimensionError);
}

TEST_CASE("parallel_sample is deterministic across thread counts") {
  auto fn = [](SampleContext& ctx) {
    std::normal_distribution<double> g;
    const double a = g(ctx.rng);
    return Complex(a, g(ctx.rng) * a);
  };
  const auto a = parallel_sample(10007, 3, 1, fn);
  const auto b = parallel_sample(10007, 3, 5, fn);
  CHECK(a.samples == 10007);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  const auto c = parallel_sample(10007, 4, 5, fn);
  CHECK(c.mean != a.mean);
  // Standard normal real part: mean within a few standard errors of 0.
  CHECK(std::abs(a.mean.real()) < 5.0 / std::sqrt(10007.0));

  const auto inst = p1_o2();
  const auto x = virtual_residue_mc(inst, 0.5, 3000, 11, 1);
  const auto y = virtual_residue_mc(inst, 0.5, 3000, 11, 3);
  CHECK(x.value == y.value);
}

TEST_CASE("virtual_residue_mc vanishes on P^1 O(2) for every t") {
  const auto inst = p1_o2();
  for (double t : {0.5, 1.0, 2.0}) {
    const auto e = virtual_residue_mc(inst, t, 40000, 21, 4);
    CHECK(e.t == t);
    CHECK(e.samples == 40000);
    CHECK(std::abs(e.value) <= 3.0 * e.std_error + 1e-15);
    CHECK(e.std_error <= 0.05);
  }
  CHECK_THROWS_AS(virtual_residue_mc(inst, 0.0, 40000, 1), DimensionError);
  CHECK_THROWS_AS(virtual_residue_mc(inst, 1.0, 999, 1), DimensionError);
}

TEST_CASE("virtual_residue_mc: 3 sigma coverage over seeds") {
  const auto inst = fs_instance(2, {2, 2}, {"z1^2 - z0^2", "z2^2 - z0^2 + z0*z1"}, "z0 + z1 + 2*z2");
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto e = virtual_residue_mc(inst, 1.0, 4000, seed, 4);
    if (std::abs(e.value) <= 3.0 * e.std_error) ++covered;
  }
  CHECK(covered >= 9);
}

TEST_CASE("local masses on P^1 O(2) are the residues") {
  const auto inst = p1_o2();
  const std::vector<Pt> zeros{{1.0}, {-1.0}};
  const auto plus = local_mass(inst, 0, {1.0}, zeros, 0.01, 0.5, 60000, 31, 4);
  const auto minus = local_mass(inst, 0, {-1.0}, zeros, 0.01, 0.5, 60000, 32, 4);
  CHECK(std::abs(plus.value - 0.5) <= 0.05 * 0.5);
  CHECK(std::abs(minus.value + 0.5) <= 0.05 * 0.5);
  CHECK(std::abs(plus.value + minus.value) <= 3.0 * std::hypot(plus.std_error, minus.std_error) + 0.01);
  CHECK_THROWS_AS(local_mass(inst, 0, {1.0}, zeros, 0.01, 1.5, 60000, 1), PreconditionError);
  CHECK_THROWS_AS(local_mass(inst, 0, {1.0, 0.0}, zeros, 0.01, 0.5, 60000, 1), DimensionError);
}

TEST_CASE("local mass on P^2 carries the orientation sign") {
  const auto inst = fs_instance(2, {2, 2}, {"z1^2 - z0^2", "z2^2 - z0^2"}, "z0 + z1 + 2*z2");
  const auto ledger = global_residue_sum(inst.section(), inst.psi().H, 3);
  std::vector<Pt> zeros;
  for (const auto& e : ledger.entries) zeros.push_back(e.w);
  const auto& z = ledger.entries.front();
  const auto m = local_mass(inst, 0, z.w, zeros, 2e-4, 0.4, 60000, 41, 4);
  const Complex expected = double(orientation_sign(2)) * z.value;
  CHECK(std::abs(m.value - expected) <= std::max(4.0 * m.std_error, 0.03 * std::abs(expected)));
}

TEST_CASE("det_N_inverse_term and the curve contraction") {
  const Complex a(0.3, -0.7), g(-1.1, 0.4);
  const auto th = det_N_inverse_term(a);
  const Complex c(0.0, -2.0 * std::numbers::pi);
  CHECK(th.coefficient(Basis{0, 0, 0, 0}) == c);
  CHECK(std::abs(th.coefficient(Basis{0, 1, 0, 1}) + c * a) < 1e-15);
  // g dτ⊗e contracted with -c·a dτ̄⊗e^1 picks the (−1) of moving e^1 past dτ.
  const auto u = SuperTensor::basis(1, Basis{1, 0, 1, 0}, g);
  CHECK(std::abs(contract(u, th).coefficient(Basis{1, 1, 0, 0}) - c * a * g) < 1e-14);
}

TEST_CASE("certify_smooth_curve") {
  CHECK(certify_smooth_curve(parse_poly("z1^3 + z2^3 - z0^3 + z0*z1*z2", 3)));
  CHECK(certify_smooth_curve(parse_poly("z1^2 + z2^2 - z0^2", 3)));
  CHECK(certify_smooth_curve(parse_poly("z1 + z2", 3)));
  CHECK_FALSE(certify_smooth_curve(parse_poly("z1^2*z0 - z2^3 - z2^2*z0", 3)));  // node
  CHECK_FALSE(certify_smooth_curve(parse_poly("z1^2*z0 - z2^3", 3)));            // cusp
  CHECK_FALSE(certify_smooth_curve(parse_poly("z1*z2", 3)));                     // line pair
}

TEST_CASE("curve sheets lie on the curve") {
  const auto c = cubic_curve(0.1);
  const auto& f = c.instance().chart_component(0, 0);
  std::mt19937_64 rng(81);
  for (int k = 0; k < 20; ++k) {
    const Complex w1 = random_complex(rng, 2.0);
    const auto roots = curve_sheets(f, w1);
    CHECK(roots.size() == 3);
    for (const auto& w2 : roots) CHECK(c.curve_residual(0, {w1, w2}) < 1e-12);
  }
}

TEST_CASE("curve integrand: chart invariance and epsilon continuity") {
  const auto c = cubic_curve(0.1);
  const auto& f = c.instance().chart_component(0, 0);
  std::mt19937_64 rng(82);
  for (int k = 0; k < 20; ++k) {
    const Pt w = point_on(f, rng);
    const auto v = curve_point_value(c, w);
    CHECK(std::abs(v.coefficient - Complex(0.0, -2.0 * std::numbers::pi) * v.a * v.g) < 1e-12 * std::abs(v.coefficient) + 1e-300);
    const Pt tau{1.0, -f.partial(0).eval(w) / f.partial(1).eval(w)};
    CHECK(std::abs(curve_form_on(c, 0, w, tau) - v.coefficient) <= 1e-12 * std::abs(v.coefficient));
    const ProjPoint p = ProjPoint::from_affine(0, w);
    for (int beta = 1; beta <= 2; ++beta) {
      const CMatrix J = chart_jacobian(0, beta, w);
      const Pt tb{J(0, 0) * tau[0] + J(0, 1) * tau[1], J(1, 0) * tau[0] + J(1, 1) * tau[1]};
      const Complex cb = curve_form_on(c, beta, p.affine(beta), tb);
      CHECK(std::abs(cb - v.coefficient) <= 1e-9 * std::max(1.0, std::abs(v.coefficient)));
    }
  }
  // The curvature term is linear in ε to leading order and vanishes for FS.
  const Pt w = point_on(f, rng);
  const Complex c1 = curve_point_value(cubic_curve(1e-3), w).coefficient;
  const Complex c2 = curve_point_value(cubic_curve(1e-4), w).coefficient;
  CHECK(std::abs(c1) > 0.0);
  CHECK(std::abs(c2 / c1 - 0.1) < 1e-2);
  CHECK(std::abs(curve_point_value(cubic_curve(0.0), w).coefficient) == 0.0);
}

TEST_CASE("curve_localized_term: FS vanishes pointwise, perturbed integral vanishes") {
  const auto fs = curve_localized_term(cubic_curve(0.0), 4000, 5, 4);
  CHECK(fs.max_pointwise <= 1e-12);
  CHECK(fs.estimate.max_abs <= 1e-12);
  CHECK(fs.sheets == 3);

  const auto pert = curve_localized_term(cubic_curve(0.1), 20000, 6, 4);
  const auto& e = pert.estimate;
  CHECK(pert.max_pointwise > 1e-4);
  CHECK(std::abs(e.value) <= 3.0 * e.std_error);
  CHECK(e.std_error <= 0.05 * e.l1_mass);

  const auto again = curve_localized_term(cubic_curve(0.1), 20000, 6, 1);
  CHECK(again.estimate.value == e.value);

  SectionSpec nodal{{parse_poly("z1^2*z0 - z2^3 - z2^2*z0", 3), HomogeneousPoly(AffinePoly(3), 2)}};
  const CurveInstance bad(Instance(BundleSpec{2, {3, 2}}, nodal, PsiSpec{parse_poly("z0*z1", 3)}, MetricSpec{}));
  CHECK_THROWS_AS(curve_localized_term(bad, 4000, 1), PreconditionError);
  CHECK_THROWS_AS(curve_localized_term(cubic_curve(0.1), 999, 1), DimensionError);
}
