#include "rlab/localize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

#include "rlab/errors.hpp"
#include "rlab/syszero.hpp"

namespace rlab {

namespace {

constexpr double kBranchCutoff = 1e-6;

struct ChunkResult {
  Complex sum = 0.0;
  double sum_abs = 0.0;
  double sum_abs2 = 0.0;
  double max_abs = 0.0;
  double max_aux = 0.0;
  long count = 0;
  long rejections = 0;
};

Complex ipow(Complex z, int k) {
  Complex r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// (−1)^{n(n−1)/2}(−2i)^n: canonical (n,n) coefficient to Lebesgue density.
Complex lebesgue_factor(int n) { return double(orientation_sign(n)) * ipow(Complex(0.0, -2.0), n); }

void check_run(double t, long samples) {
  if (!(t > 0.0)) throw DimensionError("t must be positive");
  if (samples < 1000) throw DimensionError("at least 1000 samples are required");
}

IntegralEstimate to_estimate(const SampleStats& st, Complex scale, double t, std::uint64_t seed) {
  IntegralEstimate e;
  e.value = scale * st.mean;
  e.std_error = std::abs(scale) * st.std_error;
  e.samples = st.samples;
  e.t = t;
  e.seed = seed;
  e.l1_mass = std::abs(scale) * st.l1_mass;
  e.max_abs = std::abs(scale) * st.max_abs;
  e.rejections = st.rejections;
  return e;
}

// Uniform point of the ball of radius r in C^n ≅ R^{2n}.
std::vector<Complex> uniform_ball(std::mt19937_64& rng, const std::vector<Complex>& center, double r) {
  const int n = static_cast<int>(center.size());
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Complex> v(n);
  double norm2 = 0.0;
  for (auto& x : v) {
    const double re = g(rng);
    x = Complex(re, g(rng));
    norm2 += std::norm(x);
  }
  const double scale = r * std::pow(u(rng), 1.0 / (2 * n)) / std::sqrt(norm2);
  for (int k = 0; k < n; ++k) v[k] = center[k] + scale * v[k];
  return v;
}

}  // namespace

int orientation_sign(int n) { return (n * (n - 1) / 2) % 2 == 0 ? 1 : -1; }

Complex residue_prefactor(int n) {
  return (n % 2 == 0 ? 1.0 : -1.0) / ipow(Complex(0.0, 2.0 * std::numbers::pi), n);
}

SampleStats parallel_sample(long samples, std::uint64_t seed, int threads, const SampleFn& fn) {
  if (samples <= 0) throw DimensionError("sample count must be positive");
  const long chunks = (samples + kChunk - 1) / kChunk;
  std::vector<ChunkResult> results(chunks);
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long c = next++; c < chunks; c = next++) {
      std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
      std::mt19937_64 rng(sq);
      ChunkResult r;
      const long count = std::min(kChunk, samples - c * kChunk);
      SampleContext ctx{rng};
      for (long k = 0; k < count; ++k) {
        ctx.sample_abs = -1.0;
        const Complex x = fn(ctx);
        const double a = std::abs(x);
        r.sum += x;
        r.sum_abs += ctx.sample_abs >= 0.0 ? ctx.sample_abs : a;
        r.sum_abs2 += a * a;
        r.max_abs = std::max(r.max_abs, a);
      }
      r.count = count;
      r.rejections = ctx.rejections;
      r.max_aux = ctx.aux;
      results[c] = r;
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(chunks)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
  }

  ChunkResult tot;
  for (const auto& r : results) {
    tot.sum += r.sum;
    tot.sum_abs += r.sum_abs;
    tot.sum_abs2 += r.sum_abs2;
    tot.max_abs = std::max(tot.max_abs, r.max_abs);
    tot.max_aux = std::max(tot.max_aux, r.max_aux);
    tot.count += r.count;
    tot.rejections += r.rejections;
  }
  SampleStats st;
  const double N = static_cast<double>(tot.count);
  st.mean = tot.sum / N;
  const double var = std::max(0.0, (tot.sum_abs2 - N * std::norm(st.mean)) / std::max(1.0, N - 1.0));
  st.std_error = std::sqrt(var / N);
  st.l1_mass = tot.sum_abs / N;
  st.max_abs = tot.max_abs;
  st.max_aux = tot.max_aux;
  st.samples = tot.count;
  st.rejections = tot.rejections;
  return st;
}

IntegralEstimate virtual_residue_mc(const Instance& inst, double t, long samples,
                                    std::uint64_t seed, int threads) {
  check_run(t, samples);
  const int n = inst.n();
  const auto st = parallel_sample(samples, seed, threads, [&](SampleContext& ctx) {
    const ProjPoint p = sample_fubini_study(ctx.rng, n);
    const auto w = p.affine(p.chart);
    return inst.top_form(p.chart, w, t) / fubini_study_density(w);
  });
  return to_estimate(st, residue_prefactor(n) * lebesgue_factor(n), t, seed);
}

IntegralEstimate local_mass(const Instance& inst, int chart, const std::vector<Complex>& center,
                            const std::vector<std::vector<Complex>>& zeros, double t,
                            double radius, long samples, std::uint64_t seed, int threads) {
  check_run(t, samples);
  const int n = inst.n();
  if (static_cast<int>(center.size()) != n) throw DimensionError("ball center has wrong dimension");
  if (chart < 0 || chart > n) throw DimensionError("chart index out of range");
  if (!(radius > 0.0)) throw DimensionError("radius must be positive");
  for (const auto& z : zeros) {
    if (static_cast<int>(z.size()) != n) throw DimensionError("zero has wrong dimension");
    double d2 = 0.0;
    for (int k = 0; k < n; ++k) d2 += std::norm(z[k] - center[k]);
    if (d2 > 1e-20 && std::sqrt(d2) < 2.0 * radius)
      throw PreconditionError("local mass balls overlap: another zero is closer than 2 radius");
  }
  const double volume = std::pow(std::numbers::pi, n) * std::pow(radius, 2 * n) / factorial(n);
  const auto st = parallel_sample(samples, seed, threads, [&](SampleContext& ctx) {
    return inst.top_form(chart, uniform_ball(ctx.rng, center, radius), t);
  });
  return to_estimate(st, residue_prefactor(n) * lebesgue_factor(n) * volume, t, seed);
}

Complex flat_model_top_form(int n, double t, const std::vector<Complex>& w) {
  if (static_cast<int>(w.size()) != n) throw DimensionError("flat model point has wrong dimension");
  if (!(t > 0.0)) throw DimensionError("t must be positive");
  double norm2 = 0.0;
  for (const auto& v : w) norm2 += std::norm(v);
  SuperTensor one(n);
  for (int i = 0; i < n; ++i)
    one.add(Basis{0, static_cast<std::uint8_t>(1u << i), 0, static_cast<std::uint8_t>(1u << i)},
            -1.0 / (2.0 * t));
  const auto all = static_cast<std::uint8_t>((1u << n) - 1u);
  return top_pairing(SuperTensor::basis(n, Basis{all, 0, all, 0}),
                     exp_S(SForm(Complex(-norm2 / (2.0 * t)), std::move(one))));
}

IntegralEstimate flat_local_mass(double t, double radius) {
  if (!(t > 0.0) || !(radius > 0.0)) throw DimensionError("t and radius must be positive");
  constexpr int kAngles = 16;
  auto radial = [&](double r) {
    Complex acc = 0.0;
    for (int k = 0; k < kAngles; ++k) {
      const double th = 2.0 * std::numbers::pi * k / kAngles;
      acc += flat_model_top_form(1, t, {std::polar(r, th)});
    }
    return acc * (2.0 * std::numbers::pi / kAngles) * r;
  };
  auto re = [&](double r) { return radial(r).real(); };
  auto im = [&](double r) { return radial(r).imag(); };
  using boost::math::quadrature::gauss;
  const Complex fine(gauss<double, 64>::integrate(re, 0.0, radius),
                     gauss<double, 64>::integrate(im, 0.0, radius));
  const Complex coarse(gauss<double, 32>::integrate(re, 0.0, radius),
                       gauss<double, 32>::integrate(im, 0.0, radius));
  const Complex scale = residue_prefactor(1) * lebesgue_factor(1);
  IntegralEstimate e;
  e.value = scale * fine;
  e.std_error = std::abs(scale * (fine - coarse));
  e.t = t;
  return e;
}

SuperTensor det_N_inverse_term(Complex a) {
  const Complex c(0.0, -2.0 * std::numbers::pi);
  SuperTensor th = SuperTensor::scalar(1, c);
  th.add(Basis{0, 1, 0, 1}, -c * a);
  return th;
}

bool certify_smooth_curve(const HomogeneousPoly& f, std::uint64_t seed) {
  if (f.poly().num_vars() != 3) throw DimensionError("curve must live on P^2");
  if (f.is_zero()) throw DimensionError("curve polynomial is zero");
  const int d = f.degree();
  if (d <= 1) return true;
  // Random linear change so that no singular point sits at infinity.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<AffinePoly> subs;
  for (int i = 0; i < 3; ++i) {
    AffinePoly l(3);
    for (int j = 0; j < 3; ++j) {
      Exponent e(3, 0);
      e[j] = 1;
      const double re = g(rng);
      l.add_term(e, Complex(re, g(rng)));
    }
    subs.push_back(l);
  }
  const HomogeneousPoly fc(f.poly().compose(subs), d);
  // Euler: a common zero of f, ∂_1 f, ∂_2 f off z0 = 0 is a singular point.
  const std::vector<AffinePoly> sys{fc.partial(1).dehomogenize(0), fc.partial(2).dehomogenize(0)};
  const AffinePoly f0 = fc.dehomogenize(0);
  const ZeroSet zs = solve_square_system(sys, {d - 1, d - 1}, seed);
  auto on_curve = [&](const ZeroPoint& p) {
    double scale = 1.0;
    for (const auto& v : p.w) scale = std::max(scale, std::abs(v));
    return std::abs(f0.eval(p.w)) / (f0.coefficient_l1() * std::pow(scale, d)) < 1e-8;
  };
  for (const auto& p : zs.points)
    if (on_curve(p)) return false;
  for (const auto& p : zs.defective)
    if (on_curve(p)) return false;
  if (!zs.complete()) throw NumericalFailure("smoothness of the curve could not be decided");
  return true;
}

std::vector<Complex> curve_sheets(const AffinePoly& f_chart0, Complex w1) {
  if (f_chart0.num_vars() != 2) throw DimensionError("curve chart polynomial needs two variables");
  std::vector<Complex> coeffs(f_chart0.degree_in(1) + 1, 0.0);
  for (const auto& [e, c] : f_chart0.terms()) coeffs[e[1]] += c * ipow(w1, e[0]);
  return univariate_roots(std::move(coeffs));
}

CurvePointValue curve_point_value(const CurveInstance& c, const std::vector<Complex>& w) {
  const auto& f = c.instance().chart_component(0, 0);
  const Complex f1 = f.partial(0).eval(w), f2 = f.partial(1).eval(w);
  if (std::abs(f2) < kBranchCutoff) throw PreconditionError("curve point is a branch point of the w_1 projection");
  const std::vector<Complex> tau{1.0, -f1 / f2};
  CurvePointValue v;
  v.g = c.psi_over_det_ds(0, w, tau);
  v.a = c.R_Vi_s(0, w, tau);
  const SuperTensor u = SuperTensor::basis(1, Basis{1, 0, 1, 0}, v.g);
  v.coefficient = contract(u, det_N_inverse_term(v.a)).coefficient(Basis{1, 1, 0, 0});
  return v;
}

Complex curve_form_on(const CurveInstance& c, int chart, const std::vector<Complex>& w,
                      const std::vector<Complex>& tau) {
  const SuperTensor u = SuperTensor::basis(1, Basis{1, 0, 1, 0}, c.psi_over_det_ds(chart, w, tau));
  return contract(u, det_N_inverse_term(c.R_Vi_s(chart, w, tau))).coefficient(Basis{1, 1, 0, 0});
}

CurveTerm curve_localized_term(const CurveInstance& c, long base_samples, std::uint64_t seed,
                               int threads) {
  if (base_samples < 1000) throw DimensionError("at least 1000 samples are required");
  if (!certify_smooth_curve(c.curve())) throw PreconditionError("curve Z is singular");
  const auto& f = c.instance().chart_component(0, 0);
  const AffinePoly f2 = f.partial(1);
  const Complex to_lebesgue(0.0, -2.0);  // dw∧dw̄ = −2i dx∧dy

  const auto st = parallel_sample(base_samples, seed, threads, [&](SampleContext& ctx) {
    for (;;) {
      const ProjPoint p = sample_fubini_study(ctx.rng, 1);
      if (p.z[0] == 0.0) continue;
      const Complex w1 = p.z[1] / p.z[0];
      const auto roots = curve_sheets(f, w1);
      bool branch = false;
      for (const auto& w2 : roots)
        if (std::abs(f2.eval(std::vector<Complex>{w1, w2})) < kBranchCutoff) branch = true;
      if (branch) {
        ++ctx.rejections;
        continue;
      }
      Complex acc = 0.0;
      double mass = 0.0;
      for (const auto& w2 : roots) {
        const auto v = curve_point_value(c, {w1, w2});
        ctx.aux = std::max(ctx.aux, std::abs(v.coefficient));
        acc += v.coefficient;
        mass += std::abs(v.coefficient);
      }
      const double density = fubini_study_density({w1});
      ctx.sample_abs = mass * std::abs(to_lebesgue) / density;
      return acc * to_lebesgue / density;
    }
  });
  CurveTerm out;
  out.estimate = to_estimate(st, 1.0, 0.0, seed);
  out.component = 0;
  out.max_pointwise = st.max_aux;
  out.sheets = f.degree_in(1);
  return out;
}

}  // namespace rlab
