// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include "rlab/errors.hpp"
#include "rlab/harness.hpp"
#include "rlab/localize.hpp"
#include "rlab/residue.hpp"
#include "test_support.hpp"

using namespace rlab;
using rlab::testing::max_abs_diff;
using rlab::testing::random_block;
using rlab::testing::random_complex;
using rlab::testing::random_homogeneous;
using Pt = std::vector<Complex>;

namespace {

const int kThreads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs <= limit_seconds;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("[%s] criterion %d %s: %s; runtime %.2f s (limit %.0f s)%s\n", ok ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), secs, limit_seconds, in_time ? "" : " EXCEEDED");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Instance fs_instance(int n, std::vector<int> degrees, std::vector<std::string> s, std::string psi) {
  SectionSpec sec;
  for (const auto& e : s) sec.components.push_back(parse_poly(e, n + 1));
  return Instance(BundleSpec{n, degrees}, sec, PsiSpec{parse_poly(psi, n + 1)}, MetricSpec::fubini_study());
}

ExactHomogeneousPoly line_product(std::mt19937_64& rng, int count) {
  std::uniform_int_distribution<int> u(-6, 6);
  ExactPoly p = ExactPoly::constant(3, GaussRational(Rational(1)));
  for (int k = 0; k < count; ++k) {
    ExactPoly line(3);
    for (int j = 0; j < 3; ++j) {
      int c = u(rng);
      if (j == k % 3 && c == 0) c = 1;
      Exponent e(3, 0);
      e[j] = 1;
      line.add_term(e, GaussRational(Rational(c)));
    }
    p = p * line;
  }
  return {p, count};
}

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

Outcome normalization_oracle() {
  double worst = 0.0;
  for (double t : {0.1, 1.0}) worst = std::max(worst, std::abs(flat_local_mass(t, 12.0 * std::sqrt(t)).value - 1.0));
  return {worst <= 0.01, fmt("max |I - 1| over t in {0.1, 1} = %.2e (tol 1e-2)", worst)};
}

Outcome euler_jacobi() {
  std::mt19937_64 rng(2024);
  const std::vector<std::vector<int>> plane{{1, 2}, {2, 2}, {2, 3}, {3, 3}, {1, 3}};
  double worst = 0.0;
  int negatives = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<int> deg = trial < 10 ? plane[trial % plane.size()] : std::vector<int>{2, 2, 2};
    const int n = static_cast<int>(deg.size());
    SectionSpec s;
    for (int d : deg) s.components.push_back(random_homogeneous(rng, n + 1, d));
    int D = -n - 1;
    for (int d : deg) D += d;
    const auto good = global_residue_sum(s, random_homogeneous(rng, n + 1, D), 100 + trial, kThreads);
    worst = std::max(worst, good.relative_vanishing);
    const auto bad = global_residue_sum(s, random_homogeneous(rng, n + 1, D + 1), 100 + trial, kThreads);
    if (bad.relative_vanishing > 1e-3) ++negatives;
  }
  std::ostringstream os;
  os << "max relative_vanishing " << fmt("%.2e", worst) << " (tol 1e-8); negative control > 1e-3 in "
     << negatives << "/20 (need 18)";
  return {worst <= 1e-8 && negatives >= 18, os.str()};
}

Outcome cayley_bacharach() {
  std::mt19937_64 rng(2025);
  const std::vector<std::pair<int, int>> de{{2, 2}, {2, 3}, {3, 3}};
  double worst = 0.0, worst_exact = 0.0;
  int negatives = 0, exact_ok = 0, exact_runs = 0, vacuous = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto [d, e] = de[trial % de.size()];
    CBOptions opts;
    opts.seed = 300 + trial;
    opts.threads = kThreads;
    const auto rep = cayley_bacharach_verify(random_homogeneous(rng, 3, d), random_homogeneous(rng, 3, e), opts);
    worst = std::max(worst, rep.max_normalized_value);
    if (rep.negative_control_value > 1e-3) ++negatives;
    if (rep.negative_control_dimension == 0) ++vacuous;

    opts.exact = true;
    for (int attempt = 0; attempt < 20; ++attempt) {
      try {
        const auto ex = cayley_bacharach_verify(line_product(rng, d), line_product(rng, e), opts);
        ++exact_runs;
        if (ex.exact_available && ex.exact_all_zero) ++exact_ok;
        worst_exact = std::max(worst_exact, ex.exact_float_agreement);
        break;
      } catch (const PreconditionError&) {
        // concurrent lines: not transversal, draw again
      }
    }
  }
  std::ostringstream os;
  os << "float max held-out value " << fmt("%.2e", worst) << " (tol 1e-8); exact zero on " << exact_ok << "/"
     << exact_runs << " rational instances; negative control > 1e-3 in " << negatives
     << "/50 (need 45; " << vacuous << " trials have an empty vanishing space)";
  return {worst <= 1e-8 && exact_runs == 50 && exact_ok == 50 && negatives >= 45, os.str()};
}

Outcome vanishing_and_t_independence() {
  struct Case {
    const char* name;
    Instance inst;
  };
  const std::vector<Case> cases{
      {"P1 O(2)", fs_instance(1, {2}, {"z1^2 - z0^2"}, "1")},
      {"P2 (2,2)", fs_instance(2, {2, 2}, {"z1^2 - z0^2 + z1*z2", "z2^2 - 4*z0^2 + z0*z1"}, "z0 + 2*z1 - z2")}};
  bool ok = true;
  std::ostringstream os;
  for (const auto& c : cases) {
    const auto ledger = global_residue_sum(c.inst.section(), c.inst.psi().H, 1, kThreads);
    std::vector<IntegralEstimate> est;
    double max_ratio = 0.0, max_sigma_frac = 0.0;
    std::uint64_t seed = 1;
    for (double t : {0.5, 1.0, 2.0}) {
      est.push_back(virtual_residue_mc(c.inst, t, 200000, seed++, kThreads));
      max_ratio = std::max(max_ratio, std::abs(est.back().value) / est.back().std_error);
      max_sigma_frac = std::max(max_sigma_frac, est.back().std_error / ledger.abs_sum);
    }
    double max_pair = 0.0;
    for (size_t a = 0; a < est.size(); ++a)
      for (size_t b = a + 1; b < est.size(); ++b)
        max_pair = std::max(max_pair, std::abs(est[a].value - est[b].value) /
                                          std::hypot(est[a].std_error, est[b].std_error));
    const bool case_ok = max_ratio <= 3.0 && max_sigma_frac <= 0.05 && max_pair <= 3.0;
    ok = ok && case_ok;
    os << c.name << ": max |I|/sigma " << fmt("%.2f", max_ratio) << ", max sigma/sum|res| "
       << fmt("%.4f", max_sigma_frac) << ", max pairwise diff/sigma " << fmt("%.2f", max_pair) << "; ";
  }
  std::string s = os.str();
  s.resize(s.size() - 2);
  return {ok, s};
}

Outcome local_masses() {
  const auto inst = fs_instance(1, {2}, {"z1^2 - z0^2"}, "1");
  const std::vector<Pt> zeros{{1.0}, {-1.0}};
  const auto plus = local_mass(inst, 0, {1.0}, zeros, 0.01, 0.5, 200000, 51, kThreads);
  const auto minus = local_mass(inst, 0, {-1.0}, zeros, 0.01, 0.5, 200000, 52, kThreads);
  const double rp = std::abs(plus.value - local_residue(inst, 0, {1.0})) / 0.5;
  const double rm = std::abs(minus.value - local_residue(inst, 0, {-1.0})) / 0.5;
  const double cancel = std::abs(plus.value + minus.value) / std::hypot(plus.std_error, minus.std_error);
  std::ostringstream os;
  os << "masses " << fmt("%+.4f", plus.value.real()) << " / " << fmt("%+.4f", minus.value.real())
     << ", relative errors " << fmt("%.3f", rp) << " / " << fmt("%.3f", rm) << " (tol 0.05), |sum|/sigma "
     << fmt("%.2f", cancel) << " (tol 3)";
  return {rp <= 0.05 && rm <= 0.05 && cancel <= 3.0, os.str()};
}

CurveInstance conic_instance(double eps) {
  SectionSpec sec{{parse_poly("z1^2 + 2*z2^2 - 2*z0^2 + z0*z1 + z1*z2 - z0*z2", 3), HomogeneousPoly(AffinePoly(3), 2)}};
  MetricSpec m;
  if (eps > 0) {
    m.kind = MetricKind::perturbed;
    m.epsilon = eps;
    m.q = parse_poly("z0*z1 + z2^2 - z0*z2", 3);
  }
  return CurveInstance(Instance(BundleSpec{2, {2, 2}}, sec, PsiSpec{parse_poly("z0 + 2*z1 - z2", 3)}, m));
}

Outcome curve_localization() {
  // 5000 base points x 2 sheets = 10^4 curve samples.
  const auto fs = curve_localized_term(conic_instance(0.0), 5000, 61, kThreads);
  const auto pert = curve_localized_term(conic_instance(0.05), 100000, 62, kThreads);
  const auto& e = pert.estimate;
  const double ratio = std::abs(e.value) / e.std_error;
  const double frac = e.std_error / e.l1_mass;
  std::ostringstream os;
  os << "FS max pointwise " << fmt("%.1e", fs.max_pointwise) << " (tol 1e-12); perturbed max pointwise "
     << fmt("%.3f", pert.max_pointwise) << " (> 1e-4), |I|/sigma " << fmt("%.2f", ratio)
     << " (tol 3), sigma/L1 " << fmt("%.4f", frac) << " (tol 0.02), rejections " << e.rejections;
  return {fs.max_pointwise <= 1e-12 && pert.max_pointwise > 1e-4 && ratio <= 3.0 && frac <= 0.02, os.str()};
}

Outcome algebra_suite() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> coin(0, 4);
  double adj = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 4;
    std::uniform_int_distribution<int> dk(0, n);
    const int k = dk(rng);
    std::uniform_int_distribution<int> dl(0, k);
    const int l = dl(rng);
    const int i = std::min(n, coin(rng) % 2), j = std::min(n, coin(rng) % 2);
    const int p = std::min(n, coin(rng) % 2), q = std::min(n, coin(rng) % 3);
    const auto u = random_block(rng, n, {i, j, k, 0});
    const auto theta = random_block(rng, n, {p, q, 0, l});
    const auto c = contract(u, theta);
    const int parity = (i + j) * l + (p + q) * (i + j + k) + l * (l - 1) / 2;
    const Complex sign = parity % 2 == 0 ? 1.0 : -1.0;
    for (int L = 0; L < (1 << n); ++L) {
      if (std::popcount(static_cast<unsigned>(L)) != k - l) continue;
      const auto nu = SuperTensor::basis(n, Basis{0, 0, 0, static_cast<std::uint8_t>(L)});
      const auto rhs = sign * dual_pair(u, wedge(theta, nu));
      adj = std::max(adj, max_abs_diff(dual_pair(c, nu), rhs) / std::max(1.0, rhs.max_abs()));
    }
  }

  // exp_S against the untruncated series; S1^{n+1} = 0.
  double expo = 0.0;
  bool nilpotent = true;
  for (int n = 1; n <= 4; ++n) {
    const Complex s0 = random_complex(rng, 0.5);
    const auto s1 = random_block(rng, n, {0, 1, 0, 1});
    SuperTensor series = SuperTensor::scalar(n, 0.0), power = SuperTensor::scalar(n, 1.0);
    double fact = 1.0;
    for (int m = 0; m <= n + 3; ++m) {
      if (m > 0) fact *= m;
      series += (std::exp(s0) / fact) * power;
      power = wedge(power, s1);
      if (m == n) nilpotent = nilpotent && power.is_zero();
    }
    const auto e = exp_S(SForm(s0, s1));
    expo = std::max(expo, max_abs_diff(e, series) / std::max(1.0, series.max_abs()));
  }

  // Chart invariance: residues, top-form densities and the curve integrand.
  double chart = 0.0;
  SectionSpec s{{random_homogeneous(rng, 3, 2), random_homogeneous(rng, 3, 3)}};
  const auto H = random_homogeneous(rng, 3, 2);
  const Instance inst(BundleSpec{2, {2, 3}}, s, PsiSpec{H}, MetricSpec::fubini_study());
  for (const auto& z : simple_zeros(s, 5).points) {
    const auto pp = ProjPoint::from_affine(0, z.w);
    const Complex r0 = local_residue(inst, 0, z.w);
    for (int c = 1; c <= 2; ++c)
      if (std::abs(pp.z[c]) > 0.1 * std::abs(pp.z[pp.chart]))
        chart = std::max(chart, std::abs(local_residue(inst, c, pp.affine(c)) - r0) / std::max(1.0, std::abs(r0)));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const Pt w{random_complex(rng, 0.6), random_complex(rng, 0.6)};
    const auto pp = ProjPoint::from_affine(0, w);
    const Complex t0 = inst.top_form(0, w, 0.7);
    for (int c = 1; c <= 2; ++c) {
      const double jac = std::norm(chart_jacobian(0, c, w).determinant());
      chart = std::max(chart, std::abs(inst.top_form(c, pp.affine(c), 0.7) * jac - t0) / std::max(1.0, std::abs(t0)));
    }
  }
  const auto curve = conic_instance(0.05);
  const auto& f = curve.instance().chart_component(0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Complex w1 = random_complex(rng, 0.8);
    for (const auto& w2 : curve_sheets(f, w1)) {
      const Pt w{w1, w2};
      const Complex f2 = f.partial(1).eval(w);
      if (std::abs(f2) < 1e-2) continue;
      const Pt tau{1.0, -f.partial(0).eval(w) / f2};
      const Complex c0 = curve_form_on(curve, 0, w, tau);
      const auto pp = ProjPoint::from_affine(0, w);
      for (int b = 1; b <= 2; ++b) {
        if (std::abs(pp.z[b]) < 0.1 * std::abs(pp.z[pp.chart])) continue;
        const CMatrix J = chart_jacobian(0, b, w);
        const Pt tb{J(0, 0) * tau[0] + J(0, 1) * tau[1], J(1, 0) * tau[0] + J(1, 1) * tau[1]};
        chart = std::max(chart, std::abs(curve_form_on(curve, b, pp.affine(b), tb) - c0) / std::max(1.0, std::abs(c0)));
      }
    }
  }
  std::ostringstream os;
  os << "adjunction max error " << fmt("%.1e", adj) << " (tol 1e-12), exp_S vs series " << fmt("%.1e", expo)
     << ", nilpotency " << (nilpotent ? "ok" : "broken") << ", chart invariance " << fmt("%.1e", chart)
     << " (tol 1e-9)";
  return {adj <= 1e-12 && expo <= 1e-12 && nilpotent && chart <= 1e-9, os.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  const std::vector<std::string> scenarios{"p1_o2", "p2_22", "curve_perturbed", "cb_cubics", "cb_exact",
                                           "generalized_cb"};
  int identical = 0;
  std::string bad;
  for (const auto& sc : scenarios) {
    std::vector<std::string> outputs;
    for (int threads : {1, 4, 1, 4}) {
      const std::string out = "/tmp/rlab_acceptance_" + sc + "_" + std::to_string(outputs.size()) + ".json";
      const std::string cmd = std::string(RLAB_CLI) + " verify " + RLAB_SCENARIO_DIR + "/" + sc +
                              ".json --seed 17 --threads " + std::to_string(threads) + " --json-out " + out +
                              " > /dev/null";
      const int rc = std::system(cmd.c_str());
      if (rc != 0 && WEXITSTATUS(rc) == 2) return {false, sc + ": CLI input error"};
      outputs.push_back(slurp(out));
      std::remove(out.c_str());
    }
    if (!outputs[0].empty() && std::all_of(outputs.begin(), outputs.end(), [&](const auto& o) { return o == outputs[0]; }))
      ++identical;
    else
      bad += " " + sc;
  }
  std::ostringstream os;
  os << identical << "/" << scenarios.size() << " scenarios byte-identical over 4 runs (threads 1, 4, 1, 4)";
  if (!bad.empty()) os << "; differing:" << bad;
  return {identical == static_cast<int>(scenarios.size()), os.str()};
}

}  // namespace

int main() {
  std::printf("acceptance suite (%d threads)\n", kThreads);
  criterion(1, "normalization oracle", 1, normalization_oracle);
  criterion(2, "Euler-Jacobi vanishing", 120, euler_jacobi);
  criterion(3, "Cayley-Bacharach", 120, cayley_bacharach);
  criterion(4, "global vanishing and t-independence", 300, vanishing_and_t_independence);
  criterion(5, "local-mass localization", 60, local_masses);
  criterion(6, "curve localization", 300, curve_localization);
  criterion(7, "algebra suite", 30, algebra_suite);
  criterion(8, "determinism", 600, determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
