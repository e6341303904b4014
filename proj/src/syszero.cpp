#include "rlab/syszero.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include <Eigen/Dense>

#include "rlab/errors.hpp"

namespace rlab {
namespace {

class System {
 public:
  System(const std::vector<AffinePoly>& f, const std::vector<int>& degrees)
      : n_(static_cast<int>(f.size())), f_(f), deg_(degrees) {
    for (const auto& p : f_) {
      std::vector<AffinePoly> row;
      for (int a = 0; a < n_; ++a) row.push_back(p.partial(a));
      df_.push_back(std::move(row));
      l1_.push_back(p.coefficient_l1());
    }
  }

  int n() const { return n_; }
  int degree(int i) const { return deg_[i]; }

  CVector value(const CVector& z) const {
    const std::vector<Complex> v(z.data(), z.data() + n_);
    CVector out(n_);
    for (int i = 0; i < n_; ++i) out(i) = f_[i].eval(v);
    return out;
  }

  CMatrix jacobian(const CVector& z) const {
    const std::vector<Complex> v(z.data(), z.data() + n_);
    CMatrix J(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int a = 0; a < n_; ++a) J(i, a) = df_[i][a].eval(v);
    return J;
  }

  double residual(const CVector& z) const {
    const CVector F = value(z);
    const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
    double r = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double denom = l1_[i] * std::pow(scale, deg_[i]);
      r = std::max(r, denom > 0 ? std::abs(F(i)) / denom : std::abs(F(i)));
    }
    return r;
  }

 private:
  int n_;
  std::vector<AffinePoly> f_;
  std::vector<std::vector<AffinePoly>> df_;
  std::vector<int> deg_;
  std::vector<double> l1_;
};

enum class PathEnd { finite, infinity, failed };

struct PathResult {
  PathEnd end = PathEnd::failed;
  CVector z;
};

AffinePoly homogenize(const AffinePoly& f, int d) {
  const int n = f.num_vars();
  AffinePoly out(n + 1);
  for (const auto& [e, c] : f.terms()) {
    Exponent h(n + 1);
    int deg = 0;
    for (int k = 0; k < n; ++k) {
      h[k + 1] = e[k];
      deg += e[k];
    }
    h[0] = d - deg;
    out.add_term(h, c);
  }
  return out;
}

// Tracking runs in C^{n+1} on the random patch c·Z = 1, so paths to infinity
// end at finite points with Z_0 = 0. Rows 0..n-1 are
// H = (1-τ)γ G(Z) + τ F(Z) with G_i = Z_{i+1}^{d_i} - Z_0^{d_i}; row n is the patch.
class Homotopy {
 public:
  Homotopy(const System& sys, const std::vector<AffinePoly>& f, Complex gamma, CVector patch)
      : n_(sys.n()), gamma_(gamma), patch_(std::move(patch)) {
    for (int i = 0; i < n_; ++i) {
      deg_.push_back(sys.degree(i));
      F_.push_back(homogenize(f[i], deg_[i]));
      std::vector<AffinePoly> row;
      for (int a = 0; a <= n_; ++a) row.push_back(F_.back().partial(a));
      dF_.push_back(std::move(row));
    }
  }

  CVector H(const CVector& Z, double tau) const {
    const std::vector<Complex> v(Z.data(), Z.data() + n_ + 1);
    CVector out(n_ + 1);
    for (int i = 0; i < n_; ++i) out(i) = (1 - tau) * gamma_ * g(Z, i) + tau * F_[i].eval(v);
    out(n_) = (patch_.transpose() * Z).value() - 1.0;
    return out;
  }
  CMatrix Hz(const CVector& Z, double tau) const {
    const std::vector<Complex> v(Z.data(), Z.data() + n_ + 1);
    CMatrix J = CMatrix::Zero(n_ + 1, n_ + 1);
    for (int i = 0; i < n_; ++i) {
      for (int a = 0; a <= n_; ++a) J(i, a) = tau * dF_[i][a].eval(v);
      const double d = deg_[i];
      J(i, i + 1) += (1 - tau) * gamma_ * d * std::pow(Z(i + 1), deg_[i] - 1);
      J(i, 0) -= (1 - tau) * gamma_ * d * std::pow(Z(0), deg_[i] - 1);
    }
    J.row(n_) = patch_.transpose();
    return J;
  }
  CVector Htau(const CVector& Z) const {
    const std::vector<Complex> v(Z.data(), Z.data() + n_ + 1);
    CVector out(n_ + 1);
    for (int i = 0; i < n_; ++i) out(i) = F_[i].eval(v) - gamma_ * g(Z, i);
    out(n_) = 0.0;
    return out;
  }
  CVector start(CVector roots) const {
    CVector Z(n_ + 1);
    Z(0) = 1.0;
    Z.tail(n_) = roots;
    return Z / (patch_.transpose() * Z).value();
  }

 private:
  Complex g(const CVector& Z, int i) const {
    return std::pow(Z(i + 1), deg_[i]) - std::pow(Z(0), deg_[i]);
  }
  int n_;
  Complex gamma_;
  CVector patch_;
  std::vector<int> deg_;
  std::vector<AffinePoly> F_;
  std::vector<std::vector<AffinePoly>> dF_;
};

// |Z_0| / ‖Z‖ below this is a point at infinity (|w| > 1e8).
constexpr double kInfinity = 1e-8;

double z0_ratio(const CVector& Z) { return std::abs(Z(0)) / Z.norm(); }

PathResult track(const System& sys, const Homotopy& hom, CVector Z, const SolveOptions& opts,
                 double min_step) {
  const int n = sys.n();
  double tau = 0.0, h = 0.02;
  int streak = 0;
  while (tau < 1.0) {
    h = std::min(h, 1.0 - tau);
    const CVector dz = -Eigen::PartialPivLU<CMatrix>(hom.Hz(Z, tau)).solve(hom.Htau(Z));
    CVector zp = Z + h * dz;
    const double tn = tau + h;
    bool ok = dz.allFinite();
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 3 && ok; ++it) {
      const CVector delta = Eigen::PartialPivLU<CMatrix>(hom.Hz(zp, tn)).solve(hom.H(zp, tn));
      const double nd = delta.norm();
      // Growth at round-off level is not divergence (linear rows converge in one step).
      if (!std::isfinite(nd) || (nd > prev && nd > 1e-13 * (1.0 + zp.norm()))) ok = false;
      zp -= delta;
      prev = nd;
    }
    ok = ok && prev <= 1e-8 * zp.norm();
    if (ok) {
      Z = zp;
      tau = tn;
      if (++streak >= 3) {
        h = std::min(2 * h, opts.max_step);
        streak = 0;
      }
      continue;
    }
    streak = 0;
    h /= 2;
    if (h < min_step) {
      if (tau > 0.99) {
        if (z0_ratio(Z) < 1e-4) return {PathEnd::infinity, Z};
        break;  // singular endpoint: let the endgame and certification decide
      }
      return {PathEnd::failed, Z};
    }
  }
  for (int it = 0; it < 10; ++it) {
    const CVector delta = Eigen::PartialPivLU<CMatrix>(hom.Hz(Z, 1.0)).solve(hom.H(Z, 1.0));
    if (!delta.allFinite()) break;
    Z -= delta;
  }
  if (!Z.allFinite() || z0_ratio(Z) < kInfinity) return {PathEnd::infinity, Z};
  CVector w = Z.tail(n) / Z(0);
  for (int it = 0; it < 10 && sys.residual(w) > 0; ++it) {
    const CVector delta = Eigen::PartialPivLU<CMatrix>(sys.jacobian(w)).solve(sys.value(w));
    if (!delta.allFinite() || delta.norm() > 1e-3 * (1 + w.norm())) break;
    w -= delta;
  }
  if (z0_ratio(Z) < 1e-4 && sys.residual(w) > opts.residual_tol) return {PathEnd::infinity, Z};
  return {PathEnd::finite, w};
}

CVector start_point(const std::vector<int>& degrees, long index) {
  const int n = static_cast<int>(degrees.size());
  CVector z(n);
  for (int i = 0; i < n; ++i) {
    const long k = index % degrees[i];
    index /= degrees[i];
    z(i) = std::polar(1.0, 2.0 * std::numbers::pi * double(k) / degrees[i]);
  }
  return z;
}

// γ and the patch vector for one attempt, derived from (seed, attempt).
std::pair<Complex, CVector> random_homotopy_data(std::uint64_t seed, int attempt, int n) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(attempt), 0x9a77u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  const Complex gamma = std::polar(1.0, u(rng));
  std::normal_distribution<double> g(0.0, 1.0);
  CVector patch(n + 1);
  for (auto& c : patch) {
    const double re = g(rng);
    c = Complex(re, g(rng));
  }
  return {gamma, patch};
}

std::vector<PathResult> track_all(const System& sys, const Homotopy& hom,
                                  const std::vector<int>& degrees, long paths,
                                  const SolveOptions& opts) {
  std::vector<PathResult> results(paths);
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long i = next++; i < paths; i = next++) {
      PathResult r = track(sys, hom, hom.start(start_point(degrees, i)), opts, opts.min_step);
      if (r.end == PathEnd::failed)
        r = track(sys, hom, hom.start(start_point(degrees, i)), opts, opts.min_step * 1e-2);
      results[i] = std::move(r);
    }
  };
  const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(paths)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

ZeroCertificate certify(const System& sys, const CVector& z) {
  ZeroCertificate c;
  c.residual = sys.residual(z);
  const CMatrix J = sys.jacobian(z);
  c.abs_det_J = std::abs(J.determinant());
  const Eigen::JacobiSVD<CMatrix> svd(J);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  c.condition = smin > 0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (c.abs_det_J > 0) {
    const CVector z1 = z - Eigen::PartialPivLU<CMatrix>(J).solve(sys.value(z));
    const double r1 = z1.allFinite() ? sys.residual(z1) : std::numeric_limits<double>::infinity();
    c.newton_contracts = r1 <= c.residual / 10 || r1 <= 1e-13;
  }
  return c;
}

}  // namespace

bool ZeroSet::complete() const {
  return defective.empty() &&
         static_cast<long>(points.size()) + paths_to_infinity == bezout_count;
}

ZeroSet solve_square_system(const std::vector<AffinePoly>& f, const std::vector<int>& degrees,
                            std::uint64_t seed, const SolveOptions& opts) {
  const int n = static_cast<int>(f.size());
  if (n < 1 || n > 4) throw DimensionError("solve_square_system supports 1..4 equations");
  if (static_cast<int>(degrees.size()) != n) throw DimensionError("one degree per equation");
  long bezout = 1;
  for (int i = 0; i < n; ++i) {
    if (f[i].num_vars() != n) throw DimensionError("system must be square");
    if (degrees[i] < 1 || f[i].total_degree() > degrees[i])
      throw DimensionError("equation degree exceeds its declared degree");
    bezout *= degrees[i];
  }
  if (bezout > 200) throw DimensionError("Bezout number above 200");
  const System sys(f, degrees);

  for (int attempt = 0; attempt <= opts.retry_budget; ++attempt) {
    auto [gamma, patch] = random_homotopy_data(seed, attempt, n);
    const Homotopy hom(sys, f, gamma, std::move(patch));
    const auto results = track_all(sys, hom, degrees, bezout, opts);
    if (std::any_of(results.begin(), results.end(),
                    [](const PathResult& r) { return r.end == PathEnd::failed; }))
      continue;

    ZeroSet zs;
    zs.bezout_count = bezout;
    zs.gamma_restarts = attempt;
    std::vector<ZeroPoint> clusters;
    for (const auto& r : results) {
      if (r.end == PathEnd::infinity) {
        ++zs.paths_to_infinity;
        continue;
      }
      auto hit = std::find_if(clusters.begin(), clusters.end(), [&](const ZeroPoint& p) {
        double d = 0.0;
        for (int k = 0; k < n; ++k) d = std::max(d, std::abs(p.w[k] - r.z(k)));
        return d <= opts.cluster_radius;
      });
      if (hit != clusters.end()) {
        ++hit->multiplicity;
        continue;
      }
      ZeroPoint p;
      p.w.assign(r.z.data(), r.z.data() + n);
      p.cert = certify(sys, r.z);
      clusters.push_back(std::move(p));
    }
    for (auto& p : clusters) {
      const bool simple = p.multiplicity == 1 && p.cert.residual <= opts.residual_tol &&
                          p.cert.condition < 1e10 && p.cert.newton_contracts;
      (simple ? zs.points : zs.defective).push_back(std::move(p));
    }
    return zs;
  }
  throw NumericalFailure("homotopy path failure persisted after " +
                         std::to_string(opts.retry_budget) + " gamma restarts");
}

ZeroCertificate certify_zero(const std::vector<AffinePoly>& f, const std::vector<Complex>& p) {
  const int n = static_cast<int>(f.size());
  if (static_cast<int>(p.size()) != n) throw DimensionError("point dimension mismatch");
  std::vector<int> degrees;
  for (const auto& q : f) {
    if (q.num_vars() != n) throw DimensionError("system must be square");
    degrees.push_back(std::max(1, q.total_degree()));
  }
  CVector z(n);
  for (int k = 0; k < n; ++k) z(k) = p[k];
  return certify(System(f, degrees), z);
}

bool zeros_at_infinity_check(const SectionSpec& s, std::uint64_t seed) {
  const int n = static_cast<int>(s.components.size());
  if (n < 1) throw DimensionError("empty section");
  for (const auto& c : s.components)
    if (c.num_vars() != n + 1) throw DimensionError("section needs n components in n+1 variables");
  // Leading forms L_i(z_1..z_n) = s_i(0, z_1..z_n).
  std::vector<AffinePoly> L;
  std::vector<int> deg;
  for (const auto& c : s.components) {
    std::vector<AffinePoly> subs{AffinePoly(n)};
    for (int k = 0; k < n; ++k) subs.push_back(AffinePoly::variable(n, k));
    L.push_back(c.poly().compose(subs));
    deg.push_back(c.degree());
    if (L.back().is_zero()) return false;
  }
  auto vanishes = [&](const std::vector<Complex>& z) {
    double scale = 0.0;
    for (const auto& v : z) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < n; ++i)
      if (std::abs(L[i].eval(z)) > 1e-8 * L[i].coefficient_l1() * std::pow(scale, deg[i]))
        return false;
    return true;
  };
  if (n == 1) return !vanishes({Complex(1.0)});

  // Random affine chart z = v_0 + Σ u_j v_j of P^{n-1} and n-1 random
  // degree-D combinations of the L_i; a common zero of the L_i solves them.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto rc = [&] {
    const double re = g(rng);
    return Complex(re, g(rng));
  };
  const int m = n - 1;
  std::vector<std::vector<Complex>> v(n, std::vector<Complex>(n));
  for (auto& row : v)
    for (auto& x : row) x = rc();
  std::vector<AffinePoly> zsub;
  for (int k = 0; k < n; ++k) {
    AffinePoly zk = AffinePoly::constant(m, v[0][k]);
    for (int j = 0; j < m; ++j) zk = zk + v[j + 1][k] * AffinePoly::variable(m, j);
    zsub.push_back(zk);
  }
  AffinePoly ell(m);
  for (int k = 0; k < n; ++k) ell = ell + rc() * zsub[k];
  const int D = *std::max_element(deg.begin(), deg.end());
  std::vector<AffinePoly> Lu;
  for (int i = 0; i < n; ++i) Lu.push_back(L[i].compose(zsub));
  std::vector<AffinePoly> combos;
  for (int k = 0; k < m; ++k) {
    AffinePoly c(m);
    for (int i = 0; i < n; ++i) c = c + rc() * ell.pow(D - deg[i]) * Lu[i];
    combos.push_back(c);
  }
  const ZeroSet zs = solve_square_system(combos, std::vector<int>(m, D), seed);
  auto lift = [&](const std::vector<Complex>& u) {
    std::vector<Complex> z(n);
    for (int k = 0; k < n; ++k) z[k] = zsub[k].eval(u);
    return z;
  };
  for (const auto* list : {&zs.points, &zs.defective})
    for (const auto& p : *list)
      if (vanishes(lift(p.w))) return false;
  return true;
}

std::vector<Complex> univariate_roots(std::vector<Complex> coeffs) {
  while (!coeffs.empty() && coeffs.back() == Complex(0.0)) coeffs.pop_back();
  const int d = static_cast<int>(coeffs.size()) - 1;
  if (d < 1) return {};
  CMatrix C = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) C(0, k) = -coeffs[d - 1 - k] / coeffs[d];
  for (int k = 1; k < d; ++k) C(k, k - 1) = 1.0;
  const Eigen::ComplexEigenSolver<CMatrix> es(C, false);
  std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + d);
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      Complex p = 0.0, dp = 0.0;
      for (int k = d; k >= 0; --k) {
        dp = dp * r + p;
        p = p * r + coeffs[k];
      }
      if (dp == Complex(0.0)) break;
      const Complex next = r - p / dp;
      Complex pn = 0.0;
      for (int k = d; k >= 0; --k) pn = pn * next + coeffs[k];
      if (std::abs(pn) >= std::abs(p)) break;
      r = next;
    }
  }
  return roots;
}

}  // namespace rlab
