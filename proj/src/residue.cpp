#include "rlab/residue.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "rlab/errors.hpp"

namespace rlab {
namespace {

std::vector<AffinePoly> chart_system(const SectionSpec& s, int chart) {
  std::vector<AffinePoly> f;
  for (const auto& c : s.components) f.push_back(c.dehomogenize(chart));
  return f;
}

CMatrix jacobian(const std::vector<AffinePoly>& f, const std::vector<Complex>& w) {
  const int n = static_cast<int>(f.size());
  CMatrix J(n, n);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) J(i, a) = f[i].partial(a).eval(w);
  return J;
}

HomogeneousPoly random_form(std::mt19937_64& rng, int num_vars, int degree) {
  std::normal_distribution<double> g(0.0, 1.0);
  AffinePoly p(num_vars);
  for (const auto& e : monomials_of_degree(num_vars, degree)) {
    const double re = g(rng);
    p.add_term(e, Complex(re, g(rng)));
  }
  return {p, degree};
}

// Linear substitution z_i -> Σ_j A_ij z_j.
template <class C>
Homogeneous<C> change_coordinates(const Homogeneous<C>& P, const std::vector<std::vector<C>>& A) {
  const int nv = P.num_vars();
  std::vector<Polynomial<C>> subs;
  for (int i = 0; i < nv; ++i) {
    Polynomial<C> zi(nv);
    for (int j = 0; j < nv; ++j) zi = zi + A[i][j] * Polynomial<C>::variable(nv, j);
    subs.push_back(zi);
  }
  return {P.poly().compose(subs), P.degree()};
}

double held_out_value(const std::vector<HomogeneousPoly>& space, const ProjPoint& p) {
  double v = 0.0;
  for (const auto& b : space) v = std::max(v, normalized_value(b, p));
  return v;
}

}  // namespace

ResidueLedger ResidueLedger::from_entries(std::vector<ResidueEntry> entries) {
  ResidueLedger l;
  l.entries = std::move(entries);
  for (const auto& e : l.entries) {
    l.total += e.value;
    l.abs_sum += std::abs(e.value);
  }
  l.relative_vanishing = l.abs_sum > 0 ? std::abs(l.total) / l.abs_sum : 0.0;
  return l;
}

Complex local_residue(const SectionSpec& s, const HomogeneousPoly& H, int chart,
                      const std::vector<Complex>& w) {
  const int n = static_cast<int>(s.components.size());
  if (static_cast<int>(w.size()) != n || H.num_vars() != n + 1)
    throw DimensionError("local_residue: dimension mismatch");
  const auto f = chart_system(s, chart);
  const ZeroCertificate cert = certify_zero(f, w);
  if (cert.residual > 1e-8) throw PreconditionError("local_residue: point is not a zero of s");
  if (!(cert.condition < 1e12)) throw PreconditionError("local_residue: singular Jacobian");
  const Complex h = H.dehomogenize(chart).eval(w);
  const Complex det = jacobian(f, w).determinant();
  return (chart % 2 == 0 ? h : -h) / det;
}

Complex local_residue(const Instance& inst, int chart, const std::vector<Complex>& w) {
  return local_residue(inst.section(), inst.psi().H, chart, w);
}

ZeroSet simple_zeros(const SectionSpec& s, std::uint64_t seed, int threads) {
  if (!zeros_at_infinity_check(s, seed))
    throw PreconditionError("s has zeros on the hyperplane at infinity");
  std::vector<int> degrees;
  for (const auto& c : s.components) degrees.push_back(c.degree());
  SolveOptions opts;
  opts.threads = threads;
  ZeroSet zs = solve_square_system(chart_system(s, 0), degrees, seed, opts);
  if (!zs.defective.empty()) throw PreconditionError("s has non-simple zeros");
  if (!zs.complete()) throw PreconditionError("zero count does not reconcile with Bezout");
  return zs;
}

ResidueLedger global_residue_sum(const SectionSpec& s, const HomogeneousPoly& H,
                                 std::uint64_t seed, int threads) {
  const ZeroSet zs = simple_zeros(s, seed, threads);
  std::vector<ResidueEntry> entries;
  for (const auto& p : zs.points) entries.push_back({p.w, local_residue(s, H, 0, p.w)});
  return ResidueLedger::from_entries(std::move(entries));
}

std::vector<Complex> unit_chart_representative(const ProjPoint& p) {
  std::vector<Complex> z(p.z);
  const Complex c = z[p.chart];
  for (auto& v : z) v /= c;
  return z;
}

double normalized_value(const HomogeneousPoly& P, const ProjPoint& p) {
  const auto z = unit_chart_representative(p);
  double norm = 0.0;
  for (const auto& v : z) norm += std::norm(v);
  const double scale = std::pow(std::max(1.0, std::sqrt(norm)), P.degree());
  const double cn = P.poly().coefficient_norm();
  return cn > 0 ? std::abs(P.eval(z)) / (cn * scale) : 0.0;
}

std::vector<HomogeneousPoly> cb_vanishing_space(const std::vector<ProjPoint>& points, int m) {
  if (m < 0) return {};
  const auto monos = monomials_of_degree(3, m);
  const int cols = static_cast<int>(monos.size());
  std::vector<HomogeneousPoly> basis;
  auto to_poly = [&](const CVector& x) {
    AffinePoly p(3);
    for (int c = 0; c < cols; ++c) p.add_term(monos[c], x(c));
    return HomogeneousPoly(p, m);
  };
  if (points.empty()) {
    for (int c = 0; c < cols; ++c) basis.push_back(to_poly(CVector::Unit(cols, c)));
    return basis;
  }
  CMatrix A(points.size(), cols);
  for (size_t r = 0; r < points.size(); ++r) {
    if (points[r].z.size() != 3) throw DimensionError("cb_vanishing_space works on P^2");
    const auto z = unit_chart_representative(points[r]);
    for (int c = 0; c < cols; ++c) {
      Complex v = 1.0;
      for (int k = 0; k < 3; ++k) v *= std::pow(z[k], monos[c][k]);
      A(r, c) = v;
    }
  }
  const Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > 1e-10 * sv(0)) ++rank;
  for (int c = rank; c < cols; ++c) basis.push_back(to_poly(svd.matrixV().col(c)));
  return basis;
}

std::vector<ExactHomogeneousPoly> cb_vanishing_space_exact(const std::vector<ExactPoint>& points,
                                                           int m) {
  if (m < 0) return {};
  const auto monos = monomials_of_degree(3, m);
  const int cols = static_cast<int>(monos.size());
  const int rows = static_cast<int>(points.size());
  std::vector<std::vector<GaussRational>> A(rows, std::vector<GaussRational>(cols));
  for (int r = 0; r < rows; ++r) {
    if (points[r].size() != 3) throw DimensionError("cb_vanishing_space works on P^2");
    for (int c = 0; c < cols; ++c) {
      GaussRational v(Rational(1));
      for (int k = 0; k < 3; ++k)
        for (int e = 0; e < monos[c][k]; ++e) v *= points[r][k];
      A[r][c] = v;
    }
  }
  // Reduced row echelon form.
  std::vector<int> pivot_col;
  int row = 0;
  for (int c = 0; c < cols && row < rows; ++c) {
    int piv = row;
    while (piv < rows && A[piv][c].is_zero()) ++piv;
    if (piv == rows) continue;
    std::swap(A[row], A[piv]);
    const GaussRational inv = GaussRational(Rational(1)) / A[row][c];
    for (auto& v : A[row]) v *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == row || A[r][c].is_zero()) continue;
      const GaussRational factor = A[r][c];
      for (int k = 0; k < cols; ++k) A[r][k] -= factor * A[row][k];
    }
    pivot_col.push_back(c);
    ++row;
  }
  std::vector<ExactHomogeneousPoly> basis;
  for (int free = 0; free < cols; ++free) {
    if (std::find(pivot_col.begin(), pivot_col.end(), free) != pivot_col.end()) continue;
    ExactPoly p(3);
    p.add_term(monos[free], GaussRational(Rational(1)));
    for (size_t r = 0; r < pivot_col.size(); ++r)
      if (!A[r][free].is_zero()) p.add_term(monos[pivot_col[r]], -A[r][free]);
    basis.emplace_back(p, m);
  }
  return basis;
}

std::optional<ExactPoint> rationalize_point(const ProjPoint& p,
                                            const std::vector<ExactHomogeneousPoly>& must_vanish,
                                            long max_den) {
  const auto z = unit_chart_representative(p);
  ExactPoint out;
  for (size_t k = 0; k < z.size(); ++k) {
    if (static_cast<int>(k) == p.chart) {
      out.emplace_back(Rational(1));
      continue;
    }
    const GaussRational q(rationalize(z[k].real(), max_den), rationalize(z[k].imag(), max_den));
    if (std::abs(scalar::to_complex(q) - z[k]) > 1e-9 * std::max(1.0, std::abs(z[k]))) return std::nullopt;
    out.push_back(q);
  }
  for (const auto& P : must_vanish)
    if (!P.eval(out).is_zero()) return std::nullopt;
  return out;
}

CBReport cayley_bacharach_verify(const HomogeneousPoly& f, const HomogeneousPoly& g,
                                 const CBOptions& opts) {
  const int d = f.degree(), e = g.degree();
  if (f.num_vars() != 3 || g.num_vars() != 3) throw DimensionError("CB curves live on P^2");
  if (d < 1 || e < 1 || d + e < 3) throw DimensionError("CB needs d, e >= 1 and d + e >= 3");
  CBReport rep;
  rep.d = d;
  rep.e = e;
  rep.m = d + e - 3;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bool found = false;
  for (int attempt = 0; attempt < 4 && !found; ++attempt) {
    std::vector<std::vector<Complex>> A(3, std::vector<Complex>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double re = gauss(rng);
        A[i][j] = attempt == 0 ? Complex(i == j ? 1.0 : 0.0) : Complex(re, gauss(rng));
      }
    const SectionSpec s{{change_coordinates(f, A), change_coordinates(g, A)}};
    try {
      const ZeroSet zs = simple_zeros(s, opts.seed + attempt, opts.threads);
      if (static_cast<long>(zs.points.size()) != static_cast<long>(d) * e) continue;
      rep.intersection.clear();
      for (const auto& p : zs.points) {
        std::vector<Complex> z(3);
        for (int i = 0; i < 3; ++i)
          z[i] = A[i][0] + A[i][1] * p.w[0] + A[i][2] * p.w[1];
        rep.intersection.push_back(ProjPoint::from_homogeneous(z));
      }
      rep.coordinate_changes = attempt;
      found = true;
    } catch (const PreconditionError&) {
    }
  }
  if (!found) throw PreconditionError("curves do not meet in d*e distinct points");

  const auto& pts = rep.intersection;
  for (size_t j = 0; j < pts.size(); ++j) {
    std::vector<ProjPoint> others;
    for (size_t k = 0; k < pts.size(); ++k)
      if (k != j) others.push_back(pts[k]);
    const auto space = cb_vanishing_space(others, rep.m);
    CBHeldOut h{pts[j], static_cast<int>(space.size()), held_out_value(space, pts[j])};
    rep.max_normalized_value = std::max(rep.max_normalized_value, h.max_normalized_value);
    rep.held_out.push_back(std::move(h));
  }
  // Negative control: held-out point last, first other point replaced.
  std::vector<ProjPoint> others(pts.begin(), pts.end() - 1);
  if (!others.empty()) others.front() = sample_fubini_study(rng, 2);
  const auto neg = cb_vanishing_space(others, rep.m);
  rep.negative_control_dimension = static_cast<int>(neg.size());
  rep.negative_control_value = held_out_value(neg, pts.back());
  return rep;
}

CBReport cayley_bacharach_verify(const ExactHomogeneousPoly& f, const ExactHomogeneousPoly& g,
                                 const CBOptions& opts) {
  CBReport rep = cayley_bacharach_verify(f.to_complex(), g.to_complex(), opts);
  if (!opts.exact) return rep;
  std::vector<ExactPoint> exact;
  for (const auto& p : rep.intersection) {
    auto q = rationalize_point(p, {f, g});
    if (!q) return rep;
    exact.push_back(std::move(*q));
  }
  rep.exact_available = true;
  rep.exact_all_zero = true;
  for (size_t j = 0; j < exact.size(); ++j) {
    std::vector<ExactPoint> others;
    for (size_t k = 0; k < exact.size(); ++k)
      if (k != j) others.push_back(exact[k]);
    for (const auto& b : cb_vanishing_space_exact(others, rep.m))
      rep.exact_all_zero = rep.exact_all_zero && b.eval(exact[j]).is_zero();
    // The exact held-out value is 0, so agreement is the float value itself.
    rep.exact_float_agreement =
        std::max(rep.exact_float_agreement, rep.held_out[j].max_normalized_value);
  }
  return rep;
}

GeneralizedCBReport generalized_cb_check(const HomogeneousPoly& f, const HomogeneousPoly& u,
                                         const HomogeneousPoly& g, std::uint64_t seed,
                                         int threads) {
  for (const auto* p : {&f, &u, &g})
    if (p->num_vars() != 3) throw DimensionError("generalized CB runs on P^2");
  const int m = u.degree() + g.degree() - 3;
  if (m < 0) throw DimensionError("generalized CB needs deg u + deg g >= 3");
  if (f.degree() < 1) throw DimensionError("curve factor f must have degree >= 1");
  const SectionSpec s{{f * u, g}};
  const int D = f.degree() + u.degree() + g.degree() - 3;
  const ZeroSet zs = simple_zeros(s, seed, threads);

  GeneralizedCBReport rep;
  std::vector<bool> on_curve;
  std::vector<ProjPoint> point_zeros;
  for (const auto& p : zs.points) {
    const ProjPoint pp = ProjPoint::from_affine(0, p.w);
    const bool c = normalized_value(f, pp) < 1e-8;
    on_curve.push_back(c);
    if (c) {
      ++rep.curve_side_zeros;
    } else {
      ++rep.point_zeros;
      point_zeros.push_back(pp);
    }
  }
  auto ledgers = [&](const HomogeneousPoly& H) {
    std::vector<ResidueEntry> all, pts;
    double curve_max = 0.0;
    for (size_t k = 0; k < zs.points.size(); ++k) {
      ResidueEntry e{zs.points[k].w, local_residue(s, H, 0, zs.points[k].w)};
      if (on_curve[k]) curve_max = std::max(curve_max, std::abs(e.value));
      else pts.push_back(e);
      all.push_back(std::move(e));
    }
    return std::tuple{ResidueLedger::from_entries(std::move(all)),
                      ResidueLedger::from_entries(std::move(pts)), curve_max};
  };

  std::mt19937_64 rng(seed);
  const HomogeneousPoly phi = random_form(rng, 3, m);
  const auto [full, points, curve_max] = ledgers(f * phi);
  rep.full_ledger_relative = full.relative_vanishing;
  rep.point_ledger_relative = points.relative_vanishing;
  rep.curve_entries_max = curve_max / std::max(points.abs_sum, 1e-300);

  if (!point_zeros.empty()) {
    const std::vector<ProjPoint> others(point_zeros.begin(), point_zeros.end() - 1);
    const auto space = cb_vanishing_space(others, m);
    rep.cb_space_dimension = static_cast<int>(space.size());
    rep.cb_last_value = held_out_value(space, point_zeros.back());
  }

  const auto [nfull, npoints, ncurve] = ledgers(random_form(rng, 3, D));
  (void)nfull;
  (void)ncurve;
  rep.negative_point_ledger_relative = npoints.relative_vanishing;
  rep.hypotheses =
      "certified: simple zeros, none at infinity, curve-side residues vanish because f | psi; "
      "assumed: the splitting hypotheses of the localization formula for s = (f*u, g)";
  return rep;
}

}  // namespace rlab
