#include "rlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "rlab/errors.hpp"
#include "rlab/localize.hpp"
#include "rlab/residue.hpp"

namespace rlab {

using json = nlohmann::ordered_json;

namespace {

const std::map<std::string, TaskKind> kTaskNames{
    {"euler_jacobi", TaskKind::euler_jacobi},       {"cayley_bacharach", TaskKind::cayley_bacharach},
    {"generalized_cb", TaskKind::generalized_cb},   {"virtual_residue", TaskKind::virtual_residue},
    {"local_mass", TaskKind::local_mass},           {"curve_localization", TaskKind::curve_localization}};

std::string task_name(TaskKind k) {
  for (const auto& [name, kind] : kTaskNames)
    if (kind == k) return name;
  return "?";
}

[[noreturn]] void bad(const std::string& msg) { throw InputError(msg); }

void allow_keys(const json& obj, const std::set<std::string>& keys, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!keys.count(it.key())) bad(where + ": unknown key '" + it.key() + "'");
}

int get_int(const json& v, const std::string& what) {
  if (!v.is_number_integer()) bad(what + " must be an integer");
  return v.get<int>();
}

double get_number(const json& v, const std::string& what) {
  if (!v.is_number()) bad(what + " must be a number");
  return v.get<double>();
}

std::string get_string(const json& v, const std::string& what) {
  if (!v.is_string()) bad(what + " must be a string");
  return v.get<std::string>();
}

HomogeneousPoly parse_component(const std::string& text, int n, int degree, const std::string& what) {
  try {
    const HomogeneousPoly p = parse_poly(text, n + 1);
    if (p.is_zero()) return HomogeneousPoly(AffinePoly(n + 1), degree);
    if (p.degree() != degree)
      bad(what + " has degree " + std::to_string(p.degree()) + " but degree " + std::to_string(degree) +
          " is required");
    return p;
  } catch (const ParseError& e) {
    bad(what + ": " + e.what());
  } catch (const DimensionError& e) {
    bad(what + ": " + e.what());
  }
}

SectionSpec effective_section(const Scenario& sc) {
  SectionSpec s;
  if (sc.curve) {
    const HomogeneousPoly f = parse_poly(*sc.curve, sc.n + 1);
    const int du = sc.degrees[0] - f.degree();
    const HomogeneousPoly u = parse_component(sc.section[0], sc.n, du, "section[0]");
    s.components.push_back(HomogeneousPoly(f.poly() * u.poly(), sc.degrees[0]));
    s.components.push_back(parse_component(sc.section[1], sc.n, sc.degrees[1], "section[1]"));
    return s;
  }
  for (int i = 0; i < sc.n; ++i)
    s.components.push_back(parse_component(sc.section[i], sc.n, sc.degrees[i], "section[" + std::to_string(i) + "]"));
  return s;
}

Instance make_instance(const Scenario& sc) {
  BundleSpec b{sc.n, sc.degrees};
  const int D = b.psi_degree();
  const HomogeneousPoly H = parse_component(sc.psi, sc.n, D, "psi");
  MetricSpec m;
  if (sc.metric.kind == "perturbed") {
    m.kind = MetricKind::perturbed;
    m.epsilon = sc.metric.epsilon;
    m.pair_a = sc.metric.pair_a;
    m.pair_b = sc.metric.pair_b;
    m.f_index = sc.metric.f_index;
    if (m.pair_b < 0 || m.pair_b >= sc.n) bad("metric.pair index out of range");
    m.q = parse_component(sc.metric.q, sc.n, sc.degrees[m.pair_b], "metric.q");
  }
  try {
    return Instance(b, effective_section(sc), PsiSpec{H}, m);
  } catch (const DimensionError& e) {
    bad(e.what());
  }
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json point_json(const std::vector<Complex>& w) {
  json a = json::array();
  for (const auto& v : w) a.push_back(complex_json(v));
  return a;
}

json ledger_json(const ResidueLedger& l) {
  json entries = json::array();
  for (const auto& e : l.entries) entries.push_back({{"w", point_json(e.w)}, {"residue", complex_json(e.value)}});
  return {{"entries", entries},
          {"total", complex_json(l.total)},
          {"abs_sum", l.abs_sum},
          {"relative_vanishing", l.relative_vanishing}};
}

json estimate_json(const IntegralEstimate& e) {
  return {{"value", complex_json(e.value)}, {"std_error", e.std_error}, {"samples", e.samples},
          {"l1_mass", e.l1_mass},           {"rejections", e.rejections}};
}

struct Resolved {
  double tol;
  long samples;
  std::uint64_t seed;
};

Resolved resolve(const TaskSpec& t, const RunOptions& o, double tol, long samples) {
  return {t.tol.value_or(tol), o.samples.value_or(t.samples.value_or(samples)),
          o.seed.value_or(t.seed.value_or(1))};
}

Verdict verdict_of(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

TaskResult run_euler_jacobi(const Scenario& sc, const TaskSpec& t, const RunOptions& o) {
  const auto r = resolve(t, o, 1e-8, 0);
  TaskResult out;
  out.inputs = {{"tol", r.tol}, {"seed", r.seed}};
  const Instance inst = make_instance(sc);
  const auto l = global_residue_sum(inst.section(), inst.psi().H, r.seed, o.threads);
  out.results = ledger_json(l);
  out.verdict = verdict_of(l.relative_vanishing <= r.tol);
  return out;
}

TaskResult run_cayley_bacharach(const Scenario& sc, const TaskSpec& t, const RunOptions& o) {
  const auto r = resolve(t, o, 1e-8, 0);
  TaskResult out;
  out.inputs = {{"tol", r.tol}, {"seed", r.seed}, {"backend", sc.backend}};
  CBOptions opts;
  opts.seed = r.seed;
  opts.threads = o.threads;
  CBReport rep;
  if (sc.backend == "exact") {
    opts.exact = true;
    rep = cayley_bacharach_verify(parse_exact(sc.section[0], 3), parse_exact(sc.section[1], 3), opts);
  } else {
    const SectionSpec s = effective_section(sc);
    rep = cayley_bacharach_verify(s.components[0], s.components[1], opts);
  }
  json held = json::array();
  for (const auto& h : rep.held_out)
    held.push_back({{"point", point_json(h.point.normalized())},
                    {"space_dimension", h.space_dimension},
                    {"max_normalized_value", h.max_normalized_value}});
  out.results = {{"d", rep.d}, {"e", rep.e}, {"m", rep.m},
                 {"intersection_points", static_cast<int>(rep.intersection.size())},
                 {"held_out", held},
                 {"max_normalized_value", rep.max_normalized_value},
                 {"negative_control_dimension", rep.negative_control_dimension},
                 {"negative_control_value", rep.negative_control_value},
                 {"coordinate_changes", rep.coordinate_changes}};
  bool ok = rep.max_normalized_value <= r.tol;
  if (sc.backend == "exact") {
    out.results["exact_available"] = rep.exact_available;
    out.results["exact_all_zero"] = rep.exact_all_zero;
    out.results["exact_float_agreement"] = rep.exact_float_agreement;
    ok = ok && rep.exact_available && rep.exact_all_zero;
    if (!rep.exact_available) out.message = "intersection points are not rational; exact path unavailable";
  }
  out.verdict = verdict_of(ok);
  return out;
}

TaskResult run_generalized_cb(const Scenario& sc, const TaskSpec& t, const RunOptions& o) {
  const auto r = resolve(t, o, 1e-8, 0);
  TaskResult out;
  out.inputs = {{"tol", r.tol}, {"seed", r.seed}};
  const HomogeneousPoly f = parse_poly(*sc.curve, 3);
  const HomogeneousPoly u = parse_component(sc.section[0], 2, sc.degrees[0] - f.degree(), "section[0]");
  const HomogeneousPoly g = parse_component(sc.section[1], 2, sc.degrees[1], "section[1]");
  const auto rep = generalized_cb_check(f, u, g, r.seed, o.threads);
  out.results = {{"curve_side_zeros", rep.curve_side_zeros},
                 {"point_zeros", rep.point_zeros},
                 {"full_ledger_relative", rep.full_ledger_relative},
                 {"point_ledger_relative", rep.point_ledger_relative},
                 {"curve_entries_max", rep.curve_entries_max},
                 {"cb_space_dimension", rep.cb_space_dimension},
                 {"cb_last_value", rep.cb_last_value},
                 {"negative_point_ledger_relative", rep.negative_point_ledger_relative},
                 {"hypotheses", rep.hypotheses}};
  const bool ok = rep.full_ledger_relative <= r.tol && rep.point_ledger_relative <= r.tol &&
                  rep.curve_entries_max <= r.tol && rep.cb_last_value <= r.tol;
  out.verdict = ok ? Verdict::assumed_hypotheses : Verdict::fail;
  out.message = rep.hypotheses;
  return out;
}

TaskResult run_virtual_residue(const Scenario& sc, const TaskSpec& t, const RunOptions& o) {
  const auto r = resolve(t, o, 0.05, 200000);
  const std::vector<double> ts = t.t.empty() ? std::vector<double>{0.5, 1.0, 2.0} : t.t;
  TaskResult out;
  out.inputs = {{"tol", r.tol}, {"seed", r.seed}, {"samples", r.samples}, {"t", ts}};
  const Instance inst = make_instance(sc);
  std::vector<IntegralEstimate> est;
  json per_t = json::array();
  bool ok = true;
  for (size_t k = 0; k < ts.size(); ++k) {
    est.push_back(virtual_residue_mc(inst, ts[k], r.samples, r.seed + k, o.threads));
    const auto& e = est.back();
    const bool vanish = std::abs(e.value) <= 3.0 * e.std_error;
    ok = ok && vanish;
    json j = estimate_json(e);
    j["t"] = ts[k];
    j["within_3_sigma"] = vanish;
    per_t.push_back(j);
  }
  bool agree = true;
  for (size_t a = 0; a < est.size(); ++a)
    for (size_t b = a + 1; b < est.size(); ++b)
      agree = agree && std::abs(est[a].value - est[b].value) <=
                           3.0 * std::hypot(est[a].std_error, est[b].std_error);
  out.results = {{"estimates", per_t}, {"t_agreement", agree}};
  ok = ok && agree;
  // σ budget against Σ|local residues| when the zeros are simple.
  try {
    const auto l = global_residue_sum(inst.section(), inst.psi().H, r.seed, o.threads);
    double worst = 0.0;
    for (const auto& e : est) worst = std::max(worst, e.std_error);
    const bool budget = worst <= r.tol * l.abs_sum;
    out.results["residue_abs_sum"] = l.abs_sum;
    out.results["max_std_error"] = worst;
    out.results["sigma_budget_ok"] = budget;
    ok = ok && budget;
  } catch (const PreconditionError& e) {
    out.results["sigma_budget_ok"] = nullptr;
    out.message = std::string("sigma budget not checked: ") + e.what();
  }
  out.verdict = verdict_of(ok);
  return out;
}

TaskResult run_local_mass(const Scenario& sc, const TaskSpec& t, const RunOptions& o) {
  const auto r = resolve(t, o, 0.05, 200000);
  const double tt = t.t.empty() ? 0.01 : t.t.front();
  const Instance inst = make_instance(sc);
  const auto l = global_residue_sum(inst.section(), inst.psi().H, r.seed, o.threads);
  std::vector<std::vector<Complex>> zeros;
  for (const auto& e : l.entries) zeros.push_back(e.w);
  double radius = 0.5;
  for (size_t a = 0; a < zeros.size(); ++a)
    for (size_t b = a + 1; b < zeros.size(); ++b) {
      double d2 = 0;
      for (int k = 0; k < sc.n; ++k) d2 += std::norm(zeros[a][k] - zeros[b][k]);
      radius = std::min(radius, 0.45 * std::sqrt(d2));
    }
  radius = t.radius.value_or(radius);
  TaskResult out;
  out.inputs = {{"tol", r.tol}, {"seed", r.seed}, {"samples", r.samples}, {"t", tt}, {"radius", radius}};
  json masses = json::array();
  bool ok = true;
  Complex sum = 0.0;
  double var = 0.0;
  for (size_t k = 0; k < l.entries.size(); ++k) {
    const auto& z = l.entries[k];
    const auto m = local_mass(inst, 0, z.w, zeros, tt, radius, r.samples, r.seed + k, o.threads);
    const Complex expected = double(orientation_sign(sc.n)) * z.value;
    const double rel = std::abs(m.value - expected) / std::abs(expected);
    const bool match = rel <= r.tol;
    ok = ok && match;
    sum += m.value;
    var += m.std_error * m.std_error;
    json j = estimate_json(m);
    j["w"] = point_json(z.w);
    j["expected"] = complex_json(expected);
    j["relative_error"] = rel;
    j["match"] = match;
    masses.push_back(j);
  }
  const bool cancel = std::abs(sum) <= 3.0 * std::sqrt(var);
  out.results = {{"orientation_sign", orientation_sign(sc.n)},
                 {"masses", masses},
                 {"mass_sum", complex_json(sum)},
                 {"mass_sum_std_error", std::sqrt(var)},
                 {"masses_cancel", cancel}};
  out.verdict = verdict_of(ok && cancel);
  return out;
}

TaskResult run_curve_localization(const Scenario& sc, const TaskSpec& t, const RunOptions& o) {
  const auto r = resolve(t, o, 0.02, 100000);
  TaskResult out;
  out.inputs = {{"tol", r.tol}, {"seed", r.seed}, {"samples", r.samples}};
  const CurveInstance c(make_instance(sc));
  const auto term = curve_localized_term(c, r.samples, r.seed, o.threads);
  const auto& e = term.estimate;
  out.results = estimate_json(e);
  out.results["sheets"] = term.sheets;
  out.results["max_pointwise"] = term.max_pointwise;
  if (sc.metric.kind == "fubini_study") {
    const bool zero = term.max_pointwise <= 1e-12;
    out.results["pointwise_zero"] = zero;
    out.verdict = verdict_of(zero);
  } else {
    const bool nonzero = term.max_pointwise > 1e-4;
    const bool vanish = std::abs(e.value) <= 3.0 * e.std_error;
    const bool precise = e.std_error <= r.tol * e.l1_mass;
    out.results["pointwise_nonzero"] = nonzero;
    out.results["within_3_sigma"] = vanish;
    out.results["sigma_within_tol_of_l1"] = precise;
    out.verdict = verdict_of(nonzero && vanish && precise);
  }
  return out;
}

void validate_task_shape(const Scenario& sc, const TaskSpec& t) {
  const std::string k = task_name(t.kind);
  const bool curve_section = sc.n == 2 && sc.section.size() == 2 &&
                             parse_poly(sc.section[1], 3).is_zero();
  switch (t.kind) {
    case TaskKind::cayley_bacharach:
      if (sc.n != 2 || sc.curve) bad(k + " needs n = 2 and two plane curves in section");
      break;
    case TaskKind::generalized_cb:
      if (sc.n != 2 || !sc.curve) bad(k + " needs n = 2 and a 'curve' key");
      break;
    case TaskKind::curve_localization:
      if (!curve_section || sc.curve) bad(k + " needs n = 2 and section (f, 0)");
      break;
    default:
      break;
  }
}

}  // namespace

Scenario parse_scenario(const json& doc, const std::string& name) {
  if (!doc.is_object()) bad("scenario must be a JSON object");
  allow_keys(doc, {"n", "degrees", "section", "psi", "metric", "tasks", "backend", "curve", "description"},
             "scenario");
  for (const char* key : {"n", "degrees", "section", "psi", "tasks"})
    if (!doc.contains(key)) bad(std::string("missing required key '") + key + "'");
  Scenario sc;
  sc.name = name;
  sc.n = get_int(doc["n"], "n");
  if (sc.n < 1 || sc.n > 4) bad("n must be in 1..4");
  if (!doc["degrees"].is_array() || static_cast<int>(doc["degrees"].size()) != sc.n)
    bad("degrees must be an array of n integers");
  for (const auto& d : doc["degrees"]) sc.degrees.push_back(get_int(d, "degrees[]"));
  for (int d : sc.degrees)
    if (d < 1) bad("degrees must be positive");
  if (!doc["section"].is_array() || static_cast<int>(doc["section"].size()) != sc.n)
    bad("section must be an array of n polynomial strings");
  for (const auto& s : doc["section"]) sc.section.push_back(get_string(s, "section[]"));
  sc.psi = get_string(doc["psi"], "psi");
  if (doc.contains("curve")) {
    sc.curve = get_string(doc["curve"], "curve");
    if (sc.n != 2) bad("'curve' is only supported on P^2");
    try {
      const HomogeneousPoly f = parse_poly(*sc.curve, 3);
      if (f.degree() < 1 || f.degree() >= sc.degrees[0]) bad("curve degree must be in 1..degrees[0]-1");
    } catch (const ParseError& e) {
      bad(std::string("curve: ") + e.what());
    } catch (const DimensionError& e) {
      bad(std::string("curve: ") + e.what());
    }
  }
  if (doc.contains("backend")) {
    sc.backend = get_string(doc["backend"], "backend");
    if (sc.backend != "float" && sc.backend != "exact") bad("backend must be \"float\" or \"exact\"");
  }
  if (doc.contains("metric")) {
    const json& m = doc["metric"];
    if (!m.is_object()) bad("metric must be an object");
    allow_keys(m, {"kind", "epsilon", "q", "pair", "f_index"}, "metric");
    if (!m.contains("kind")) bad("metric.kind is required");
    sc.metric.kind = get_string(m["kind"], "metric.kind");
    if (sc.metric.kind == "perturbed") {
      if (!m.contains("epsilon") || !m.contains("q")) bad("perturbed metric needs epsilon and q");
      sc.metric.epsilon = get_number(m["epsilon"], "metric.epsilon");
      sc.metric.q = get_string(m["q"], "metric.q");
      if (m.contains("pair")) {
        if (!m["pair"].is_array() || m["pair"].size() != 2) bad("metric.pair must be [a, b]");
        sc.metric.pair_a = get_int(m["pair"][0], "metric.pair[0]");
        sc.metric.pair_b = get_int(m["pair"][1], "metric.pair[1]");
      }
      if (m.contains("f_index")) sc.metric.f_index = get_int(m["f_index"], "metric.f_index");
    } else if (sc.metric.kind != "fubini_study") {
      bad("metric.kind must be \"fubini_study\" or \"perturbed\"");
    }
  }
  // deg ψ constraint and the rest of the instance checks.
  const int D = BundleSpec{sc.n, sc.degrees}.psi_degree();
  try {
    const HomogeneousPoly H = parse_poly(sc.psi, sc.n + 1);
    if (!H.is_zero() && H.degree() != D)
      bad("psi has degree " + std::to_string(H.degree()) +
          "; the degree constraint deg psi = sum(d_i) - n - 1 requires " + std::to_string(D));
  } catch (const ParseError& e) {
    bad(std::string("psi: ") + e.what());
  } catch (const DimensionError& e) {
    bad(std::string("psi: ") + e.what());
  }
  if (D < 0) bad("degree constraint sum(d_i) - n - 1 >= 0 violated");
  make_instance(sc);
  if (sc.backend == "exact") {
    for (const auto& s : sc.section) {
      try {
        parse_exact(s, sc.n + 1);
      } catch (const std::exception& e) {
        bad(std::string("exact backend: ") + e.what());
      }
    }
  }

  if (!doc["tasks"].is_array()) bad("tasks must be an array");
  for (const auto& tj : doc["tasks"]) {
    if (!tj.is_object()) bad("each task must be an object");
    allow_keys(tj, {"kind", "tol", "t", "samples", "seed", "radius"}, "task");
    if (!tj.contains("kind")) bad("task.kind is required");
    const std::string kind = get_string(tj["kind"], "task.kind");
    const auto it = kTaskNames.find(kind);
    if (it == kTaskNames.end()) bad("unsupported task kind '" + kind + "'");
    TaskSpec t;
    t.kind = it->second;
    if (tj.contains("tol")) {
      t.tol = get_number(tj["tol"], "task.tol");
      if (!(*t.tol > 0)) bad("task.tol must be positive");
    }
    if (tj.contains("t")) {
      if (!tj["t"].is_array() || tj["t"].empty()) bad("task.t must be a non-empty array");
      for (const auto& v : tj["t"]) {
        const double x = get_number(v, "task.t[]");
        if (!(x > 0)) bad("task.t values must be positive");
        t.t.push_back(x);
      }
    }
    if (tj.contains("samples")) {
      if (!tj["samples"].is_number_integer() || tj["samples"].get<long>() < 1000)
        bad("task.samples must be an integer >= 1000");
      t.samples = tj["samples"].get<long>();
    }
    if (tj.contains("seed")) {
      if (!tj["seed"].is_number_unsigned()) bad("task.seed must be a non-negative integer");
      t.seed = tj["seed"].get<std::uint64_t>();
    }
    if (tj.contains("radius")) {
      t.radius = get_number(tj["radius"], "task.radius");
      if (!(*t.radius > 0)) bad("task.radius must be positive");
    }
    validate_task_shape(sc, t);
    sc.tasks.push_back(t);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("scenario is not valid JSON: ") + e.what());
  }
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  return parse_scenario(doc, name);
}

json scenario_schema() {
  const json poly = {{"type", "string"}, {"description", "polynomial in z0..zn, e.g. \"z1^2 - 2*z0*z2 + (1+2i)*z0^2\""}};
  json task = {
      {"type", "object"},
      {"required", {"kind"}},
      {"additionalProperties", false},
      {"properties",
       {{"kind", {{"enum", {"euler_jacobi", "cayley_bacharach", "generalized_cb", "virtual_residue",
                            "local_mass", "curve_localization"}}}},
        {"tol", {{"type", "number"}, {"exclusiveMinimum", 0}}},
        {"t", {{"type", "array"}, {"items", {{"type", "number"}, {"exclusiveMinimum", 0}}}, {"minItems", 1}}},
        {"samples", {{"type", "integer"}, {"minimum", 1000}}},
        {"seed", {{"type", "integer"}, {"minimum", 0}}},
        {"radius", {{"type", "number"}, {"exclusiveMinimum", 0}}}}}};
  json metric = {
      {"type", "object"},
      {"required", {"kind"}},
      {"additionalProperties", false},
      {"properties",
       {{"kind", {{"enum", {"fubini_study", "perturbed"}}}},
        {"epsilon", {{"type", "number"}, {"exclusiveMinimum", 0}}},
        {"q", poly},
        {"pair", {{"type", "array"}, {"items", {{"type", "integer"}}}, {"minItems", 2}, {"maxItems", 2}}},
        {"f_index", {{"type", "integer"}, {"minimum", 0}}}}}};
  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
          {"title", "residue-lab scenario"},
          {"type", "object"},
          {"required", {"n", "degrees", "section", "psi", "tasks"}},
          {"additionalProperties", false},
          {"properties",
           {{"n", {{"type", "integer"}, {"minimum", 1}, {"maximum", 4}}},
            {"degrees", {{"type", "array"}, {"items", {{"type", "integer"}, {"minimum", 1}}},
                         {"description", "d_i of V = O(d_1) + ... + O(d_n)"}}},
            {"section", {{"type", "array"}, {"items", poly}}},
            {"psi", {{"allOf", {poly}}, {"description", "H of degree sum(d_i) - n - 1"}}},
            {"curve", {{"allOf", {poly}},
                       {"description", "generalized_cb only: s = (curve*section[0], section[1])"}}},
            {"metric", metric},
            {"tasks", {{"type", "array"}, {"items", task}}},
            {"backend", {{"enum", {"float", "exact"}}}},
            {"description", {{"type", "string"}}}}}};
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::precondition_failed: return "precondition-failed";
    case Verdict::assumed_hypotheses: return "assumed-hypotheses";
  }
  return "?";
}

bool VerificationReport::all_pass() const {
  return std::all_of(tasks.begin(), tasks.end(), [](const TaskResult& t) {
    return t.verdict == Verdict::pass || t.verdict == Verdict::assumed_hypotheses;
  });
}

VerificationReport run_scenario(const Scenario& sc, const RunOptions& opts) {
  VerificationReport rep;
  rep.tool_version = kToolVersion;
  rep.scenario = sc.name;
  rep.backend = sc.backend;
  rep.seed = opts.seed;
  for (const auto& task : sc.tasks) {
    const auto start = std::chrono::steady_clock::now();
    TaskResult res;
    try {
      switch (task.kind) {
        case TaskKind::euler_jacobi: res = run_euler_jacobi(sc, task, opts); break;
        case TaskKind::cayley_bacharach: res = run_cayley_bacharach(sc, task, opts); break;
        case TaskKind::generalized_cb: res = run_generalized_cb(sc, task, opts); break;
        case TaskKind::virtual_residue: res = run_virtual_residue(sc, task, opts); break;
        case TaskKind::local_mass: res = run_local_mass(sc, task, opts); break;
        case TaskKind::curve_localization: res = run_curve_localization(sc, task, opts); break;
      }
    } catch (const PreconditionError& e) {
      res.verdict = Verdict::precondition_failed;
      res.message = e.what();
    } catch (const NumericalFailure& e) {
      res.verdict = Verdict::fail;
      res.message = std::string("numerical failure: ") + e.what();
    }
    res.kind = task_name(task.kind);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.tasks.push_back(std::move(res));
  }
  return rep;
}

VerificationReport run_scenario(const std::string& path, const RunOptions& opts) {
  return run_scenario(load_scenario(path), opts);
}

namespace {

std::string fmt_complex(const json& z) {
  std::ostringstream os;
  os << std::setprecision(10) << z[0].get<double>() << (z[1].get<double>() < 0 ? " - " : " + ")
     << std::abs(z[1].get<double>()) << "i";
  return os.str();
}

std::string fmt_point(const json& w) {
  std::string s = "(";
  for (size_t k = 0; k < w.size(); ++k) s += (k ? ", " : "") + fmt_complex(w[k]);
  return s + ")";
}

void text_results(std::ostringstream& os, const json& results) {
  for (auto it = results.begin(); it != results.end(); ++it) {
    if (it.key() == "entries") {
      os << "    residue ledger:\n";
      int k = 0;
      for (const auto& e : *it)
        os << "      [" << k++ << "] w = " << fmt_point(e["w"]) << "  res = " << fmt_complex(e["residue"]) << "\n";
    } else if (it.key() == "held_out" || it.key() == "estimates" || it.key() == "masses") {
      os << "    " << it.key() << ":\n";
      for (const auto& e : *it) os << "      " << e.dump() << "\n";
    } else {
      os << "    " << it.key() << ": " << it->dump() << "\n";
    }
  }
}

}  // namespace

std::string emit_report(const VerificationReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    json tasks = json::array();
    int passed = 0;
    for (const auto& t : report.tasks) {
      tasks.push_back({{"kind", t.kind},
                       {"inputs", t.inputs.is_null() ? json::object() : t.inputs},
                       {"results", t.results.is_null() ? json::object() : t.results},
                       {"verdict", to_string(t.verdict)},
                       {"message", t.message}});
      if (t.verdict == Verdict::pass || t.verdict == Verdict::assumed_hypotheses) ++passed;
    }
    json doc = {{"tool", "residue-lab"},
                {"version", report.tool_version},
                {"scenario", report.scenario},
                {"backend", report.backend},
                {"seed", report.seed ? json(*report.seed) : json(nullptr)},
                {"tasks", tasks},
                {"summary",
                 {{"tasks", static_cast<int>(report.tasks.size())},
                  {"passed", passed},
                  {"all_pass", report.all_pass()}}}};
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "residue-lab " << report.tool_version << "  scenario " << report.scenario << "  backend "
     << report.backend << "\n";
  int k = 0;
  for (const auto& t : report.tasks) {
    os << "\n[" << k++ << "] " << t.kind << ": " << to_string(t.verdict) << "  (" << std::fixed
       << std::setprecision(2) << t.wall_seconds << " s)\n";
    os.unsetf(std::ios::fixed);
    if (!t.message.empty()) os << "    note: " << t.message << "\n";
    if (!t.inputs.is_null()) os << "    inputs: " << t.inputs.dump() << "\n";
    if (!t.results.is_null()) text_results(os, t.results);
  }
  int passed = 0;
  for (const auto& t : report.tasks)
    if (t.verdict == Verdict::pass || t.verdict == Verdict::assumed_hypotheses) ++passed;
  os << "\nsummary: " << passed << "/" << report.tasks.size() << " tasks passed -> "
     << (report.all_pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace rlab
