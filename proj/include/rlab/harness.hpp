#pragma once

// Scenario files, task dispatch and verification reports for the CLI.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace rlab {

/// Malformed or inconsistent scenario input (exit code 2).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TaskKind {
  euler_jacobi,
  cayley_bacharach,
  generalized_cb,
  virtual_residue,
  local_mass,
  curve_localization
};

struct TaskSpec {
  TaskKind kind = TaskKind::euler_jacobi;
  std::optional<double> tol;
  std::vector<double> t;
  std::optional<long> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> radius;
};

struct MetricInput {
  std::string kind = "fubini_study";
  double epsilon = 0.0;
  std::string q;
  int pair_a = 0, pair_b = 1;
  int f_index = 0;
};

struct Scenario {
  std::string name;
  int n = 0;
  std::vector<int> degrees;
  std::vector<std::string> section;
  std::string psi;
  std::optional<std::string> curve;  // generalized CB: s = (curve·section[0], section[1])
  MetricInput metric;
  std::vector<TaskSpec> tasks;
  std::string backend = "float";
};

/// Parses and validates (schema, polynomial grammar, degree constraints,
/// metric positivity). Throws InputError.
Scenario parse_scenario(const nlohmann::ordered_json& doc, const std::string& name = "");
Scenario load_scenario(const std::string& path);

/// JSON schema of scenario files.
nlohmann::ordered_json scenario_schema();

enum class Verdict { pass, fail, precondition_failed, assumed_hypotheses };
const char* to_string(Verdict v);

struct TaskResult {
  std::string kind;
  nlohmann::ordered_json inputs;
  nlohmann::ordered_json results;
  Verdict verdict = Verdict::fail;
  std::string message;
  double wall_seconds = 0.0;  // text report only
};

struct VerificationReport {
  std::string tool_version;
  std::string scenario;
  std::string backend;
  std::optional<std::uint64_t> seed;
  std::vector<TaskResult> tasks;

  bool all_pass() const;
  int exit_code() const { return all_pass() ? 0 : 1; }
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides every task seed
  std::optional<long> samples;        // overrides every task sample count
  int threads = 1;
};

VerificationReport run_scenario(const Scenario& sc, const RunOptions& opts);
VerificationReport run_scenario(const std::string& path, const RunOptions& opts);

enum class ReportFormat { json, text };
std::string emit_report(const VerificationReport& report, ReportFormat format);

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace rlab
