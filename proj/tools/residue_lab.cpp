// residue-lab: run scenario verifications.
//   residue-lab verify <scenario> [--seed N] [--samples N] [--threads N] [--json-out PATH]
//   residue-lab schema

#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "rlab/errors.hpp"
#include "rlab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of residue identities on projective space"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rlab::kToolVersion);

  auto* verify = app.add_subcommand("verify", "run every task of a scenario file");
  std::string path, json_out;
  std::uint64_t seed = 0;
  long samples = 0;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  verify->add_option("scenario", path, "scenario JSON file")->required();
  auto* seed_opt = verify->add_option("--seed", seed, "override every task seed");
  auto* samples_opt =
      verify->add_option("--samples", samples, "override every task sample count")->check(CLI::Range(1000L, 1000000000L));
  verify->add_option("--threads", threads, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1, 1024));
  verify->add_option("--json-out", json_out, "write the JSON report here");

  auto* schema = app.add_subcommand("schema", "print the scenario JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (schema->parsed()) {
    std::cout << rlab::scenario_schema().dump(2) << "\n";
    return 0;
  }

  rlab::RunOptions opts;
  opts.threads = threads;
  if (*seed_opt) opts.seed = seed;
  if (*samples_opt) opts.samples = samples;
  try {
    const auto report = rlab::run_scenario(path, opts);
    std::cout << rlab::emit_report(report, rlab::ReportFormat::text);
    if (!json_out.empty()) {
      std::ofstream out(json_out, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot write " << json_out << "\n";
        return 2;
      }
      out << rlab::emit_report(report, rlab::ReportFormat::json);
    }
    return report.exit_code();
  } catch (const rlab::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
