#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cxshrink/errors.hpp"
#include "cxshrink/estimators.hpp"
#include "cxshrink/harness.hpp"
#include "cxshrink/verify.hpp"

namespace {

// Prints every row before deciding the exit code: failures must not hide
// later rows.
int print_table(const std::vector<cxshrink::VerifyRow>& rows) {
  bool all_pass = true;
  std::printf("%-44s %13s %13s  %s\n", "identity", "stat", "threshold",
              "result");
  for (const cxshrink::VerifyRow& row : rows) {
    std::printf("%-44s %13.6e %13.6e  %s\n", row.name.c_str(), row.stat,
                row.threshold, row.pass ? "PASS" : "FAIL");
    if (!row.pass) all_pass = false;
  }
  return all_pass ? 0 : 1;
}

void report_progress(std::size_t done, std::size_t total) {
  if (done % 100 == 0 || done == total)
    std::fprintf(stderr, "\rreplicate %zu/%zu", done, total);
  if (done == total) std::fputc('\n', stderr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"complex-mean shrinkage estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string csv_path;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run a Monte Carlo experiment from a JSON config and "
                  "write a CSV report");
  simulate->add_option("--config", config_path, "experiment config JSON")
      ->required();
  simulate->add_option("--out", csv_path, "output CSV path")->required();

  std::size_t stein_p = 2;
  std::size_t stein_reps = 100000;
  std::uint64_t stein_seed = 1;
  CLI::App* vstein = app.add_subcommand(
      "verify-stein",
      "Monte Carlo check of the complex normal integration-by-parts "
      "identity");
  vstein->add_option("--p", stein_p, "dimension");
  vstein->add_option("--reps", stein_reps, "Monte Carlo replicates");
  vstein->add_option("--seed", stein_seed, "RNG seed");

  std::size_t haff_p = 2;
  std::size_t haff_n = 8;
  std::size_t haff_reps = 100000;
  std::uint64_t haff_seed = 1;
  CLI::App* vhaff = app.add_subcommand(
      "verify-stein-haff",
      "Monte Carlo check of the complex Wishart integration-by-parts "
      "identity");
  vhaff->add_option("--p", haff_p, "dimension");
  vhaff->add_option("--n", haff_n, "degrees of freedom");
  vhaff->add_option("--reps", haff_reps, "Monte Carlo replicates");
  vhaff->add_option("--seed", haff_seed, "RNG seed");

  std::size_t calc_m = 4;
  std::size_t calc_p = 2;
  std::uint64_t calc_seed = 1;
  double calc_step = 1e-6;
  std::size_t calc_instances = 50;
  CLI::App* vcalc = app.add_subcommand(
      "verify-calculus",
      "Finite-difference check of the analytic matrix derivatives");
  vcalc->add_option("--m", calc_m, "rows of the mean");
  vcalc->add_option("--p", calc_p, "columns of the mean");
  vcalc->add_option("--seed", calc_seed, "RNG seed");
  vcalc->add_option("--fd-step", calc_step, "finite difference step");
  vcalc->add_option("--instances", calc_instances,
                    "gap-guarded instances per suite");

  std::string est_input;
  std::string est_name;
  std::string est_out;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "Apply one estimator to a JSON payload and write the "
                  "estimate as matrix JSON");
  estimate->add_option("--input", est_input, "input JSON with z and friends")
      ->required();
  estimate->add_option("--estimator", est_name, "estimator name")->required();
  estimate->add_option("--out", est_out, "output matrix JSON path")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) {
      const cxshrink::ExperimentConfig config =
          cxshrink::read_config_json(config_path);
      const std::vector<cxshrink::RiskReport> reports =
          cxshrink::run_experiment(config, report_progress);
      cxshrink::write_report_csv(reports, csv_path);
      std::fprintf(stderr, "wrote %s\n", csv_path.c_str());
      return 0;
    }
    if (*vstein)
      return print_table(
          cxshrink::verify_stein(stein_p, stein_reps, stein_seed));
    if (*vhaff)
      return print_table(
          cxshrink::verify_stein_haff(haff_p, haff_n, haff_reps, haff_seed));
    if (*vcalc)
      return print_table(cxshrink::verify_calculus(
          calc_m, calc_p, calc_seed, calc_step, calc_instances));
    if (*estimate) {
      const cxshrink::EstimateInput in =
          cxshrink::read_estimate_input(est_input);
      const cxshrink::EstimatorSpec spec =
          cxshrink::estimator_spec_from_name(est_name);
      const cxshrink::CMatrix result = cxshrink::estimate(
          spec, in.z, in.s ? &*in.s : nullptr,
          in.sigma ? &*in.sigma : nullptr, in.k ? &*in.k : nullptr,
          in.n.value_or(0));
      cxshrink::write_matrix_json(result, est_out);
      return 0;
    }
  } catch (const cxshrink::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
