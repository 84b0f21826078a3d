// command-line front end: problem-file ingestion, subcommand dispatch,
// human output on stdout and optional machine-readable JSON reports.
//
// exit codes: 0 certified / clean, 1 not certified / a stage failed,
// 2 invalid input, 3 numerical failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "varcert/certify.hpp"
#include "varcert/problem_file.hpp"
#include "varcert/report_io.hpp"

namespace {

struct Args {
  std::string file;
  varcert::CliOverrides overrides;
};

void add_common_flags(CLI::App* sub, Args& args) {
  sub->add_option("file", args.file, "problem file")->required();
  sub->add_option("--resolution", args.overrides.resolution,
                  "per-axis node count (one value broadcasts to all axes)")
      ->delimiter(',');
  sub->add_option("--seed", args.overrides.seed, "perturbation RNG seed");
  sub->add_option("--samples", args.overrides.num_samples, "number of sampled perturbations");
  sub->add_option("--tol-el", args.overrides.tol_el, "stationarity residual floor");
  sub->add_option("--tol-inv", args.overrides.tol_inv, "field inversion tolerance");
  sub->add_option("--tol-exact", args.overrides.tol_exact, "exactness residual bound");
  sub->add_option("--tol-invariance", args.overrides.tol_invariance, "relative integral deviation bound");
  sub->add_option("--deltas", args.overrides.deltas, "descending tube radius candidates")->delimiter(',');
  sub->add_option("--report", args.overrides.report_path, "write the JSON report to this path");
  sub->add_flag("--continue-on-failure", args.overrides.continue_on_failure,
                "keep running later stages after a failure");
}

int exit_code(const varcert::CertificationReport& report) {
  switch (report.verdict) {
    case varcert::Verdict::CertifiedLocalMin:
      return 0;
    case varcert::Verdict::InvalidInput:
      return 2;
    case varcert::Verdict::NotCertified:
      // partial runs make no certification claim; clean means exit 0
      return report.failed_stages.empty() && report.partial_run ? 0 : 1;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical certification of local minimality for variational problems"};
  app.require_subcommand(1);

  Args args;
  CLI::App* cmd_check = app.add_subcommand("check", "parse and validate a problem file");
  cmd_check->add_option("file", args.file, "problem file")->required();
  CLI::App* cmd_stationary = app.add_subcommand("stationary", "candidate stationarity residuals");
  CLI::App* cmd_field = app.add_subcommand("field", "tube coverage, member spot checks, exactness");
  CLI::App* cmd_hilbert = app.add_subcommand("hilbert", "integral invariance statistics");
  CLI::App* cmd_excess = app.add_subcommand("excess", "excess summary over sampled competitors");
  CLI::App* cmd_certify = app.add_subcommand("certify", "full certification pipeline");
  for (CLI::App* sub : {cmd_stationary, cmd_field, cmd_hilbert, cmd_excess, cmd_certify})
    add_common_flags(sub, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  unsigned stages = varcert::kStageAll;
  if (cmd_stationary->parsed())
    stages = varcert::kStageStationarity;
  else if (cmd_field->parsed())
    stages = varcert::kStageTube | varcert::kStageMembers | varcert::kStageExactness;
  else if (cmd_hilbert->parsed())
    stages = varcert::kStageInvariance;
  else if (cmd_excess->parsed())
    stages = varcert::kStageExcess;

  try {
    varcert::LoadedProblem loaded = varcert::load_problem(args.file);
    if (cmd_check->parsed()) {
      std::cout << "ok: " << args.file << " (n = " << loaded.spec.lagrangian.dims().n
                << ", N = " << loaded.spec.lagrangian.dims().N << ")\n";
      return 0;
    }
    varcert::apply_overrides(loaded, args.overrides);

    varcert::CertifyOptions options;
    options.continue_on_failure = loaded.run.continue_on_failure;
    options.stages = stages;
    varcert::CertificationReport report = varcert::certify(loaded.spec, options);
    varcert::print_report(std::cout, report);
    if (!loaded.run.report_path.empty()) {
      varcert::write_report(loaded.run.report_path, report);
      std::cout << "report written to " << loaded.run.report_path << "\n";
    }
    return exit_code(report);
  } catch (const varcert::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const varcert::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const varcert::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const varcert::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
