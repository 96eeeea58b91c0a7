// Batch front-end: plan beam geometry, synthesize pulse schedules, simulate
// 1D/2D addressing, sweep the mismatch error model, and run the verification
// suites. Scenarios come in as JSON files, reports go out as CSV or JSON.
//
// Exit codes: 0 pass, 1 physics/validation failure, 2 malformed scenario,
// 3 infeasible geometry.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "latrot/commands.hpp"
#include "latrot/scenario.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_physics_failure = 1;
constexpr int exit_bad_scenario = 2;
constexpr int exit_infeasible = 3;

struct Options {
  std::string scenario_path;
  std::string out_path;
  std::string format;
  double tolerance = -1.0;
  bool no_timestamp = false;
  bool all = false;
};

int run(latrot::cli::Mode mode, const Options& opts) {
  using namespace latrot::cli;
  try {
    Scenario scenario;
    if (!opts.scenario_path.empty()) {
      scenario = Scenario::from_file(opts.scenario_path);
      if (scenario.mode != mode)
        throw scenario_error(std::string("scenario mode \"") +
                             detail::mode_name(scenario.mode) +
                             "\" does not match the subcommand");
    } else if (mode == Mode::verify) {
      scenario.name = "verify-all";
      scenario.mode = Mode::verify;
      scenario.raw = {{"name", scenario.name}, {"mode", "verify"}};
    } else {
      throw scenario_error("this subcommand needs --scenario <file>");
    }

    if (opts.tolerance > 0.0) scenario.tolerance = opts.tolerance;
    if (opts.no_timestamp) scenario.with_timestamp = false;
    if (!opts.out_path.empty()) scenario.out_path = opts.out_path;
    if (!opts.format.empty()) {
      if (opts.format == "csv")
        scenario.format = ReportFormat::csv;
      else if (opts.format == "structured")
        scenario.format = ReportFormat::structured;
      else
        throw scenario_error("--format must be csv or structured");
    }

    const Report report = run_scenario(scenario);
    const std::string rendered = report.render(scenario.format);
    if (scenario.out_path) {
      std::ofstream out(*scenario.out_path);
      if (!out) throw scenario_error("cannot write report to " + *scenario.out_path);
      out << rendered;
    } else {
      std::cout << rendered;
    }

    if (!report.pass) {
      for (const std::string& f : report.failures)
        std::cerr << "failed: " << f << "\n";
      return exit_physics_failure;
    }
    return exit_pass;
  } catch (const latrot::infeasible_geometry& e) {
    std::cerr << "infeasible geometry: " << e.what() << "\n";
    return exit_infeasible;
  } catch (const latrot::degenerate_target& e) {
    std::cerr << "degenerate target: " << e.what() << "\n";
    return exit_physics_failure;
  } catch (const scenario_error& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return exit_bad_scenario;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_bad_scenario;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-qubit rotations in optical lattices with multi-qubit addressing"};
  app.set_version_flag("--version", std::string(latrot::tool_id));
  app.require_subcommand(1);

  Options opts;
  latrot::cli::Mode mode = latrot::cli::Mode::verify;

  auto add_common = [&](CLI::App* cmd, bool scenario_required) {
    auto* s = cmd->add_option("--scenario", opts.scenario_path, "scenario JSON file");
    if (scenario_required) s->required();
    cmd->add_option("--out", opts.out_path, "report output path (default stdout)");
    cmd->add_option("--format", opts.format, "report format: csv|structured");
    cmd->add_option("--tolerance", opts.tolerance, "pass/fail residual tolerance");
    cmd->add_flag("--no-timestamp", opts.no_timestamp, "omit the generated_at field");
  };

  CLI::App* plan = app.add_subcommand("plan", "beam geometry for a lattice");
  add_common(plan, true);
  plan->callback([&] { mode = latrot::cli::Mode::plan; });

  CLI::App* synth = app.add_subcommand("synthesize", "ordered pulse schedule + validation");
  add_common(synth, true);
  synth->callback([&] { mode = latrot::cli::Mode::synthesize; });

  CLI::App* sim = app.add_subcommand("simulate", "per-site evolution, 1D or 2D");
  add_common(sim, true);
  sim->callback([&] { mode = latrot::cli::Mode::simulate; });

  CLI::App* sweep = app.add_subcommand("sweep", "mismatch fidelity curve");
  add_common(sweep, true);
  sweep->callback([&] { mode = latrot::cli::Mode::sweep; });

  CLI::App* verify = app.add_subcommand("verify", "run the invariant suites");
  add_common(verify, false);
  verify->add_flag("--all", opts.all, "run the full default suite");
  verify->callback([&] { mode = latrot::cli::Mode::verify; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help/version or the usage error
    return code == 0 ? exit_pass : exit_bad_scenario;
  }
  return run(mode, opts);
}
