// Batch front end: paraxial <workflow> --config run.ini --out results/
#include <CLI11.hpp>
#include <iostream>
#include <map>

#include "paraxial/config.hpp"
#include "paraxial/error.hpp"
#include "paraxial/workflows.hpp"

namespace {

using paraxial::ErrorKind;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain_overflow:
    case ErrorKind::instability:
    case ErrorKind::singular_propagation:
    case ErrorKind::collapse_regime:
    case ErrorKind::degenerate_beam:
      return 3;
    case ErrorKind::invariant_violation:
      return 4;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear paraxial beam propagation and ABCD analysis"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  long long seed = 0;
  int threads = 1;
  std::vector<std::string> sets;

  const std::vector<std::pair<std::string, paraxial::Workflow>> commands{
      {"propagate", paraxial::Workflow::propagate},
      {"predict", paraxial::Workflow::predict},
      {"compare", paraxial::Workflow::compare},
      {"sweep", paraxial::Workflow::sweep},
      {"analyze-tof", paraxial::Workflow::analyze_tof},
  };
  const std::map<std::string, std::string> help{
      {"propagate", "split-step propagation with moment diagnostics"},
      {"predict", "moment ODE and ABCD q-law prediction"},
      {"compare", "numeric propagation against the ABCD q-law"},
      {"sweep", "run one workflow over a grid of parameter values"},
      {"analyze-tof", "velocity dispersion from time-of-flight widths"},
  };
  for (const auto& [name, _] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "run configuration (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "reserved; all workflows are deterministic");
    sub->add_option("--threads", threads, "worker threads for sweep")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--set", sets, "override a config entry, section.key=value (repeatable)");
  }
  CLI11_PARSE(app, argc, argv);

  paraxial::Workflow workflow = paraxial::Workflow::propagate;
  for (const auto& [name, w] : commands) {
    if (app.got_subcommand(name)) workflow = w;
  }

  try {
    paraxial::ConfigOverrides overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) paraxial::fail(ErrorKind::config, "--set expects section.key=value, got '" + s + "'");
      overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    paraxial::RunOutcome outcome;
    if (workflow == paraxial::Workflow::sweep) {
      outcome = paraxial::run_sweep(config_path, overrides, out_dir, threads);
      if (outcome.failure) {
        std::cerr << "sweep: at least one point failed (" << paraxial::to_string(*outcome.failure)
                  << "); see index.json\n";
        return exit_code(*outcome.failure);
      }
    } else {
      const auto cfg = paraxial::parse_config(config_path, overrides);
      if (cfg.run.workflow && *cfg.run.workflow != workflow) {
        std::cerr << "note: config names workflow '" << paraxial::to_string(*cfg.run.workflow) << "', running '"
                  << paraxial::to_string(workflow) << "'\n";
      }
      outcome = paraxial::execute_workflow(cfg, workflow, out_dir);
    }
    if (!outcome.passed) {
      std::cerr << "checks failed; see report.json\n";
      return 4;
    }
    return 0;
  } catch (const paraxial::PropagationError& e) {
    std::cerr << "error (" << paraxial::to_string(e.kind()) << " at u = " << e.u() << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const paraxial::Error& e) {
    std::cerr << "error (" << paraxial::to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
