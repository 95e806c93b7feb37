#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "cbfsim/logging.hpp"
#include "cbfsim/plot.hpp"
#include "cbfsim/scenario.hpp"
#include "cbfsim/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitSafetyViolation = 2;

struct RunOptions {
  std::string scenario_path;
  std::string out_dir = "out";
  uint64_t seed = 0;
  bool seed_set = false;
  bool enable_estimation = false;
  bool emit_plots = false;
  bool log_clouds = false;
  bool log_barriers = false;
  int log_stride = 1;
  std::string log_level = "info";
};

int do_validate(const std::string& path) {
  try {
    const cbfsim::ScenarioConfig cfg = cbfsim::load_scenario(path);
    const std::vector<std::string> failures = cbfsim::validate_scenario(cfg);
    if (failures.empty()) {
      std::cout << "ok: " << path << " passes all validation checks\n";
      return kExitOk;
    }
    std::cout << failures.size() << " validation failure(s) in " << path << ":\n";
    for (const std::string& f : failures) std::cout << "  - " << f << '\n';
    return kExitConfigError;
  } catch (const cbfsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int do_run(const RunOptions& opt) {
  cbfsim::ScenarioConfig cfg;
  try {
    cfg = cbfsim::load_scenario(opt.scenario_path);
    if (opt.seed_set) cfg.seed = opt.seed;
    if (opt.enable_estimation) cfg.estimation.enabled = true;
    const std::vector<std::string> failures = cbfsim::validate_scenario(cfg);
    if (!failures.empty()) {
      std::cerr << failures.size() << " validation failure(s):\n";
      for (const std::string& f : failures) std::cerr << "  - " << f << '\n';
      return kExitConfigError;
    }
  } catch (const cbfsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  std::filesystem::create_directories(opt.out_dir);
  cbfsim::CsvSinkFiles sink_files(opt.out_dir, opt.log_clouds, opt.log_barriers,
                                  /*log_qp=*/true, cfg.estimation.enabled);

  const cbfsim::RunResult result = cbfsim::run_scenario(cfg, sink_files.sinks());
  cbfsim::write_trajectory_csv(opt.out_dir + "/trajectory.csv", result.trajectory,
                               opt.log_stride);
  cbfsim::write_metrics_json(opt.out_dir + "/metrics.json", result.metrics);
  if (opt.emit_plots) {
    cbfsim::plot_trajectories_svg(opt.out_dir + "/trajectories.svg", result.trajectory, &cfg);
  }

  if (opt.log_level != "quiet") {
    std::cout << "scenario '" << cfg.name << "' finished in " << result.metrics.runtime_seconds
              << " s\n"
              << "  min pairwise distance: " << result.metrics.min_pairwise_distance << '\n'
              << "  min obstacle clearance: " << result.metrics.min_obstacle_clearance << '\n'
              << "  infeasible QP fallbacks: " << result.metrics.infeasibility_count << '\n'
              << "  deadlock events: " << result.metrics.deadlock_count << '\n';
  }
  if (result.metrics.aborted) {
    std::cerr << "safety violation: " << result.metrics.abort_reason << '\n';
    return kExitSafetyViolation;
  }
  return kExitOk;
}

int do_plot(const std::string& csv_path, const std::string& out_dir,
            const std::string& scenario_path) {
  try {
    const cbfsim::Trajectory traj = cbfsim::read_trajectory_csv(csv_path);
    std::filesystem::create_directories(out_dir);
    if (!scenario_path.empty()) {
      const cbfsim::ScenarioConfig cfg = cbfsim::load_scenario(scenario_path);
      cbfsim::plot_trajectories_svg(out_dir + "/trajectories.svg", traj, &cfg);
    } else {
      cbfsim::plot_trajectories_svg(out_dir + "/trajectories.svg", traj, nullptr);
    }
    std::cout << "wrote " << out_dir << "/trajectories.svg\n";
    return kExitOk;
  } catch (const cbfsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic multi-agent safety-filter simulator"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write artifacts");
  run->add_option("scenario", run_opt.scenario_path, "Scenario config file")->required();
  run->add_option("--out", run_opt.out_dir, "Output directory (default: out)");
  run->add_option("--seed", run_opt.seed, "Override the scenario seed")
      ->each([&](const std::string&) { run_opt.seed_set = true; });
  run->add_flag("--enable-estimation", run_opt.enable_estimation,
                "Force the identification warm-up on");
  run->add_flag("--emit-plots", run_opt.emit_plots, "Write trajectory SVG plots");
  run->add_flag("--log-clouds", run_opt.log_clouds, "Write per-step scan points CSV");
  run->add_flag("--log-coefficients", run_opt.log_barriers,
                "Write per-step fitted coefficient CSV");
  run->add_option("--log-stride", run_opt.log_stride, "Keep every Nth trajectory row")
      ->check(CLI::PositiveNumber);
  run->add_option("--log-level", run_opt.log_level, "quiet|info");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Check a scenario without simulating");
  validate->add_option("scenario", validate_path, "Scenario config file")->required();

  std::string plot_csv, plot_out = "out", plot_scenario;
  CLI::App* plot = app.add_subcommand("plot", "Re-render plots from a trajectory.csv");
  plot->add_option("trajectory", plot_csv, "trajectory.csv produced by run")->required();
  plot->add_option("--out", plot_out, "Output directory");
  plot->add_option("--scenario", plot_scenario, "Scenario file for obstacle/goal overlays");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(run_opt);
    if (validate->parsed()) return do_validate(validate_path);
    if (plot->parsed()) return do_plot(plot_csv, plot_out, plot_scenario);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitOk;
}
