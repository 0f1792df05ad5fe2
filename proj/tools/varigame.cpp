#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "varigame/experiment/commands.hpp"
#include "varigame/experiment/config.hpp"

using namespace varigame::experiment;

namespace {

struct Common {
  std::string config;
  std::string out;
  RunOptions run;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment config");
  cmd->add_option("--seed", c.run.seed, "base seed (overrides sim.seed)");
  cmd->add_option("--threads", c.threads, "worker threads (default: VARIGAME_THREADS or 1)");
  cmd->add_option("--out", c.out, "CSV output path (default: stdout, or output.csv from the config)");
  cmd->add_option("--runs", c.run.runs, "number of runs (overrides sim.runs)");
  cmd->add_flag("--deterministic", c.run.deterministic, "omit the timestamp comment line");
  cmd->add_option("--svg", c.run.svg, "also write an SVG line plot");
}

unsigned resolve_threads(const std::optional<unsigned>& flag) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("VARIGAME_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid VARIGAME_THREADS='" << env << "'\n";
  }
  return 1;
}

ExperimentConfig load(const Common& c) {
  return c.config.empty() ? parse_config(default_config_json()) : load_config(c.config);
}

// Output goes to --out, else output.csv from the config, else stdout.
template <class F>
void with_output(const Common& c, const std::string& config_csv, F&& body) {
  const std::string path = !c.out.empty() ? c.out : config_csv;
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  body(file);
}

void parse_range(const std::string& text, double& from, double& to, int& steps) {
  std::istringstream in(text);
  char c1 = 0, c2 = 0;
  if (!(in >> from >> c1 >> to >> c2 >> steps) || c1 != ':' || c2 != ':' || steps < 0)
    throw CLI::ValidationError("--sweep", "range must look like FROM:TO:STEPS");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary dynamics of cooperation with variable games on regular networks"};
  app.require_subcommand(1);

  Common fix, traj, theo, optz, orc, swp, rep;

  auto* fixation = app.add_subcommand("fixation", "Monte Carlo fixation probabilities of a single A and a single B");
  add_common(fixation, fix);

  auto* trajectory = app.add_subcommand("trajectory", "cooperator fraction over time (Monte Carlo or ODE)");
  add_common(trajectory, traj);
  TrajectoryOptions traj_opt;
  trajectory->add_flag("--ode", traj_opt.ode, "integrate the reduced dynamics instead of simulating");
  trajectory->add_option("--policy", traj_opt.policy, "optimal two-game policy: max_gradient or min_fitness_diff");
  trajectory->add_option("--t-end", traj_opt.t_end, "ODE end time");
  trajectory->add_option("--step", traj_opt.step, "ODE step");
  trajectory->add_option("--sample-interval", traj_opt.sample_interval, "ODE sampling interval");

  auto* theory = app.add_subcommand("theory", "closed-form fixation probabilities, conditions and thresholds");
  add_common(theory, theo);
  TheoryOptions theo_opt;
  std::vector<std::string> sweep_spec;
  theory->add_option("--sweep", sweep_spec, "PARAMETER FROM:TO:STEPS, e.g. dg1 0:1:50")->expected(2);
  theory->add_option("--curve", theo_opt.curve, "gradient or fitness_diff over p_A");
  theory->add_option("--points", theo_opt.curve_points, "points on the curve");

  auto* optimize = app.add_subcommand("optimize", "optimal two-game distribution as a function of p_A");
  add_common(optimize, optz);
  OptimizeOptions opt_opt;
  optimize->add_option("--objective", opt_opt.objective, "max_gradient or min_fitness_diff");
  optimize->add_flag("--verify", opt_opt.verify, "brute-force check on a grid");
  optimize->add_option("--resolution", opt_opt.resolution, "grid resolution for --verify");

  auto* oracle = app.add_subcommand("oracle", "exact fixation probability for small graphs");
  add_common(oracle, orc);
  bool full = false;
  oracle->add_flag("--full", full, "emit the absorption probability of every configuration");

  auto* sweep = app.add_subcommand("sweep", "fixation estimates over the cross product of the config's sweep axes");
  add_common(sweep, swp);

  auto* reproduce = app.add_subcommand("reproduce", "regenerate the data behind a figure");
  add_common(reproduce, rep);
  std::string figure;
  ReproduceOptions rep_opt;
  reproduce->add_option("figure", figure, "fig1 fig2 fig3 fig4 fig5 sm1 sm2")->required();
  reproduce->add_option("--points", rep_opt.points, "sweep points per series");
  reproduce->add_option("--seeds", rep_opt.mc_seeds, "Monte Carlo trajectories per series (fig4, fig5, sm1, sm2)");
  reproduce->add_option("--events", rep_opt.mc_events, "Monte Carlo trajectory horizon in events");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fixation->parsed()) {
      fix.run.threads = resolve_threads(fix.threads);
      const auto cfg = load(fix);
      with_output(fix, cfg.output.csv, [&](std::ostream& out) { run_fixation(cfg, fix.run, out); });
    } else if (trajectory->parsed()) {
      traj.run.threads = resolve_threads(traj.threads);
      const auto cfg = load(traj);
      with_output(traj, cfg.output.csv, [&](std::ostream& out) { run_trajectory(cfg, traj.run, traj_opt, out); });
    } else if (theory->parsed()) {
      theo.run.threads = resolve_threads(theo.threads);
      if (!sweep_spec.empty()) {
        theo_opt.sweep_parameter = sweep_spec[0];
        parse_range(sweep_spec[1], theo_opt.from, theo_opt.to, theo_opt.steps);
      }
      const auto cfg = load(theo);
      with_output(theo, cfg.output.csv, [&](std::ostream& out) { run_theory(cfg, theo.run, theo_opt, out); });
    } else if (optimize->parsed()) {
      const auto cfg = load(optz);
      std::size_t violations = 0;
      with_output(optz, cfg.output.csv,
                  [&](std::ostream& out) { violations = run_optimize(cfg, optz.run, opt_opt, out, std::cerr); });
      return violations == 0 ? 0 : 1;
    } else if (oracle->parsed()) {
      const auto cfg = load(orc);
      with_output(orc, cfg.output.csv, [&](std::ostream& out) { run_oracle(cfg, orc.run, full, out); });
    } else if (sweep->parsed()) {
      swp.run.threads = resolve_threads(swp.threads);
      const auto cfg = load(swp);
      with_output(swp, cfg.output.csv, [&](std::ostream& out) { run_sweep(cfg, swp.run, out); });
    } else if (reproduce->parsed()) {
      rep.run.threads = resolve_threads(rep.threads);
      if (rep.run.runs) rep_opt.runs = *rep.run.runs;
      if (rep.run.seed) rep_opt.seed = *rep.run.seed;
      with_output(rep, "", [&](std::ostream& out) { run_reproduce(figure, rep.run, rep_opt, out); });
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
