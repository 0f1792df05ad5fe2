#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "varigame/experiment/config.hpp"
#include "varigame/optimizer.hpp"

namespace varigame::experiment {

/// Flags shared by every subcommand.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> runs;
  unsigned threads = 1;
  bool deterministic = false; ///< suppress the timestamp comment line
  std::string svg;            ///< optional plot path
};

/// --seed and --runs override the config's sim block.
ExperimentConfig apply_overrides(ExperimentConfig config, const RunOptions& options);

/// One row per invader: invader,n_nodes,k,runs,fixations,non_absorbed,
/// estimate,stderr,theory,neutral.
void run_fixation(const ExperimentConfig& config, const RunOptions& options, std::ostream& out);

struct TrajectoryOptions {
  bool ode = false;
  std::string policy; ///< "", "max_gradient" or "min_fitness_diff"
  double t_end = 10000.0;
  double step = 1.0;
  double sample_interval = 100.0;
};

/// Monte Carlo: run,t,coop_fraction with one block per run (config runs
/// trajectories) followed by run = "mean". ODE: t,coop_fraction.
void run_trajectory(const ExperimentConfig& config, const RunOptions& options, const TrajectoryOptions& traj,
                    std::ostream& out);

struct TheoryOptions {
  std::string sweep_parameter; ///< empty: the config's first sweep axis, else the config point alone
  double from = 0.0;
  double to = 1.0;
  int steps = 50;
  std::string curve; ///< "", "gradient" or "fitness_diff"
  int curve_points = 101;
};

/// Swept analytics: <parameter>,rho_a,rho_b,rho_ratio,thm1_margin,thm1_holds,
/// thm1_threshold,thm2_margin,thm2_holds,thm2_threshold. With a curve:
/// p_a,<curve>.
void run_theory(const ExperimentConfig& config, const RunOptions& options, const TheoryOptions& theory,
                std::ostream& out);

struct OptimizeOptions {
  std::string objective = "max_gradient";
  bool verify = false;
  int resolution = 1000;
};

/// Policy segments as CSV, summary on `log`. Returns the number of grid
/// violations (0 unless --verify finds any).
std::size_t run_optimize(const ExperimentConfig& config, const RunOptions& options, const OptimizeOptions& opt,
                         std::ostream& out, std::ostream& log);

/// n_nodes,k,omega,rho_a_exact,residual,lumped; with `full`, configuration,
/// absorption_a rows instead.
void run_oracle(const ExperimentConfig& config, const RunOptions& options, bool full, std::ostream& out);

/// Cross product of the config's sweep axes; one row per grid cell with
/// fixation estimates for both invaders and the closed forms.
void run_sweep(const ExperimentConfig& config, const RunOptions& options, std::ostream& out);

struct ReproduceOptions {
  std::uint64_t runs = 100000;
  std::uint64_t seed = 20240601;
  int points = 11;
  std::uint64_t mc_seeds = 20;
  std::uint64_t mc_events = 100000;
};

/// Figure ids: fig1 fig2 fig3 fig4 fig5 sm1 sm2.
void run_reproduce(const std::string& figure, const RunOptions& options, const ReproduceOptions& repro,
                   std::ostream& out);

/// Two-game parameter sets exercising every case of the optimal-policy
/// analysis.
struct OptimizationCase {
  std::string figure; ///< fig4, sm1, fig5, sm2
  ObjectiveKind objective;
  std::string label; ///< expected case label
  DilemmaGame g1;
  DilemmaGame g2;
};

const std::vector<OptimizationCase>& optimization_cases();

ObjectiveKind parse_objective(const std::string& name);

} // namespace varigame::experiment
