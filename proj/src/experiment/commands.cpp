#include "varigame/experiment/commands.hpp"

#include <cmath>

#include <fmt/format.h>

#include "varigame/engine.hpp"
#include "varigame/experiment/csv.hpp"
#include "varigame/experiment/parallel.hpp"
#include "varigame/experiment/svg.hpp"
#include "varigame/oracle.hpp"
#include "varigame/theory.hpp"

namespace varigame::experiment {

namespace {

void maybe_timestamp(std::ostream& out, const RunOptions& options, const std::string& what) {
  if (!options.deterministic) CsvWriter::comment(out, timestamp_comment(what));
}

std::optional<PairApproxParams> theory_params(const RegularGraph& graph, double omega) {
  if (graph.degree() < 3) return std::nullopt;
  return PairApproxParams{static_cast<int>(graph.degree()), graph.n_nodes(), omega};
}

std::optional<FreeParameter> free_parameter_of(const std::string& parameter) {
  const auto path = resolve_parameter(parameter);
  if (path.rfind("games.", 0) != 0) return std::nullopt;
  const auto dot = path.find('.', 6);
  if (dot == std::string::npos) return std::nullopt;
  const auto leaf = path.substr(dot + 1);
  if (leaf != "dg" && leaf != "dr") return std::nullopt;
  return FreeParameter{leaf == "dg" ? FreeParameter::Kind::Dg : FreeParameter::Kind::Dr,
                       std::stoul(path.substr(6, dot - 6))};
}

std::optional<double> threshold_or_empty(Condition condition, const std::optional<FreeParameter>& free, int k,
                                         const GameEnvironment& env) {
  if (!free) return std::nullopt;
  if (condition == Condition::FavorsCooperation && k < 3) return std::nullopt;
  try {
    return solve_threshold(condition, *free, k, env.pi, env.games);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::optional<double> opt(bool present, double value) {
  return present ? std::optional<double>(value) : std::nullopt;
}

} // namespace

ObjectiveKind parse_objective(const std::string& name) {
  if (name == "max_gradient" || name == "gradient") return ObjectiveKind::MaxGradient;
  if (name == "min_fitness_diff" || name == "fitness_diff") return ObjectiveKind::MinFitnessDiff;
  throw std::invalid_argument("unknown objective '" + name + "' (max_gradient or min_fitness_diff)");
}

ExperimentConfig apply_overrides(ExperimentConfig config, const RunOptions& options) {
  if (options.seed) config.sim.seed = *options.seed;
  if (options.runs) {
    if (*options.runs == 0) throw ConfigError("--runs", "must be positive");
    config.runs = *options.runs;
  }
  return config;
}

void run_fixation(const ExperimentConfig& config, const RunOptions& options, std::ostream& out) {
  const auto c = apply_overrides(config, options);
  const auto graph = build_graph(c.topology);
  const auto env = build_environment(c);
  const auto params = theory_params(graph, c.sim.omega);

  maybe_timestamp(out, options, "fixation");
  CsvWriter w(out, {"invader", "n_nodes", "k", "runs", "fixations", "non_absorbed", "estimate", "stderr", "theory",
                    "neutral"});
  for (auto invader : {Strategy::A, Strategy::B}) {
    const auto r = estimate_fixation(graph, env, c.sim, invader, c.runs, options.threads);
    std::optional<double> theory;
    if (params) theory = invader == Strategy::A ? rho_a(*params, env.pi, env.games) : rho_b(*params, env.pi, env.games);
    w.row({std::string(1, to_char(invader)), std::uint64_t{graph.n_nodes()}, std::uint64_t{graph.degree()}, r.runs,
           r.fixations, r.non_absorbed, r.estimate, r.stderr_, theory, 1.0 / static_cast<double>(graph.n_nodes())});
  }
}

void run_trajectory(const ExperimentConfig& config, const RunOptions& options, const TrajectoryOptions& traj,
                    std::ostream& out) {
  auto c = apply_overrides(config, options);
  const auto graph = build_graph(c.topology);
  auto env = build_environment(c);

  std::optional<PiecewisePolicy> policy;
  if (!traj.policy.empty()) {
    if (env.games.size() != 2) throw ConfigError("games", "a policy needs exactly two games");
    policy = optimal_policy_two_games(parse_objective(traj.policy), env.games, static_cast<int>(graph.degree()));
  }

  std::vector<Series> plot;
  maybe_timestamp(out, options, traj.ode ? "trajectory --ode" : "trajectory");
  if (traj.ode) {
    const auto params = theory_params(graph, c.sim.omega);
    if (!params) throw ConfigError("topology", "ODE trajectories need degree k >= 3");
    const auto rec = policy ? integrate_trajectory(c.initial_coop_fraction, *params,
                                                   [&](double p) { return policy->at(p); }, env.games, traj.t_end,
                                                   traj.step, traj.sample_interval)
                            : integrate_trajectory(c.initial_coop_fraction, *params, env.pi, env.games, traj.t_end,
                                                   traj.step, traj.sample_interval);
    CsvWriter w(out, {"t", "coop_fraction"});
    for (std::size_t i = 0; i < rec.times.size(); ++i) w.row({rec.times[i], rec.coop_fraction[i]});
    plot.push_back({"ode", rec.times, rec.coop_fraction});
  } else {
    if (policy) {
      env.policy = [p = *policy](double x) { return p.at(x); };
      c.sim.game_mode = GameMode::IidStationary;
    }
    std::vector<TrajectoryRecord> recs(c.runs);
    parallel_for(c.runs, options.threads, [&](std::size_t r) {
      RandomStream rng(derive_run_seed(c.sim.seed, r));
      recs[r] = simulate_trajectory(graph, env, c.sim, c.initial_coop_fraction, c.horizon_events,
                                    c.output.sample_every, rng);
    });
    CsvWriter w(out, {"run", "t", "coop_fraction"});
    for (std::size_t r = 0; r < recs.size(); ++r)
      for (std::size_t i = 0; i < recs[r].times.size(); ++i)
        w.row({std::uint64_t{r}, recs[r].times[i], recs[r].coop_fraction[i]});
    Series mean{"mean", recs.front().times, std::vector<double>(recs.front().times.size(), 0.0)};
    for (const auto& rec : recs)
      for (std::size_t i = 0; i < rec.coop_fraction.size(); ++i) mean.y[i] += rec.coop_fraction[i];
    for (auto& y : mean.y) y /= static_cast<double>(recs.size());
    for (std::size_t i = 0; i < mean.x.size(); ++i) w.row({std::string("mean"), mean.x[i], mean.y[i]});
    plot.push_back(std::move(mean));
  }
  if (!options.svg.empty())
    write_text_file(options.svg, line_plot_svg("Cooperator fraction", traj.ode ? "t" : "events", "p_A", plot));
}

void run_theory(const ExperimentConfig& config, const RunOptions& options, const TheoryOptions& theory,
                std::ostream& out) {
  const auto c = apply_overrides(config, options);
  const auto graph = build_graph(c.topology);
  const auto params = theory_params(graph, c.sim.omega);
  if (!params) throw ConfigError("topology", "closed forms need degree k >= 3");
  const int k = params->k;

  if (!theory.curve.empty()) {
    const auto env = build_environment(c);
    const bool gradient = theory.curve == "gradient";
    if (!gradient && theory.curve != "fitness_diff")
      throw std::invalid_argument("unknown curve '" + theory.curve + "' (gradient or fitness_diff)");
    if (theory.curve_points < 2) throw std::invalid_argument("curve needs at least two points");
    maybe_timestamp(out, options, "theory --curve " + theory.curve);
    CsvWriter w(out, {"p_a", theory.curve});
    Series s{theory.curve, {}, {}};
    for (int i = 0; i < theory.curve_points; ++i) {
      const double p = static_cast<double>(i) / (theory.curve_points - 1);
      const double v = gradient ? selection_gradient(p, *params, env.pi, env.games) : h2(env.pi, env.games, p);
      w.row({p, v});
      s.x.push_back(p);
      s.y.push_back(v);
    }
    if (!options.svg.empty()) write_text_file(options.svg, line_plot_svg(theory.curve, "p_A", theory.curve, {s}));
    return;
  }

  SweepAxis axis;
  if (!theory.sweep_parameter.empty()) {
    axis = {theory.sweep_parameter, theory.from, theory.to, theory.steps};
  } else if (!c.sweep.empty()) {
    axis = c.sweep.front();
  }
  const auto free = axis.parameter.empty() ? std::nullopt : free_parameter_of(axis.parameter);
  const std::vector<double> values = axis.parameter.empty() ? std::vector<double>{0.0} : axis.values();

  maybe_timestamp(out, options, "theory");
  CsvWriter w(out, {axis.parameter.empty() ? std::string("point") : axis.parameter, "rho_a", "rho_b", "rho_ratio",
                    "thm1_margin", "thm1_holds", "thm1_threshold", "thm2_margin", "thm2_holds", "thm2_threshold"});
  Series ra{"rho_a", {}, {}}, rb{"rho_b", {}, {}};
  for (double v : values) {
    const auto point = axis.parameter.empty() ? c : with_parameter(c, axis.parameter, v);
    const auto env = build_environment(point);
    const auto t1 = favors_cooperation(k, env.pi, env.games);
    const auto t2 = cooperation_over_defection(k, env.pi, env.games);
    const double a = rho_a(*params, env.pi, env.games);
    const double b = rho_b(*params, env.pi, env.games);
    w.row({v, a, b, rho_ratio(*params, env.pi, env.games), t1.margin, std::int64_t{t1.holds},
           threshold_or_empty(Condition::FavorsCooperation, free, k, env), t2.margin, std::int64_t{t2.holds},
           threshold_or_empty(Condition::CooperationOverDefection, free, k, env)});
    ra.x.push_back(v);
    ra.y.push_back(a);
    rb.x.push_back(v);
    rb.y.push_back(b);
  }
  if (!options.svg.empty())
    write_text_file(options.svg, line_plot_svg("Fixation probabilities", axis.parameter, "rho", {ra, rb}));
}

std::size_t run_optimize(const ExperimentConfig& config, const RunOptions& options, const OptimizeOptions& opt,
                         std::ostream& out, std::ostream& log) {
  const auto graph = build_graph(config.topology);
  if (config.games.size() != 2) throw ConfigError("games", "the two-game optimizer needs exactly two games");
  const int k = static_cast<int>(graph.degree());
  const auto objective = parse_objective(opt.objective);
  const auto policy = optimal_policy_two_games(objective, config.games, k);

  maybe_timestamp(out, options, "optimize");
  CsvWriter w(out, {"objective", "case", "segment", "lower", "upper", "lower_closed", "pi1", "pi2", "degenerate"});
  for (std::size_t i = 0; i < policy.segments.size(); ++i) {
    const auto& s = policy.segments[i];
    w.row({opt.objective, policy.case_label, std::uint64_t{i}, s.lower, s.upper, std::int64_t{s.lower_closed},
           s.dist[0], s.dist[1], std::int64_t{policy.degenerate}});
  }

  log << "objective " << opt.objective << ", k = " << k << ", case " << policy.case_label << '\n';
  if (policy.degenerate) log << "  switching function vanishes; every distribution is optimal\n";
  for (const auto& s : policy.segments)
    log << fmt::format("  p_A in {}{:.6g}, {:.6g}): pi = ({:.6g}, {:.6g})\n", s.lower_closed ? "[" : "(", s.lower,
                       s.upper, s.dist[0], s.dist[1]);
  for (double b : policy.breakpoints) log << fmt::format("  breakpoint p_A* = {:.17g}\n", b);

  if (!opt.verify) return 0;
  const auto report = grid_verify(objective, config.games, k, opt.resolution);
  log << fmt::format("grid check at resolution {}: {} points, {} violations, worst gap {:.3g}", opt.resolution,
                     report.points, report.violations, report.worst_gap);
  if (report.switch_point) log << fmt::format(", scanned switch at {:.6g}", *report.switch_point);
  if (report.degenerate) log << ", degenerate";
  log << '\n';
  return report.violations;
}

void run_oracle(const ExperimentConfig& config, const RunOptions& options, bool full, std::ostream& out) {
  const auto graph = build_graph(config.topology);
  const auto env = build_environment(config);
  const auto payoffs = expected_payoff_matrix(env.pi, env.games);
  const auto exact = exact_fixation(graph, payoffs, config.sim.omega, full);

  maybe_timestamp(out, options, "oracle");
  if (full) {
    CsvWriter w(out, {"configuration", "absorption_a"});
    for (std::size_t s = 0; s < exact.per_configuration.size(); ++s) {
      std::string label(graph.n_nodes(), 'B');
      for (std::size_t v = 0; v < graph.n_nodes(); ++v)
        if ((s >> v) & 1u) label[v] = 'A';
      w.row({label, exact.per_configuration[s]});
    }
    return;
  }
  const bool complete = config.topology.kind == "complete";
  CsvWriter w(out, {"n_nodes", "k", "omega", "rho_a_exact", "residual", "lumped"});
  w.row({std::uint64_t{graph.n_nodes()}, std::uint64_t{graph.degree()}, config.sim.omega, exact.fixation_prob,
         exact.solver_residual,
         opt(complete, complete ? lumped_fixation_complete(graph.n_nodes(), payoffs, config.sim.omega) : 0.0)});
}

void run_sweep(const ExperimentConfig& config, const RunOptions& options, std::ostream& out) {
  const auto c = apply_overrides(config, options);
  if (c.sweep.empty()) throw ConfigError("sweep", "no sweep axes given");

  std::vector<std::vector<double>> axes;
  std::vector<std::string> header;
  std::size_t cells = 1;
  for (const auto& a : c.sweep) {
    axes.push_back(a.values());
    header.push_back(a.parameter);
    cells *= axes.back().size();
  }
  for (const char* h : {"n_nodes", "k", "rho_a_est", "rho_a_stderr", "rho_b_est", "rho_b_stderr", "non_absorbed",
                        "rho_a_theory", "rho_b_theory", "thm1_margin", "thm2_margin"})
    header.emplace_back(h);

  maybe_timestamp(out, options, "sweep");
  CsvWriter w(out, header);
  const auto graph = build_graph(c.topology);
  const auto params = theory_params(graph, c.sim.omega);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    // Last axis varies fastest.
    std::vector<Cell> row;
    auto point = c;
    std::size_t rest = cell;
    std::vector<double> coords(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      coords[a] = axes[a][rest % axes[a].size()];
      rest /= axes[a].size();
    }
    for (std::size_t a = 0; a < axes.size(); ++a) {
      point = with_parameter(point, c.sweep[a].parameter, coords[a]);
      row.emplace_back(coords[a]);
    }
    point.runs = c.runs;
    point.sim.seed = c.sim.seed;
    const auto p_params = params ? std::optional<PairApproxParams>(
                                       PairApproxParams{params->k, params->n_pop, point.sim.omega})
                                 : std::nullopt;
    const auto env = build_environment(point);
    const auto ra = estimate_fixation(graph, env, point.sim, Strategy::A, point.runs, options.threads);
    const auto rb = estimate_fixation(graph, env, point.sim, Strategy::B, point.runs, options.threads);
    row.emplace_back(std::uint64_t{graph.n_nodes()});
    row.emplace_back(std::uint64_t{graph.degree()});
    row.emplace_back(ra.estimate);
    row.emplace_back(ra.stderr_);
    row.emplace_back(rb.estimate);
    row.emplace_back(rb.stderr_);
    row.emplace_back(ra.non_absorbed + rb.non_absorbed);
    row.emplace_back(opt(p_params.has_value(), p_params ? rho_a(*p_params, env.pi, env.games) : 0.0));
    row.emplace_back(opt(p_params.has_value(), p_params ? rho_b(*p_params, env.pi, env.games) : 0.0));
    row.emplace_back(opt(p_params.has_value(),
                         p_params ? favors_cooperation(p_params->k, env.pi, env.games).margin : 0.0));
    row.emplace_back(opt(graph.degree() >= 2,
                         graph.degree() >= 2
                             ? cooperation_over_defection(static_cast<int>(graph.degree()), env.pi, env.games).margin
                             : 0.0));
    w.row(row);
  }
}

} // namespace varigame::experiment
