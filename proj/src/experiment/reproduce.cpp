#include <cmath>
#include <stdexcept>

#include "varigame/engine.hpp"
#include "varigame/experiment/commands.hpp"
#include "varigame/experiment/csv.hpp"
#include "varigame/experiment/parallel.hpp"
#include "varigame/theory.hpp"

namespace varigame::experiment {

const std::vector<OptimizationCase>& optimization_cases() {
  using O = ObjectiveKind;
  static const std::vector<OptimizationCase> cases = {
      {"fig4", O::MaxGradient, "1(i)", {0.0, 0.35}, {0.6, 0.3}},
      {"fig4", O::MaxGradient, "1(ii)", {0.3, 0.4}, {0.25, 0.0}},
      {"fig4", O::MaxGradient, "1(iii)", {0.0, 0.5}, {0.35, 0.0}},
      {"sm1", O::MaxGradient, "2(i)", {0.3, 0.3}, {0.0, 0.2}},
      {"sm1", O::MaxGradient, "2(ii)", {0.1, 0.0}, {0.2, 0.3}},
      {"sm1", O::MaxGradient, "2(iii)", {0.3, 0.0}, {0.0, 0.5}},
      {"fig5", O::MinFitnessDiff, "1(i)", {0.4, 0.2}, {0.1, 0.1}},
      {"fig5", O::MinFitnessDiff, "1(ii)", {0.1, 0.0}, {0.2, 0.3}},
      {"fig5", O::MinFitnessDiff, "1(iii)", {0.2, 0.0}, {0.0, 0.4}},
      {"sm2", O::MinFitnessDiff, "2(i)", {0.0, 0.1}, {0.4, 0.3}},
      {"sm2", O::MinFitnessDiff, "2(ii)", {0.2, 0.4}, {0.1, 0.1}},
      {"sm2", O::MinFitnessDiff, "2(iii)", {0.0, 0.4}, {0.2, 0.0}},
  };
  return cases;
}

namespace {

constexpr double kFixationOmega = 0.01;
constexpr double kOdeOmega = 0.01;
constexpr double kMcOmega = 0.1;
constexpr int kOptimizationDegree = 4;

std::vector<double> linspace(double from, double to, int points) {
  std::vector<double> v;
  for (int i = 0; i < points; ++i) v.push_back(points == 1 ? from : from + (to - from) * i / (points - 1));
  return v;
}

struct FixationPoint {
  std::string panel;
  std::string series;
  std::string parameter;
  double value;
  const RegularGraph* graph;
  GameEnvironment env;
  SimConfig sim;
  FreeParameter free;
};

void write_fixation_points(const std::vector<FixationPoint>& points, std::uint64_t runs, unsigned threads,
                           std::ostream& out) {
  CsvWriter w(out, {"panel", "series", "parameter", "value", "pi1", "rho_c_est", "rho_c_stderr", "rho_d_est",
                    "rho_d_stderr", "rho_c_theory", "rho_d_theory", "thm1_threshold", "thm2_threshold"});
  for (const auto& p : points) {
    const int k = static_cast<int>(p.graph->degree());
    const PairApproxParams params{k, p.graph->n_nodes(), p.sim.omega};
    const auto c = estimate_fixation(*p.graph, p.env, p.sim, Strategy::A, runs, threads);
    const auto d = estimate_fixation(*p.graph, p.env, p.sim, Strategy::B, runs, threads);
    auto threshold = [&](Condition cond) -> std::optional<double> {
      try {
        return solve_threshold(cond, p.free, k, p.env.pi, p.env.games);
      } catch (const std::invalid_argument&) {
        return std::nullopt;
      }
    };
    w.row({p.panel, p.series, p.parameter, p.value, p.env.pi[0], c.estimate, c.stderr_, d.estimate, d.stderr_,
           rho_a(params, p.env.pi, p.env.games), rho_b(params, p.env.pi, p.env.games),
           threshold(Condition::FavorsCooperation), threshold(Condition::CooperationOverDefection)});
  }
}

void reproduce_fig1(const RunOptions& options, const ReproduceOptions& repro, std::ostream& out) {
  const auto vn = lattice_von_neumann(10);
  const auto moore = lattice_moore(10);
  SimConfig sim;
  sim.omega = kFixationOmega;
  sim.game_mode = GameMode::IidStationary;
  sim.seed = repro.seed;

  CsvWriter w(out, {"k", "dg1", "pi1", "rho_c_est", "stderr", "rho_c_theory", "thm1_threshold", "rho_d_est",
                    "rho_d_stderr", "rho_d_theory", "thm2_threshold"});
  for (const RegularGraph* g : {&vn, &moore}) {
    const int k = static_cast<int>(g->degree());
    const PairApproxParams params{k, g->n_nodes(), sim.omega};
    for (double pi1 : {0.5, 1.0}) {
      for (double dg1 : linspace(0.0, 1.0, repro.points)) {
        auto env = GameEnvironment::from_distribution({DilemmaGame(dg1, 0.5), DilemmaGame(0.0, 0.3)},
                                                      GameDistribution({pi1, 1.0 - pi1}));
        const auto c = estimate_fixation(*g, env, sim, Strategy::A, repro.runs, options.threads);
        const auto d = estimate_fixation(*g, env, sim, Strategy::B, repro.runs, options.threads);
        const FreeParameter free{FreeParameter::Kind::Dg, 0};
        w.row({std::int64_t{k}, dg1, pi1, c.estimate, c.stderr_, rho_a(params, env.pi, env.games),
               solve_threshold(Condition::FavorsCooperation, free, k, env.pi, env.games), d.estimate, d.stderr_,
               rho_b(params, env.pi, env.games),
               solve_threshold(Condition::CooperationOverDefection, free, k, env.pi, env.games)});
      }
    }
  }
}

SimConfig renewal_sim(std::uint64_t seed) {
  SimConfig sim;
  sim.omega = kFixationOmega;
  sim.game_mode = GameMode::Renewal;
  sim.dt_per_event = 1.0;
  sim.seed = seed;
  return sim;
}

void reproduce_fig2(const RunOptions& options, const ReproduceOptions& repro, std::ostream& out) {
  const auto moore = lattice_moore(10);
  const auto vn = lattice_von_neumann(10);
  const auto sim = renewal_sim(repro.seed);
  std::vector<FixationPoint> points;
  for (double b2 : {100.0, 200.0}) {
    for (double dr1 : linspace(-0.5, 0.5, repro.points)) {
      GameProcess process({DilemmaGame(-0.2, dr1), DilemmaGame(0.3, 0.5)}, {Uniform{50.0, 150.0}, Uniform{50.0, b2}});
      points.push_back({"uniform", "b2=" + format_double(b2), "dr1", dr1, &moore,
                        GameEnvironment::from_process(std::move(process)), sim, {FreeParameter::Kind::Dr, 0}});
    }
  }
  for (double lambda : {0.02, 0.05}) {
    for (double dg1 : linspace(0.0, 1.0, repro.points)) {
      GameProcess process({DilemmaGame(dg1, 0.5), DilemmaGame(0.2, 0.3)}, {Exponential{lambda}, Exponential{0.02}});
      points.push_back({"exponential", "lambda=" + format_double(lambda), "dg1", dg1, &vn,
                        GameEnvironment::from_process(std::move(process)), sim, {FreeParameter::Kind::Dg, 0}});
    }
  }
  write_fixation_points(points, repro.runs, options.threads, out);
}

void reproduce_fig3(const RunOptions& options, const ReproduceOptions& repro, std::ostream& out) {
  const auto small = lattice_von_neumann(10);
  const auto large = lattice_von_neumann(20, 25);
  const auto sim = renewal_sim(repro.seed);
  std::vector<FixationPoint> points;
  for (const RegularGraph* g : {&small, &large}) {
    for (double lambda : {0.02, 0.05}) {
      for (double dr2 : linspace(0.0, 1.0, repro.points)) {
        GameProcess process({DilemmaGame(0.5, 0.3), DilemmaGame(0.1, dr2)}, {Exponential{lambda}, Uniform{50.0, 150.0}});
        points.push_back({"N=" + std::to_string(g->n_nodes()), "lambda=" + format_double(lambda), "dr2", dr2, g,
                          GameEnvironment::from_process(std::move(process)), sim, {FreeParameter::Kind::Dr, 1}});
      }
    }
  }
  write_fixation_points(points, repro.runs, options.threads, out);
}

void reproduce_optimization(const std::string& figure, const RunOptions& options, const ReproduceOptions& repro,
                            std::ostream& out) {
  const auto graph = lattice_von_neumann(10);
  CsvWriter w(out, {"case", "panel", "series", "x", "y"});
  for (const auto& cs : optimization_cases()) {
    if (cs.figure != figure) continue;
    const std::vector<DilemmaGame> games{cs.g1, cs.g2};
    const auto policy = optimal_policy_two_games(cs.objective, games, kOptimizationDegree);
    const bool gradient = cs.objective == ObjectiveKind::MaxGradient;

    struct Candidate {
      std::string name;
      DistributionPolicy pick;
    };
    std::vector<Candidate> candidates;
    for (double pi1 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const GameDistribution d({pi1, 1.0 - pi1});
      candidates.push_back({"pi1=" + format_double(pi1), [d](double) { return d; }});
    }
    candidates.push_back({"optimal", [policy](double p) { return policy.at(p); }});

    const PairApproxParams ode{kOptimizationDegree, graph.n_nodes(), kOdeOmega};
    for (const auto& cand : candidates) {
      for (double p : linspace(0.0, 1.0, 101)) {
        const auto d = cand.pick(p);
        const double y = gradient ? selection_gradient(p, ode, d, games) : h2(d, games, p);
        w.row({cs.label, std::string(gradient ? "gradient" : "fitness_diff"), cand.name, p, y});
      }
    }
    for (const auto& cand : candidates) {
      const auto rec = integrate_trajectory(0.5, ode, cand.pick, games, 10000.0, 1.0, 100.0);
      for (std::size_t i = 0; i < rec.times.size(); ++i)
        w.row({cs.label, std::string("ode"), cand.name, rec.times[i], rec.coop_fraction[i]});
    }

    SimConfig sim;
    sim.omega = kMcOmega;
    sim.game_mode = GameMode::IidStationary;
    const std::uint64_t every = std::max<std::uint64_t>(1, repro.mc_events / 100);
    for (const auto& cand : candidates) {
      auto env = GameEnvironment::from_distribution(games, cand.pick(0.5));
      if (cand.name == "optimal") env.policy = cand.pick;
      std::vector<TrajectoryRecord> recs(repro.mc_seeds);
      parallel_for(repro.mc_seeds, options.threads, [&](std::size_t s) {
        RandomStream rng(derive_run_seed(repro.seed, s));
        recs[s] = simulate_trajectory(graph, env, sim, 0.5, repro.mc_events, every, rng);
      });
      for (std::size_t i = 0; i < recs.front().times.size(); ++i) {
        double mean = 0.0;
        for (const auto& r : recs) mean += r.coop_fraction[i];
        w.row({cs.label, std::string("mc"), cand.name, recs.front().times[i],
               mean / static_cast<double>(recs.size())});
      }
    }
  }
}

} // namespace

void run_reproduce(const std::string& figure, const RunOptions& options, const ReproduceOptions& repro,
                   std::ostream& out) {
  if (repro.points < 2) throw std::invalid_argument("need at least two sweep points");
  if (repro.runs == 0 || repro.mc_seeds == 0) throw std::invalid_argument("runs and seeds must be positive");
  if (!options.deterministic) CsvWriter::comment(out, timestamp_comment("reproduce " + figure));
  if (figure == "fig1")
    reproduce_fig1(options, repro, out);
  else if (figure == "fig2")
    reproduce_fig2(options, repro, out);
  else if (figure == "fig3")
    reproduce_fig3(options, repro, out);
  else if (figure == "fig4" || figure == "fig5" || figure == "sm1" || figure == "sm2")
    reproduce_optimization(figure, options, repro, out);
  else
    throw std::invalid_argument("unknown figure '" + figure + "' (fig1 fig2 fig3 fig4 fig5 sm1 sm2)");
}

} // namespace varigame::experiment
