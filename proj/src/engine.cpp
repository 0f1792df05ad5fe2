#include "varigame/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace varigame {

void SimConfig::validate() const {
  if (!(omega >= 0.0 && omega <= 1.0)) throw std::invalid_argument("omega must lie in [0, 1]");
  if (!(dt_per_event > 0.0) || !std::isfinite(dt_per_event))
    throw std::invalid_argument("dt_per_event must be positive");
  if (max_events == 0) throw std::invalid_argument("max_events must be positive");
}

std::size_t PopulationState::count(Strategy s) const {
  return static_cast<std::size_t>(std::count(strategies.begin(), strategies.end(), s));
}

namespace {

class PayoffTable {
public:
  explicit PayoffTable(std::span<const DilemmaGame> games) {
    table_.reserve(games.size());
    for (const auto& g : games) {
      table_.push_back({payoff(g, Strategy::A, Strategy::A), payoff(g, Strategy::A, Strategy::B),
                        payoff(g, Strategy::B, Strategy::A), payoff(g, Strategy::B, Strategy::B)});
    }
  }
  double operator()(std::uint32_t game, Strategy own, Strategy opp) const {
    return table_[game][2 * static_cast<unsigned>(own) + static_cast<unsigned>(opp)];
  }

private:
  std::vector<std::array<double, 4>> table_;
};

// Shared death-birth kernel. `game_of(edge)` yields the game index currently
// played across an edge; it must return the same value for repeated queries
// within one event.
template <class GameOf>
StepOutcome death_birth_event(const RegularGraph& graph, std::vector<Strategy>& s, const PayoffTable& table,
                              double omega, GameOf&& game_of, std::vector<double>& weights, RandomStream& rng) {
  const auto dead = static_cast<NodeId>(rng.below(graph.n_nodes()));
  const auto nb = graph.neighbors(dead);
  const Strategy before = s[dead];

  const Strategy first = s[nb[0]];
  const bool unanimous = std::all_of(nb.begin() + 1, nb.end(), [&](NodeId y) { return s[y] == first; });
  if (unanimous) {
    s[dead] = first;
    return {dead, before, first};
  }

  weights.resize(nb.size());
  double total = 0.0;
  for (std::size_t j = 0; j < nb.size(); ++j) {
    const NodeId y = nb[j];
    const auto ynb = graph.neighbors(y);
    const auto yedges = graph.edge_ids(y);
    double f_total = 0.0;
    for (std::size_t m = 0; m < ynb.size(); ++m) f_total += table(game_of(yedges[m]), s[y], s[ynb[m]]);
    const double f = fitness(omega, f_total);
    if (f < 0.0)
      throw std::domain_error("negative fitness " + std::to_string(f) + " at node " + std::to_string(y) +
                              "; selection intensity too large for these payoffs");
    weights[j] = f;
    total += f;
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::domain_error("non-positive neighborhood fitness; selection intensity too large for these payoffs");

  const double r = rng.uniform() * total;
  double cumulative = 0.0;
  std::size_t chosen = nb.size();
  for (std::size_t j = 0; j < nb.size(); ++j) {
    cumulative += weights[j];
    if (r < cumulative) {
      chosen = j;
      break;
    }
  }
  if (chosen == nb.size()) {
    // Rounding left r at the very top; take the last neighbor with positive weight.
    for (std::size_t j = nb.size(); j-- > 0;)
      if (weights[j] > 0.0) {
        chosen = j;
        break;
      }
  }
  const Strategy after = s[nb[chosen]];
  s[dead] = after;
  return {dead, before, after};
}

std::size_t draw_index(std::span<const double> cumulative, RandomStream& rng) {
  const double r = rng.uniform();
  for (std::size_t i = 0; i < cumulative.size(); ++i)
    if (r < cumulative[i]) return i;
  // r above the rounded total: last index carrying mass.
  for (std::size_t i = cumulative.size(); i-- > 0;)
    if (i == 0 || cumulative[i] > cumulative[i - 1]) return i;
  return 0;
}

std::vector<double> cumulative_of(const GameDistribution& pi) {
  std::vector<double> c(pi.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) c[i] = (acc += pi[i]);
  return c;
}

// Full simulation state for one run. Edge games are resolved lazily: only the
// edges around the dying node's neighborhood are ever looked at, so renewal
// clocks are brought up to the current time on access and i.i.d. draws are made
// once per edge per event.
class Simulation {
public:
  Simulation(const RegularGraph& graph, const GameEnvironment& env, const SimConfig& config)
      : graph_(graph), env_(env), config_(config), table_(env.games) {
    config_.validate();
    if (config_.game_mode == GameMode::Renewal && !env_.process)
      throw std::invalid_argument("renewal game mode needs game duration distributions");
    if (config_.game_mode == GameMode::Fixed && config_.fixed_game >= env_.games.size())
      throw std::invalid_argument("fixed game index out of range");
    if (env_.policy && config_.game_mode != GameMode::IidStationary)
      throw std::invalid_argument("a cooperator-dependent game policy needs the iid_stationary game mode");

    const std::size_t n = graph_.n_nodes();
    if (env_.policy) {
      for (std::size_t c = 0; c <= n; ++c) {
        const auto pi = env_.policy(static_cast<double>(c) / static_cast<double>(n));
        if (pi.size() != env_.games.size()) throw std::invalid_argument("policy distribution length mismatch");
        cumulative_by_count_.push_back(cumulative_of(pi));
      }
    }
    stationary_cumulative_ = cumulative_of(env_.pi);
    const std::size_t m = graph_.n_edges();
    game_.assign(m, 0);
    next_switch_.assign(m, std::numeric_limits<double>::infinity());
    stamp_.assign(m, std::numeric_limits<std::uint64_t>::max());
  }

  void reset(std::vector<Strategy> initial, RandomStream& rng) {
    if (initial.size() != graph_.n_nodes()) throw std::invalid_argument("population size does not match graph");
    strategies_ = std::move(initial);
    count_a_ = static_cast<std::size_t>(std::count(strategies_.begin(), strategies_.end(), Strategy::A));
    events_ = 0;
    std::fill(stamp_.begin(), stamp_.end(), std::numeric_limits<std::uint64_t>::max());
    switch (config_.game_mode) {
    case GameMode::Fixed:
      std::fill(game_.begin(), game_.end(), static_cast<std::uint32_t>(config_.fixed_game));
      break;
    case GameMode::Renewal:
      for (std::size_t e = 0; e < game_.size(); ++e) {
        const auto g = draw_index(stationary_cumulative_, rng);
        game_[e] = static_cast<std::uint32_t>(g);
        next_switch_[e] = sample_duration(env_.process->durations()[g], rng);
      }
      break;
    case GameMode::IidStationary:
      break;
    }
  }

  StepOutcome step(RandomStream& rng) {
    const auto out = [&] {
      switch (config_.game_mode) {
      case GameMode::Fixed: {
        const auto g = game_.empty() ? 0u : game_[0];
        return death_birth_event(graph_, strategies_, table_, config_.omega, [g](EdgeId) { return g; }, weights_,
                                 rng);
      }
      case GameMode::Renewal: {
        const double now = static_cast<double>(events_) * config_.dt_per_event;
        return death_birth_event(
            graph_, strategies_, table_, config_.omega, [&](EdgeId e) { return renewal_game(e, now, rng); },
            weights_, rng);
      }
      case GameMode::IidStationary:
      default: {
        const std::span<const double> cumulative =
            env_.policy ? std::span<const double>(cumulative_by_count_[count_a_]) : stationary_cumulative_;
        return death_birth_event(
            graph_, strategies_, table_, config_.omega,
            [&](EdgeId e) {
              if (stamp_[e] != events_) {
                stamp_[e] = events_;
                game_[e] = static_cast<std::uint32_t>(draw_index(cumulative, rng));
              }
              return game_[e];
            },
            weights_, rng);
      }
      }
    }();
    ++events_;
    if (out.changed()) {
      if (out.after == Strategy::A)
        ++count_a_;
      else
        --count_a_;
    }
    return out;
  }

  bool absorbed() const { return count_a_ == 0 || count_a_ == strategies_.size(); }
  std::size_t count_a() const { return count_a_; }
  std::uint64_t events() const { return events_; }
  const std::vector<Strategy>& strategies() const { return strategies_; }

private:
  std::uint32_t renewal_game(EdgeId e, double now, RandomStream& rng) {
    const auto& process = *env_.process;
    while (next_switch_[e] <= now) {
      const auto g = process.successor(game_[e]);
      game_[e] = static_cast<std::uint32_t>(g);
      next_switch_[e] += sample_duration(process.durations()[g], rng);
    }
    return game_[e];
  }

  const RegularGraph& graph_;
  const GameEnvironment& env_;
  SimConfig config_;
  PayoffTable table_;
  std::vector<std::vector<double>> cumulative_by_count_;
  std::vector<double> stationary_cumulative_;

  std::vector<Strategy> strategies_;
  std::size_t count_a_ = 0;
  std::uint64_t events_ = 0;
  std::vector<std::uint32_t> game_;
  std::vector<double> next_switch_;
  std::vector<std::uint64_t> stamp_;
  std::vector<double> weights_;
};

} // namespace

EdgeGameState init_edge_games(const RegularGraph& graph, const GameEnvironment& env, RandomStream& rng) {
  const auto cumulative = cumulative_of(env.pi);
  EdgeGameState state;
  state.game.resize(graph.n_edges());
  state.remaining.resize(graph.n_edges());
  for (std::size_t e = 0; e < graph.n_edges(); ++e) {
    const auto g = draw_index(cumulative, rng);
    state.game[e] = static_cast<std::uint32_t>(g);
    state.remaining[e] = env.process ? sample_duration(env.process->durations()[g], rng)
                                     : std::numeric_limits<double>::infinity();
  }
  return state;
}

double total_payoff(const RegularGraph& graph, std::span<const Strategy> strategies,
                    const EdgeGameState& edge_games, std::span<const DilemmaGame> games, NodeId node) {
  const auto nb = graph.neighbors(node);
  const auto ids = graph.edge_ids(node);
  double total = 0.0;
  for (std::size_t j = 0; j < nb.size(); ++j)
    total += payoff(games[edge_games.game.at(ids[j])], strategies[node], strategies[nb[j]]);
  return total;
}

StepOutcome death_birth_step(const RegularGraph& graph, PopulationState& state, const EdgeGameState& edge_games,
                             std::span<const DilemmaGame> games, const SimConfig& config, RandomStream& rng) {
  config.validate();
  if (state.strategies.size() != graph.n_nodes()) throw std::invalid_argument("population size does not match graph");
  if (edge_games.game.size() != graph.n_edges()) throw std::invalid_argument("edge game state does not match graph");
  const PayoffTable table(games);
  std::vector<double> weights;
  return death_birth_event(graph, state.strategies, table, config.omega,
                           [&](EdgeId e) { return edge_games.game[e]; }, weights, rng);
}

void advance_game_clocks(EdgeGameState& edge_games, const GameProcess& process, double dt, RandomStream& rng) {
  if (dt <= 0.0) return;
  for (std::size_t e = 0; e < edge_games.game.size(); ++e) {
    double& remaining = edge_games.remaining[e];
    remaining -= dt;
    while (remaining <= 0.0) {
      const auto g = process.successor(edge_games.game[e]);
      edge_games.game[e] = static_cast<std::uint32_t>(g);
      remaining += sample_duration(process.durations()[g], rng);
    }
  }
}

AbsorptionOutcome run_to_absorption(const RegularGraph& graph, const GameEnvironment& env, const SimConfig& config,
                                    PopulationState initial, RandomStream& rng) {
  Simulation sim(graph, env, config);
  sim.reset(std::move(initial.strategies), rng);
  while (!sim.absorbed() && sim.events() < config.max_events) sim.step(rng);
  AbsorptionOutcome out;
  out.events = sim.events();
  if (sim.absorbed()) out.absorbed_as = sim.count_a() == 0 ? Strategy::B : Strategy::A;
  return out;
}

FixationResult estimate_fixation(const RegularGraph& graph, const GameEnvironment& env, const SimConfig& config,
                                 Strategy invader, std::uint64_t runs, unsigned threads) {
  if (runs == 0) throw std::invalid_argument("runs must be >= 1");
  config.validate();
  threads = std::max(1u, threads);
  constexpr std::uint64_t kBlock = 64;
  std::atomic<std::uint64_t> next_block{0};
  std::vector<std::uint64_t> fixed(threads, 0), unabsorbed(threads, 0);

  auto worker = [&](unsigned t) {
    Simulation sim(graph, env, config);
    const auto resident = opposite(invader);
    for (;;) {
      const std::uint64_t start = next_block.fetch_add(kBlock);
      if (start >= runs) break;
      const std::uint64_t stop = std::min(runs, start + kBlock);
      for (std::uint64_t r = start; r < stop; ++r) {
        RandomStream rng(derive_run_seed(config.seed, r));
        std::vector<Strategy> init(graph.n_nodes(), resident);
        init[rng.below(graph.n_nodes())] = invader;
        sim.reset(std::move(init), rng);
        while (!sim.absorbed() && sim.events() < config.max_events) sim.step(rng);
        if (!sim.absorbed())
          ++unabsorbed[t];
        else if ((sim.count_a() > 0) == (invader == Strategy::A))
          ++fixed[t];
      }
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }

  FixationResult res;
  res.runs = runs;
  for (unsigned t = 0; t < threads; ++t) {
    res.fixations += fixed[t];
    res.non_absorbed += unabsorbed[t];
  }
  const std::uint64_t absorbed = runs - res.non_absorbed;
  if (absorbed > 0) {
    res.estimate = static_cast<double>(res.fixations) / static_cast<double>(absorbed);
    res.stderr_ = std::sqrt(res.estimate * (1.0 - res.estimate) / static_cast<double>(absorbed));
  }
  return res;
}

PairStats measure_pair_stats(const RegularGraph& graph, std::span<const Strategy> strategies) {
  if (strategies.size() != graph.n_nodes()) throw std::invalid_argument("population size does not match graph");
  const double n = static_cast<double>(graph.n_nodes());
  const double kn = static_cast<double>(graph.degree()) * n;
  std::size_t count_a = 0, aa = 0, ab = 0;
  for (auto s : strategies) count_a += (s == Strategy::A);
  for (const auto& [u, v] : graph.edges()) {
    const bool ua = strategies[u] == Strategy::A, va = strategies[v] == Strategy::A;
    if (ua && va)
      ++aa;
    else if (ua != va)
      ++ab;
  }
  PairStats ps;
  ps.p_a = static_cast<double>(count_a) / n;
  ps.p_aa = 2.0 * static_cast<double>(aa) / kn;
  ps.p_ab = static_cast<double>(ab) / kn;
  // A conditional is absent only when its conditioning strategy is extinct.
  if (count_a > 0) ps.q_a_given_a = ps.p_aa / ps.p_a;
  if (count_a < graph.n_nodes()) ps.q_a_given_b = ps.p_ab / (1.0 - ps.p_a);
  return ps;
}

TrajectoryRecord simulate_trajectory(const RegularGraph& graph, const GameEnvironment& env, const SimConfig& config,
                                     double initial_coop_fraction, std::uint64_t horizon_events,
                                     std::uint64_t sample_every, RandomStream& rng, bool with_pair_stats) {
  if (!(initial_coop_fraction >= 0.0 && initial_coop_fraction <= 1.0))
    throw std::invalid_argument("initial cooperator fraction must lie in [0, 1]");
  if (sample_every == 0) throw std::invalid_argument("sample_every must be positive");

  const std::size_t n = graph.n_nodes();
  const auto n_coop = static_cast<std::size_t>(std::llround(initial_coop_fraction * static_cast<double>(n)));
  std::vector<NodeId> order(n);
  for (NodeId v = 0; v < n; ++v) order[v] = v;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<Strategy> init(n, Strategy::B);
  for (std::size_t i = 0; i < n_coop; ++i) init[order[i]] = Strategy::A;

  Simulation sim(graph, env, config);
  sim.reset(std::move(init), rng);

  TrajectoryRecord rec;
  auto record = [&](std::uint64_t t) {
    rec.times.push_back(static_cast<double>(t));
    rec.coop_fraction.push_back(static_cast<double>(sim.count_a()) / static_cast<double>(n));
    if (with_pair_stats) rec.pair_stats.push_back(measure_pair_stats(graph, sim.strategies()));
  };
  for (std::uint64_t t = 0; t <= horizon_events; t += sample_every) {
    while (sim.events() < t && !sim.absorbed()) sim.step(rng);
    record(t);
  }
  return rec;
}

} // namespace varigame
