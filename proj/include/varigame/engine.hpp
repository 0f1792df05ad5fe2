#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "varigame/games.hpp"
#include "varigame/network.hpp"
#include "varigame/random.hpp"

namespace varigame {

/// How the game on each edge is chosen at each death-birth event.
enum class GameMode {
  Renewal,       ///< per-edge renewal clocks, game i hands over to i+1 on expiry
  IidStationary, ///< every edge redraws its game from pi at every event
  Fixed,         ///< every edge plays SimConfig::fixed_game
};

struct SimConfig {
  double omega = 0.01;
  GameMode game_mode = GameMode::Renewal;
  std::size_t fixed_game = 0;
  /// Renewal time elapsed per death-birth event.
  double dt_per_event = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t max_events = 100'000'000;

  /// Throws std::invalid_argument on omega outside [0, 1] or dt <= 0.
  void validate() const;
};

struct PopulationState {
  std::vector<Strategy> strategies;

  static PopulationState uniform(std::size_t n, Strategy s) { return {std::vector<Strategy>(n, s)}; }
  std::size_t count(Strategy s) const;
};

/// Current game and remaining spell length for every edge, indexed by EdgeId.
struct EdgeGameState {
  std::vector<std::uint32_t> game;
  std::vector<double> remaining;
};

/// Fresh per-edge clocks: each edge starts on a game drawn from env.pi with a
/// full spell drawn from that game's duration distribution (or +inf when the
/// environment has no renewal process).
EdgeGameState init_edge_games(const RegularGraph& graph, const GameEnvironment& env, RandomStream& rng);

/// Sum of the payoffs `node` collects from all its neighbors under the current
/// edge games.
double total_payoff(const RegularGraph& graph, std::span<const Strategy> strategies,
                    const EdgeGameState& edge_games, std::span<const DilemmaGame> games, NodeId node);

inline double fitness(double omega, double total_payoff) { return 1.0 - omega + omega * total_payoff; }

struct StepOutcome {
  NodeId node;
  Strategy before;
  Strategy after;
  bool changed() const { return before != after; }
};

/// One death-birth event: a uniformly random node dies and a neighbor, chosen
/// with probability proportional to fitness, places its strategy there.
/// Fitnesses come from the supplied edge games and the pre-death configuration.
/// Throws std::domain_error if a fitness is negative or the neighborhood total
/// is not positive.
StepOutcome death_birth_step(const RegularGraph& graph, PopulationState& state, const EdgeGameState& edge_games,
                             std::span<const DilemmaGame> games, const SimConfig& config, RandomStream& rng);

/// Runs every edge's renewal clock forward by dt, processing any number of
/// expiries in order.
void advance_game_clocks(EdgeGameState& edge_games, const GameProcess& process, double dt, RandomStream& rng);

struct AbsorptionOutcome {
  std::optional<Strategy> absorbed_as; ///< empty when max_events was hit first
  std::uint64_t events = 0;
};

/// Death-birth events until the population is monomorphic or config.max_events
/// events have run.
AbsorptionOutcome run_to_absorption(const RegularGraph& graph, const GameEnvironment& env, const SimConfig& config,
                                    PopulationState initial, RandomStream& rng);

struct FixationResult {
  std::uint64_t runs = 0;
  std::uint64_t fixations = 0;
  std::uint64_t non_absorbed = 0;
  double estimate = 0.0; ///< fixations / absorbed runs
  double stderr_ = 0.0;  ///< binomial standard error of estimate
  bool incomplete() const { return non_absorbed > 0; }
};

/// Fixation probability of a single `invader` in an otherwise monomorphic
/// population, over `runs` independent runs. Run r is driven by
/// RandomStream(derive_run_seed(config.seed, r)), so the result does not depend
/// on `threads`.
FixationResult estimate_fixation(const RegularGraph& graph, const GameEnvironment& env, const SimConfig& config,
                                 Strategy invader, std::uint64_t runs, unsigned threads = 1);

struct PairStats {
  double p_a = 0.0;
  double p_aa = 0.0; ///< ordered-pair frequency, 2 * #AA edges / (k N)
  double p_ab = 0.0; ///< #AB edges / (k N); equals p_ba
  std::optional<double> q_a_given_a;
  std::optional<double> q_a_given_b;
};

PairStats measure_pair_stats(const RegularGraph& graph, std::span<const Strategy> strategies);

struct TrajectoryRecord {
  std::vector<double> times; ///< event counts for simulations, time units for ODE integration
  std::vector<double> coop_fraction;
  std::vector<PairStats> pair_stats; ///< empty unless requested
};

/// Seeds round(initial_coop_fraction * N) cooperators at uniformly random
/// nodes and samples every `sample_every` events up to `horizon_events`. After
/// absorption the final value is carried forward to the horizon.
TrajectoryRecord simulate_trajectory(const RegularGraph& graph, const GameEnvironment& env, const SimConfig& config,
                                     double initial_coop_fraction, std::uint64_t horizon_events,
                                     std::uint64_t sample_every, RandomStream& rng, bool with_pair_stats = false);

} // namespace varigame
