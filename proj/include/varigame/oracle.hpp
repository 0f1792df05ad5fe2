#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "varigame/games.hpp"
#include "varigame/network.hpp"

namespace varigame {

/// Row player's payoffs; aa is A against A and so on.
struct PayoffMatrix {
  double aa = 1.0, ab = 0.0, ba = 0.0, bb = 0.0;

  static PayoffMatrix of(const DilemmaGame& game);
  double operator()(Strategy own, Strategy opp) const;
};

/// sum_i pi_i M_i.
PayoffMatrix expected_payoff_matrix(const GameDistribution& dist, std::span<const DilemmaGame> games);

inline constexpr std::size_t kOracleMaxNodes = 20;
/// Above this size the absorption system is solved iteratively.
inline constexpr std::size_t kOracleDenseMaxNodes = 10;
inline constexpr double kOracleResidualTolerance = 1e-10;

/// Configurations are bitmasks: bit v set means node v plays A.
using Configuration = std::uint32_t;

/// Sparse row of the one-event transition matrix: (target configuration,
/// probability), diagonal included.
using TransitionRow = std::vector<std::pair<Configuration, double>>;

/// Transition matrix of one death-birth event over all 2^N configurations.
/// Throws std::invalid_argument above kOracleMaxNodes nodes and
/// std::domain_error if some fitness is negative or a neighborhood total is
/// not positive.
std::vector<TransitionRow> transition_matrix(const RegularGraph& graph, const PayoffMatrix& payoffs, double omega);

struct AbsorptionResult {
  std::vector<double> probability; ///< indexed by configuration
  double residual = 0.0;           ///< max-norm residual of the linear system
};

/// Probability of absorbing in the monomorphic `target` state from every
/// configuration.
AbsorptionResult absorption_probabilities(const RegularGraph& graph, const PayoffMatrix& payoffs, double omega,
                                          Strategy target = Strategy::A);

struct ExactResult {
  double fixation_prob = 0.0; ///< mean over the N single-A configurations
  double solver_residual = 0.0;
  std::vector<double> per_configuration; ///< filled only on request
};

/// Exact fixation probability of a single A placed uniformly at random.
ExactResult exact_fixation(const RegularGraph& graph, const PayoffMatrix& payoffs, double omega,
                           bool keep_per_configuration = false);

/// Fixation probability of one A on the complete graph K_n from the
/// birth-death chain on the cooperator count.
double lumped_fixation_complete(std::size_t n, const PayoffMatrix& payoffs, double omega);

} // namespace varigame
