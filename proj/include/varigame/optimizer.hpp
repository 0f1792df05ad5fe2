#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "varigame/games.hpp"

namespace varigame {

enum class ObjectiveKind {
  MaxGradient,    ///< maximize the selection gradient
  MinFitnessDiff, ///< minimize the defector-minus-cooperator fitness gap
};

struct PolicySegment {
  double lower = 0.0;
  double upper = 1.0;
  bool lower_closed = false; ///< segments are open at 0 and right-open at upper
  GameDistribution dist;
};

/// Cooperator-fraction dependent game distribution over (0, 1).
struct PiecewisePolicy {
  ObjectiveKind objective = ObjectiveKind::MaxGradient;
  std::vector<PolicySegment> segments;
  std::vector<double> breakpoints;
  /// Case of the two-game analysis: "1(i)" .. "2(iii)", or "flat" when the
  /// switching function has zero slope.
  std::string case_label;
  /// The switching function vanishes identically; every distribution is
  /// optimal and the segments hold the canonical vertex (1, 0).
  bool degenerate = false;

  /// Distribution in force at p_a. Values at or below 0 map to the first
  /// segment, values at or above 1 to the last.
  const GameDistribution& at(double p_a) const;
  /// True at a breakpoint, where both vertices are optimal.
  bool tie_at(double p_a) const;
};

/// H_1 = -(k^2-k-1) E[Dr] - E[Dg] + (k^2-k-2) p_A E[Dr - Dg]; the selection
/// gradient is an increasing function of H_1.
double h1(const GameDistribution& dist, std::span<const DilemmaGame> games, double p_a, int k);

/// H_2 = sum_i pi_i (p_A (Dg_i - Dr_i) + Dr_i); the fitness gap between
/// defectors and cooperators is an increasing function of H_2.
double h2(const GameDistribution& dist, std::span<const DilemmaGame> games, double p_a);

/// Switching functions of the two-game problems: the optimal pi_1 is 0 where
/// G > 0 and 1 where G < 0.
double g1(double p_a, std::span<const DilemmaGame> games2, int k);
double g2(double p_a, std::span<const DilemmaGame> games2);

PiecewisePolicy optimal_policy_two_games(ObjectiveKind objective, std::span<const DilemmaGame> games2, int k);

struct VertexChoice {
  GameDistribution dist;
  std::size_t index = 0;
  bool tie = false; ///< another game attains the same objective value
};

/// Best simplex vertex for n games at a given p_a. Both objectives are linear
/// in the distribution, so a vertex is always optimal. Ties go to the lowest
/// index.
VertexChoice optimal_distribution_n_games(ObjectiveKind objective, std::span<const DilemmaGame> games, double p_a,
                                          int k);

struct GridReport {
  std::size_t points = 0;
  std::size_t violations = 0;
  double worst_gap = 0.0; ///< largest shortfall of the closed-form vertex against the scanned optimum
  std::optional<double> switch_point;
  bool degenerate = false;
};

/// Brute-force check of optimal_policy_two_games: at every interior grid
/// point p_A = i/resolution, scans pi_1 in {0, 1/resolution, ..., 1} and
/// compares the best scanned objective with the closed-form policy's vertex.
/// The switch point is the first grid p_A where the scanned optimal pi_1
/// differs from its value at the first grid point.
GridReport grid_verify(ObjectiveKind objective, std::span<const DilemmaGame> games2, int k, int resolution);

} // namespace varigame
