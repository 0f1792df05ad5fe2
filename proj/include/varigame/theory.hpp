#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>

#include "varigame/engine.hpp"
#include "varigame/games.hpp"

namespace varigame {

/// Degree, population size and selection intensity shared by the closed forms.
struct PairApproxParams {
  int k = 4;
  std::size_t n_pop = 100;
  double omega = 0.01;

  /// Throws std::invalid_argument unless k >= 3, n_pop >= 2 and omega >= 0.
  void validate() const;
};

/// Pair-approximation state (p_A, q_{A|A}).
struct DynamicsState {
  double p_a = 0.5;
  double q_a_given_a = 0.5;
};

/// All four conditional pair probabilities of a feasible state.
struct Conditionals {
  double q_aa, q_ba, q_ab, q_bb; ///< q_{A|A}, q_{B|A}, q_{A|B}, q_{B|B}
};

/// Throws std::invalid_argument if a derived conditional leaves [0, 1].
/// At p_A in {0, 1} the undefined conditional q_{A|B} (or q_{A|A}) is taken
/// from the monomorphic limit.
Conditionals conditionals(const DynamicsState& state);

struct Coefficients {
  double i_a = 0.0;
  double i_b = 0.0;
  double i_c = 0.0;
};

struct DiffusionTerms {
  double drift = 0.0;
  double variance = 0.0;
};

/// Signed margin of a cooperation condition, positive when it holds.
struct ConditionResult {
  bool holds = false;
  double margin = 0.0;
};

enum class Condition { FavorsCooperation, CooperationOverDefection };

/// A single dilemma strength designated as the free parameter of a threshold
/// solve: games[game].dr() or games[game].dg().
struct FreeParameter {
  enum class Kind { Dr, Dg };
  Kind kind = Kind::Dg;
  std::size_t game = 0;
};

/// The on-manifold assortment q_{A|A} = p_A + (1 - p_A)/(k - 1).
double slow_manifold_q(double p_a, int k);

Coefficients coefficients_general(const DynamicsState& state, int k);
Coefficients coefficients_on_manifold(double p_a, int k);

/// Leading-order (dp_A/dt, dq_{A|A}/dt) of the pair approximation.
std::pair<double, double> pair_dynamics(const DynamicsState& state, const PairApproxParams& params,
                                        const GameDistribution& dist, std::span<const DilemmaGame> games);

/// Reduced one-dimensional dynamics of the cooperator fraction on the slow
/// manifold.
double selection_gradient(double p_a, const PairApproxParams& params, const GameDistribution& dist,
                          std::span<const DilemmaGame> games);

DiffusionTerms diffusion_terms(double p_a, const PairApproxParams& params, const GameDistribution& dist,
                               std::span<const DilemmaGame> games);

/// Weak-selection fixation probability of A from initial fraction x.
double phi_a(double x, const PairApproxParams& params, const GameDistribution& dist,
             std::span<const DilemmaGame> games);

/// phi_A(x) from the exact integral form of the diffusion approximation by
/// numerical quadrature. Reference for phi_a; not first-order in omega.
double phi_a_quadrature(double x, const PairApproxParams& params, const GameDistribution& dist,
                        std::span<const DilemmaGame> games, int intervals = 2000);

double rho_a(const PairApproxParams& params, const GameDistribution& dist, std::span<const DilemmaGame> games);
double rho_b(const PairApproxParams& params, const GameDistribution& dist, std::span<const DilemmaGame> games);
double rho_ratio(const PairApproxParams& params, const GameDistribution& dist, std::span<const DilemmaGame> games);

/// 3k > (2k^2 - 2k - 1) E[Dr] + (k^2 - k + 1) E[Dg]. Needs k >= 3.
ConditionResult favors_cooperation(int k, const GameDistribution& dist, std::span<const DilemmaGame> games);
/// E[Dr + Dg] < 2/(k - 1). Needs k >= 2.
ConditionResult cooperation_over_defection(int k, const GameDistribution& dist, std::span<const DilemmaGame> games);

/// Value of the free parameter at which the condition's margin is zero, all
/// other inputs held fixed. Throws std::invalid_argument when the parameter
/// has no effect on the margin (its game has probability zero).
double solve_threshold(Condition condition, FreeParameter free, int k, const GameDistribution& dist,
                       std::span<const DilemmaGame> games);

using DistributionPolicy = std::function<GameDistribution(double p_a)>;

inline constexpr double kAbsorbingSnap = 1e-12;

/// One classical Runge-Kutta step of size h (h may be negative) of the
/// selection gradient, without clamping.
double rk4_step(double p, double h, const PairApproxParams& params, const DistributionPolicy& policy,
                std::span<const DilemmaGame> games);

/// Fourth-order Runge-Kutta integration of the selection gradient from p0 to
/// t_end, with the game distribution chosen by `policy` at every stage
/// evaluation. Samples every `sample_interval` time units (rounded to whole
/// steps). The state is clamped to [0, 1] and snapped to a boundary once
/// within kAbsorbingSnap of it.
TrajectoryRecord integrate_trajectory(double p0, const PairApproxParams& params, const DistributionPolicy& policy,
                                      std::span<const DilemmaGame> games, double t_end, double step = 1.0,
                                      double sample_interval = 1.0);
TrajectoryRecord integrate_trajectory(double p0, const PairApproxParams& params, const GameDistribution& dist,
                                      std::span<const DilemmaGame> games, double t_end, double step = 1.0,
                                      double sample_interval = 1.0);

} // namespace varigame
