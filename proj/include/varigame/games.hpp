#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "varigame/random.hpp"

namespace varigame {

/// A cooperates, B defects.
enum class Strategy : std::uint8_t { A = 0, B = 1 };

constexpr Strategy opposite(Strategy s) { return s == Strategy::A ? Strategy::B : Strategy::A; }
constexpr char to_char(Strategy s) { return s == Strategy::A ? 'A' : 'B'; }

/// Normalized 2x2 game with R = 1 and P = 0:
///
///          A        B
///   A  (   1      -dr  )
///   B  ( 1 + dg     0  )
///
/// dg = T - R is the gamble-intending dilemma, dr = P - S the risk-averting one.
class DilemmaGame {
public:
  /// Throws std::invalid_argument unless both strengths are finite and within
  /// [-1, 1] (with 1e-12 slack).
  DilemmaGame(double dg, double dr);

  double dg() const { return dg_; }
  double dr() const { return dr_; }

  bool operator==(const DilemmaGame&) const = default;

private:
  double dg_;
  double dr_;
};

/// Payoff to a player using `own` against `opponent`.
double payoff(const DilemmaGame& game, Strategy own, Strategy opponent);

struct Exponential {
  double rate;
};
struct Uniform {
  double lower;
  double upper;
};
struct Deterministic {
  double duration;
};
struct EmpiricalTable {
  /// (duration, probability) pairs.
  std::vector<std::pair<double, double>> values;
};

/// Distribution of the length of one spell of a game on an edge.
class DurationDistribution {
public:
  using Variant = std::variant<Exponential, Uniform, Deterministic, EmpiricalTable>;

  /// Validates the parameters; throws std::invalid_argument.
  DurationDistribution(Variant v);
  DurationDistribution(Exponential e) : DurationDistribution(Variant{e}) {}
  DurationDistribution(Uniform u) : DurationDistribution(Variant{u}) {}
  DurationDistribution(Deterministic d) : DurationDistribution(Variant{d}) {}
  DurationDistribution(EmpiricalTable t) : DurationDistribution(Variant{std::move(t)}) {}

  const Variant& variant() const { return v_; }

private:
  Variant v_;
};

double mean_duration(const DurationDistribution& dist);

/// One positive draw; consumes the stream deterministically.
double sample_duration(const DurationDistribution& dist, RandomStream& rng);

/// Games with their spell-length distributions. On expiry game i hands over to
/// game (i + 1) mod n.
class GameProcess {
public:
  /// Throws std::invalid_argument on empty input or length mismatch.
  GameProcess(std::vector<DilemmaGame> games, std::vector<DurationDistribution> durations);

  /// A process that always plays `game`.
  static GameProcess single(DilemmaGame game);

  std::size_t size() const { return games_.size(); }
  const std::vector<DilemmaGame>& games() const { return games_; }
  const std::vector<DurationDistribution>& durations() const { return durations_; }
  std::size_t successor(std::size_t i) const { return (i + 1) % games_.size(); }

private:
  std::vector<DilemmaGame> games_;
  std::vector<DurationDistribution> durations_;
};

/// Long-run fraction of time spent in each game.
class GameDistribution {
public:
  /// Throws std::invalid_argument unless entries are finite, nonnegative and
  /// sum to 1 within 1e-12.
  explicit GameDistribution(std::vector<double> pi);

  /// Point mass on game `index` out of `n`.
  static GameDistribution vertex(std::size_t n, std::size_t index);

  std::size_t size() const { return pi_.size(); }
  double operator[](std::size_t i) const { return pi_[i]; }
  const std::vector<double>& values() const { return pi_; }

  bool operator==(const GameDistribution&) const = default;

private:
  std::vector<double> pi_;
};

/// pi_i = E[T_i] / sum_j E[T_j]. Throws std::invalid_argument if the total mean
/// duration is zero or not finite.
GameDistribution stationary_distribution(const GameProcess& process);

struct DilemmaMeans {
  double dr; ///< sum_i pi_i dr_i
  double dg; ///< sum_i pi_i dg_i
};

/// Throws std::invalid_argument on length mismatch.
DilemmaMeans expected_dilemmas(const GameDistribution& dist, std::span<const DilemmaGame> games);

/// Everything the simulation needs to know about which game an edge plays.
///
/// `pi` is always present. `process` is required for renewal dynamics. `policy`
/// optionally makes the distribution depend on the current cooperator fraction
/// (only honoured by i.i.d. stationary resampling).
struct GameEnvironment {
  std::vector<DilemmaGame> games;
  GameDistribution pi;
  std::optional<GameProcess> process;
  std::function<GameDistribution(double p_a)> policy;

  static GameEnvironment from_process(GameProcess process);
  static GameEnvironment from_distribution(std::vector<DilemmaGame> games, GameDistribution pi);
};

} // namespace varigame
