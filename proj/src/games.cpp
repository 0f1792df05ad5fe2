#include "varigame/games.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace varigame {

namespace {

constexpr double kDilemmaSlack = 1e-12;
constexpr double kSumTolerance = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_dilemma(double d, const char* name) {
  if (!std::isfinite(d) || std::abs(d) > 1.0 + kDilemmaSlack) {
    throw std::invalid_argument(std::string("dilemma strength ") + name + " = " + std::to_string(d) +
                                " outside [-1, 1]");
  }
}

} // namespace

DilemmaGame::DilemmaGame(double dg, double dr) : dg_(dg), dr_(dr) {
  check_dilemma(dg, "dg");
  check_dilemma(dr, "dr");
}

double payoff(const DilemmaGame& game, Strategy own, Strategy opponent) {
  if (own == Strategy::A) {
    return opponent == Strategy::A ? 1.0 : -game.dr();
  }
  return opponent == Strategy::A ? 1.0 + game.dg() : 0.0;
}

DurationDistribution::DurationDistribution(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const Exponential& e) {
                   if (!(e.rate > 0.0) || !std::isfinite(e.rate))
                     throw std::invalid_argument("exponential duration needs rate > 0");
                 },
                 [](const Uniform& u) {
                   if (!(u.lower >= 0.0) || !(u.lower < u.upper) || !std::isfinite(u.upper))
                     throw std::invalid_argument("uniform duration needs 0 <= lower < upper");
                 },
                 [](const Deterministic& d) {
                   if (!(d.duration > 0.0) || !std::isfinite(d.duration))
                     throw std::invalid_argument("deterministic duration must be > 0");
                 },
                 [](const EmpiricalTable& t) {
                   if (t.values.empty()) throw std::invalid_argument("empty duration table");
                   double total = 0.0;
                   for (const auto& [d, p] : t.values) {
                     if (!(d > 0.0) || !std::isfinite(d))
                       throw std::invalid_argument("duration table entries must be > 0");
                     if (!(p >= 0.0)) throw std::invalid_argument("duration table probabilities must be >= 0");
                     total += p;
                   }
                   if (std::abs(total - 1.0) > kSumTolerance)
                     throw std::invalid_argument("duration table probabilities must sum to 1");
                 },
             },
             v_);
}

double mean_duration(const DurationDistribution& dist) {
  return std::visit(overloaded{
                        [](const Exponential& e) { return 1.0 / e.rate; },
                        [](const Uniform& u) { return 0.5 * (u.lower + u.upper); },
                        [](const Deterministic& d) { return d.duration; },
                        [](const EmpiricalTable& t) {
                          double m = 0.0;
                          for (const auto& [d, p] : t.values) m += d * p;
                          return m;
                        },
                    },
                    dist.variant());
}

double sample_duration(const DurationDistribution& dist, RandomStream& rng) {
  return std::visit(overloaded{
                        [&](const Exponential& e) { return rng.exponential(e.rate); },
                        [&](const Uniform& u) { return u.lower + (u.upper - u.lower) * rng.uniform_open(); },
                        [](const Deterministic& d) { return d.duration; },
                        [&](const EmpiricalTable& t) {
                          const double r = rng.uniform();
                          double cumulative = 0.0;
                          for (const auto& [d, p] : t.values) {
                            cumulative += p;
                            if (r < cumulative) return d;
                          }
                          return t.values.back().first;
                        },
                    },
                    dist.variant());
}

GameProcess::GameProcess(std::vector<DilemmaGame> games, std::vector<DurationDistribution> durations)
    : games_(std::move(games)), durations_(std::move(durations)) {
  if (games_.empty()) throw std::invalid_argument("game process needs at least one game");
  if (games_.size() != durations_.size())
    throw std::invalid_argument("game process needs one duration distribution per game");
}

GameProcess GameProcess::single(DilemmaGame game) {
  return GameProcess({game}, {Deterministic{1.0}});
}

GameDistribution::GameDistribution(std::vector<double> pi) : pi_(std::move(pi)) {
  if (pi_.empty()) throw std::invalid_argument("game distribution is empty");
  double total = 0.0;
  for (double p : pi_) {
    if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("game distribution entries must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance)
    throw std::invalid_argument("game distribution must sum to 1 (got " + std::to_string(total) + ")");
}

GameDistribution GameDistribution::vertex(std::size_t n, std::size_t index) {
  std::vector<double> pi(n, 0.0);
  pi.at(index) = 1.0;
  return GameDistribution(std::move(pi));
}

GameDistribution stationary_distribution(const GameProcess& process) {
  std::vector<double> means;
  means.reserve(process.size());
  for (const auto& d : process.durations()) means.push_back(mean_duration(d));
  const double total = std::accumulate(means.begin(), means.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::invalid_argument("total mean duration must be positive and finite");
  for (double& m : means) m /= total;
  return GameDistribution(std::move(means));
}

DilemmaMeans expected_dilemmas(const GameDistribution& dist, std::span<const DilemmaGame> games) {
  if (dist.size() != games.size())
    throw std::invalid_argument("game distribution length " + std::to_string(dist.size()) +
                                " does not match " + std::to_string(games.size()) + " games");
  DilemmaMeans m{0.0, 0.0};
  for (std::size_t i = 0; i < games.size(); ++i) {
    m.dr += dist[i] * games[i].dr();
    m.dg += dist[i] * games[i].dg();
  }
  return m;
}

GameEnvironment GameEnvironment::from_process(GameProcess process) {
  auto pi = stationary_distribution(process);
  auto games = process.games();
  return GameEnvironment{std::move(games), std::move(pi), std::move(process), {}};
}

GameEnvironment GameEnvironment::from_distribution(std::vector<DilemmaGame> games, GameDistribution pi) {
  if (games.size() != pi.size()) throw std::invalid_argument("one stationary probability per game required");
  return GameEnvironment{std::move(games), std::move(pi), std::nullopt, {}};
}

} // namespace varigame
