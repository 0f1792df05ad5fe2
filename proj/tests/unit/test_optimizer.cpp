#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <stdexcept>

#include <doctest.h>

#include "varigame/experiment/commands.hpp"
#include "varigame/optimizer.hpp"
#include "varigame/theory.hpp"

using namespace varigame;
using doctest::Approx;

namespace {

std::vector<DilemmaGame> random_pair(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  return {DilemmaGame(d(gen), d(gen)), DilemmaGame(d(gen), d(gen))};
}

double objective_value(ObjectiveKind o, const GameDistribution& d, std::span<const DilemmaGame> g, double p, int k) {
  // Larger is better for both.
  return o == ObjectiveKind::MaxGradient ? h1(d, g, p, k) : -h2(d, g, p);
}

double switching(ObjectiveKind o, double p, std::span<const DilemmaGame> g, int k) {
  return o == ObjectiveKind::MaxGradient ? g1(p, g, k) : g2(p, g);
}

} // namespace

TEST_CASE("objective functions") {
  const std::vector<DilemmaGame> g{DilemmaGame(-0.3, 0.2), DilemmaGame(0.0, 0.0)};
  const GameDistribution first({1.0, 0.0});
  CHECK(h1(GameDistribution({0.5, 0.5}), std::vector{DilemmaGame(0, 0), DilemmaGame(0, 0)}, 0.3, 4) == 0.0);
  CHECK(h1(first, g, 0.5, 4) == Approx(0.6).epsilon(1e-12));
  CHECK(h2(first, g, 0.0) == 0.2);
  CHECK(h2(first, g, 1.0) == -0.3);
  CHECK(h2(GameDistribution({1.0}), std::vector{DilemmaGame(0.4, 0.4)}, 0.37) == Approx(0.4));

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto games = random_pair(gen);
    const double a = u(gen), x = u(gen), y = u(gen), p = u(gen);
    const GameDistribution dx({x, 1 - x}), dy({y, 1 - y}), mix({a * x + (1 - a) * y, 1 - (a * x + (1 - a) * y)});
    CHECK(h1(mix, games, p, 5) == Approx(a * h1(dx, games, p, 5) + (1 - a) * h1(dy, games, p, 5)).epsilon(1e-12));
    CHECK(h2(mix, games, p) == Approx(a * h2(dx, games, p) + (1 - a) * h2(dy, games, p)).epsilon(1e-12));
  }
}

TEST_CASE("switching functions") {
  const std::vector<DilemmaGame> same{DilemmaGame(0.2, 0.7), DilemmaGame(0.2, 0.7)};
  CHECK(g1(0.4, same, 4) == 0.0);
  CHECK(g2(0.4, same) == 0.0);

  const std::vector<DilemmaGame> g{DilemmaGame(-0.3, 0.2), DilemmaGame(0.0, 0.0)};
  CHECK(g1(0.0, g, 4) == Approx(1.9));
  CHECK(g1(1.0, g, 4) - g1(0.0, g, 4) == Approx(-5.0));
  CHECK(std::abs(g1(0.38, g, 4)) < 1e-12);

  const std::vector<DilemmaGame> f{DilemmaGame(0.5, 0.0), DilemmaGame(0.1, 0.2)};
  CHECK(g2(0.0, f) == Approx(-0.2));
  CHECK(g2(1.0, f) == Approx(0.4));
  CHECK(std::abs(g2(1.0 / 3, f)) < 1e-12);

  // Moving mass onto game 1 changes the objectives by pi_1 * G.
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const auto games = random_pair(gen);
    const double pi1 = u(gen), p = u(gen);
    const int k = 3 + static_cast<int>(u(gen) * 6);
    const GameDistribution d({pi1, 1 - pi1}), base({0.0, 1.0});
    CHECK(h1(d, games, p, k) - h1(base, games, p, k) == Approx(-pi1 * g1(p, games, k)).epsilon(1e-10));
    CHECK(h2(d, games, p) - h2(base, games, p) == Approx(pi1 * g2(p, games)).epsilon(1e-10));
  }
}

TEST_CASE("gradient policy examples") {
  const std::vector<DilemmaGame> g{DilemmaGame(-0.3, 0.2), DilemmaGame(0.0, 0.0)};
  const auto p = optimal_policy_two_games(ObjectiveKind::MaxGradient, g, 4);
  CHECK(p.case_label == "1(iii)");
  REQUIRE(p.segments.size() == 2);
  REQUIRE(p.breakpoints.size() == 1);
  CHECK(p.breakpoints[0] == Approx(0.38).epsilon(1e-12));
  CHECK(p.segments[0].dist == GameDistribution({0.0, 1.0}));
  CHECK(p.segments[1].dist == GameDistribution({1.0, 0.0}));
  CHECK_FALSE(p.segments[0].lower_closed);
  CHECK(p.segments[1].lower_closed);
  CHECK(p.at(0.2) == GameDistribution({0.0, 1.0}));
  CHECK(p.at(p.breakpoints[0]) == GameDistribution({1.0, 0.0}));
  CHECK(p.tie_at(p.breakpoints[0]));
  CHECK_FALSE(p.tie_at(0.5));

  const auto mild = optimal_policy_two_games(ObjectiveKind::MaxGradient,
                                             std::vector{DilemmaGame(0.0, 0.35), DilemmaGame(0.6, 0.3)}, 4);
  CHECK(mild.segments.size() == 1);
  CHECK(mild.at(0.5) == GameDistribution({1.0, 0.0}));
  CHECK_THROWS_AS(optimal_policy_two_games(ObjectiveKind::MaxGradient, g, 2), std::invalid_argument);
}

TEST_CASE("fitness-gap policy examples") {
  const auto p = optimal_policy_two_games(ObjectiveKind::MinFitnessDiff,
                                          std::vector{DilemmaGame(0.4, 0.2), DilemmaGame(0.1, 0.1)}, 4);
  CHECK(p.segments.size() == 1);
  CHECK(p.at(0.3) == GameDistribution({0.0, 1.0}));

  const auto s = optimal_policy_two_games(ObjectiveKind::MinFitnessDiff,
                                          std::vector{DilemmaGame(0.5, 0.0), DilemmaGame(0.1, 0.2)}, 4);
  REQUIRE(s.breakpoints.size() == 1);
  CHECK(s.breakpoints[0] == Approx(1.0 / 3).epsilon(1e-12));
  CHECK(s.at(0.1) == GameDistribution({1.0, 0.0}));
  CHECK(s.at(0.9) == GameDistribution({0.0, 1.0}));
}

TEST_CASE("identical games are degenerate") {
  const std::vector<DilemmaGame> same{DilemmaGame(0.3, 0.3), DilemmaGame(0.3, 0.3)};
  for (auto o : {ObjectiveKind::MaxGradient, ObjectiveKind::MinFitnessDiff}) {
    const auto p = optimal_policy_two_games(o, same, 4);
    CHECK(p.degenerate);
    CHECK(p.case_label == "flat");
    CHECK(p.at(0.5) == GameDistribution({1.0, 0.0}));
    const auto r = grid_verify(o, same, 4, 100);
    CHECK(r.degenerate);
    CHECK(r.violations == 0);
    CHECK_FALSE(r.switch_point);
  }
}

TEST_CASE("every case family is classified as labelled") {
  for (const auto& c : experiment::optimization_cases()) {
    const std::vector<DilemmaGame> g{c.g1, c.g2};
    const auto p = optimal_policy_two_games(c.objective, g, 4);
    INFO(c.figure << " " << c.label);
    CHECK(p.case_label == c.label);
    CHECK_FALSE(p.degenerate);
    const bool switching_case = c.label.find("(iii)") != std::string::npos;
    CHECK(p.breakpoints.size() == (switching_case ? 1u : 0u));
  }
}

TEST_CASE("grid verification of the closed forms") {
  const std::vector<DilemmaGame> g{DilemmaGame(-0.3, 0.2), DilemmaGame(0.0, 0.0)};
  auto r = grid_verify(ObjectiveKind::MaxGradient, g, 4, 1000);
  CHECK(r.violations == 0);
  CHECK(r.points == 999);
  REQUIRE(r.switch_point);
  CHECK(std::abs(*r.switch_point - 0.38) <= 1e-3 + 1e-12);

  const std::vector<DilemmaGame> f{DilemmaGame(0.5, 0.0), DilemmaGame(0.1, 0.2)};
  r = grid_verify(ObjectiveKind::MinFitnessDiff, f, 4, 1000);
  CHECK(r.violations == 0);
  REQUIRE(r.switch_point);
  CHECK(std::abs(*r.switch_point - 1.0 / 3) <= 1e-3 + 1e-12);

  CHECK_THROWS_AS(grid_verify(ObjectiveKind::MaxGradient, g, 4, 5), std::invalid_argument);
}

TEST_CASE("random instances: vertices, breakpoints, coverage") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto games = random_pair(gen);
    for (auto o : {ObjectiveKind::MaxGradient, ObjectiveKind::MinFitnessDiff})
      for (int k : {3, 4, 8}) {
        const auto policy = optimal_policy_two_games(o, games, k);
        CHECK(grid_verify(o, games, k, 200).violations == 0);

        // Segments tile (0, 1).
        REQUIRE_FALSE(policy.segments.empty());
        CHECK(policy.segments.front().lower == 0.0);
        CHECK(policy.segments.back().upper == 1.0);
        for (std::size_t i = 1; i < policy.segments.size(); ++i)
          CHECK(policy.segments[i].lower == policy.segments[i - 1].upper);

        for (double b : policy.breakpoints) {
          CHECK(std::abs(switching(o, b, games, k)) <= 1e-12);
          CHECK(switching(o, b - 1e-6, games, k) * switching(o, b + 1e-6, games, k) < 0);
        }

        for (int j = 0; j < 10; ++j) {
          const double p = u(gen);
          const double best = objective_value(o, policy.at(p), games, p, k);
          for (int m = 0; m < 100; ++m) {
            const double x = u(gen);
            CHECK(objective_value(o, GameDistribution({x, 1 - x}), games, p, k) <= best + 1e-12);
          }
        }
      }
  }
}

TEST_CASE("fitness-gap policies do not depend on k") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto games = random_pair(gen);
    const auto a = optimal_policy_two_games(ObjectiveKind::MinFitnessDiff, games, 3);
    for (int k : {4, 8}) {
      const auto b = optimal_policy_two_games(ObjectiveKind::MinFitnessDiff, games, k);
      CHECK(a.breakpoints == b.breakpoints);
      CHECK(a.case_label == b.case_label);
      REQUIRE(a.segments.size() == b.segments.size());
      for (std::size_t i = 0; i < a.segments.size(); ++i) CHECK(a.segments[i].dist == b.segments[i].dist);
    }
  }
}

TEST_CASE("n-game vertex solver") {
  const std::vector<DilemmaGame> one{DilemmaGame(0.2, 0.1)};
  const auto c = optimal_distribution_n_games(ObjectiveKind::MaxGradient, one, 0.5, 4);
  CHECK(c.dist == GameDistribution({1.0}));
  CHECK_FALSE(c.tie);

  const std::vector<DilemmaGame> twins{DilemmaGame(0.2, 0.1), DilemmaGame(0.2, 0.1)};
  const auto t = optimal_distribution_n_games(ObjectiveKind::MinFitnessDiff, twins, 0.5, 4);
  CHECK(t.index == 0);
  CHECK(t.tie);

  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto games = random_pair(gen);
    const double p = 0.01 + 0.98 * u(gen);
    for (auto o : {ObjectiveKind::MaxGradient, ObjectiveKind::MinFitnessDiff}) {
      const auto policy = optimal_policy_two_games(o, games, 4);
      const auto v = optimal_distribution_n_games(o, games, p, 4);
      if (!v.tie && !policy.tie_at(p)) CHECK(v.dist == policy.at(p));
    }
  }

  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::exponential_distribution<double> e(1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<DilemmaGame> three{DilemmaGame(d(gen), d(gen)), DilemmaGame(d(gen), d(gen)),
                                         DilemmaGame(d(gen), d(gen))};
    const double p = u(gen);
    for (auto o : {ObjectiveKind::MaxGradient, ObjectiveKind::MinFitnessDiff}) {
      const auto v = optimal_distribution_n_games(o, three, p, 4);
      const double best = objective_value(o, v.dist, three, p, 4);
      for (int m = 0; m < 10000; ++m) {
        const double a = e(gen), b = e(gen), c2 = e(gen), s = a + b + c2;
        CHECK(objective_value(o, GameDistribution({a / s, b / s, 1.0 - a / s - b / s}), three, p, 4) <= best + 1e-12);
      }
    }
  }
}

TEST_CASE("gradient-optimal policy reaches full cooperation first") {
  const PairApproxParams params{4, 100, 0.01};
  auto hit_time = [&](const DistributionPolicy& pol, std::span<const DilemmaGame> games) {
    const auto rec = integrate_trajectory(0.5, params, pol, games, 20000.0, 1.0, 1.0);
    for (std::size_t i = 0; i < rec.times.size(); ++i)
      if (rec.coop_fraction[i] >= 1.0 - 1e-6) return rec.times[i];
    return std::numeric_limits<double>::infinity();
  };
  for (const auto& c : experiment::optimization_cases()) {
    if (c.objective != ObjectiveKind::MaxGradient) continue;
    const std::vector<DilemmaGame> games{c.g1, c.g2};
    const auto policy = optimal_policy_two_games(c.objective, games, 4);
    const double best = hit_time([&](double p) { return policy.at(p); }, games);
    INFO(c.figure << " " << c.label);
    for (std::size_t v = 0; v < 2; ++v) {
      const auto d = GameDistribution::vertex(2, v);
      CHECK(best <= hit_time([d](double) { return d; }, games));
    }
  }
}
