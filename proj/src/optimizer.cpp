#include "varigame/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace varigame {

namespace {

constexpr double kTieTolerance = 1e-12;

double a_of(int k) {
  const double kd = k;
  return kd * kd - kd - 1.0;
}

void require_two(std::span<const DilemmaGame> games2) {
  if (games2.size() != 2) throw std::invalid_argument("two-game policy needs exactly two games");
}

// Per-game objective coefficient, oriented so that smaller is better.
double cost(ObjectiveKind objective, const DilemmaGame& g, double p_a, int k) {
  if (objective == ObjectiveKind::MaxGradient) {
    const double a = a_of(k);
    return -(-a * g.dr() - g.dg() + (a - 1.0) * p_a * (g.dr() - g.dg()));
  }
  return p_a * (g.dg() - g.dr()) + g.dr();
}

double switching(ObjectiveKind objective, double p_a, std::span<const DilemmaGame> games2, int k) {
  return objective == ObjectiveKind::MaxGradient ? g1(p_a, games2, k) : g2(p_a, games2);
}

} // namespace

const GameDistribution& PiecewisePolicy::at(double p_a) const {
  if (segments.empty()) throw std::logic_error("empty policy");
  for (const auto& s : segments)
    if (p_a < s.upper) return s.dist;
  return segments.back().dist;
}

bool PiecewisePolicy::tie_at(double p_a) const {
  return degenerate || std::find(breakpoints.begin(), breakpoints.end(), p_a) != breakpoints.end();
}

double h1(const GameDistribution& dist, std::span<const DilemmaGame> games, double p_a, int k) {
  const auto m = expected_dilemmas(dist, games);
  const double a = a_of(k);
  return -a * m.dr - m.dg + (a - 1.0) * p_a * (m.dr - m.dg);
}

double h2(const GameDistribution& dist, std::span<const DilemmaGame> games, double p_a) {
  const auto m = expected_dilemmas(dist, games);
  return p_a * (m.dg - m.dr) + m.dr;
}

double g1(double p_a, std::span<const DilemmaGame> games2, int k) {
  require_two(games2);
  const auto& x = games2[0];
  const auto& y = games2[1];
  const double a = a_of(k);
  return a * (x.dr() - y.dr()) + (x.dg() - y.dg()) - (a - 1.0) * (x.dr() - x.dg() - y.dr() + y.dg()) * p_a;
}

double g2(double p_a, std::span<const DilemmaGame> games2) {
  require_two(games2);
  const auto& x = games2[0];
  const auto& y = games2[1];
  return (x.dg() - y.dg()) * p_a + (x.dr() - y.dr()) * (1.0 - p_a);
}

PiecewisePolicy optimal_policy_two_games(ObjectiveKind objective, std::span<const DilemmaGame> games2, int k) {
  require_two(games2);
  if (objective == ObjectiveKind::MaxGradient && k < 3)
    throw std::invalid_argument("gradient objective needs k >= 3");

  const auto first = GameDistribution::vertex(2, 0);
  const auto second = GameDistribution::vertex(2, 1);
  // pi_1 = 0 where G > 0, pi_1 = 1 where G < 0.
  auto vertex_for = [&](double g) { return g > 0.0 ? second : first; };

  const double at0 = switching(objective, 0.0, games2, k);
  const double at1 = switching(objective, 1.0, games2, k);
  const double slope = at1 - at0;

  PiecewisePolicy policy;
  policy.objective = objective;

  if (slope == 0.0) {
    policy.case_label = "flat";
    policy.degenerate = at0 == 0.0;
    policy.segments.push_back({0.0, 1.0, false, vertex_for(at0)});
    return policy;
  }

  // Family 1 is the branch the case analysis lists first: G decreasing for the
  // gradient objective, G increasing for the fitness-gap objective.
  const bool family_one = objective == ObjectiveKind::MaxGradient ? slope < 0.0 : slope > 0.0;
  const std::string family = family_one ? "1" : "2";

  const bool crosses = (at0 > 0.0 && at1 < 0.0) || (at0 < 0.0 && at1 > 0.0);
  double p_star = 0.0;
  if (crosses) {
    const auto& x = games2[0];
    const auto& y = games2[1];
    p_star = objective == ObjectiveKind::MaxGradient
                 ? at0 / ((a_of(k) - 1.0) * (x.dr() - x.dg() - y.dr() + y.dg()))
                 : (y.dr() - x.dr()) / (x.dg() - y.dg() - x.dr() + y.dr());
  }

  if (crosses && p_star > 0.0 && p_star < 1.0) {
    policy.case_label = family + "(iii)";
    policy.breakpoints.push_back(p_star);
    policy.segments.push_back({0.0, p_star, false, vertex_for(at0)});
    policy.segments.push_back({p_star, 1.0, true, vertex_for(at1)});
    return policy;
  }

  // Constant policy; a boundary zero joins the adjacent constant case.
  const double interior = switching(objective, 0.5, games2, k);
  const auto& vertex = vertex_for(interior);
  // Case (i) of each family is the one decided at p_A = 0.
  const bool case_one = objective == ObjectiveKind::MaxGradient ? (family_one ? vertex == first : vertex == second)
                                                                : (family_one ? vertex == second : vertex == first);
  policy.case_label = family + (case_one ? "(i)" : "(ii)");
  policy.segments.push_back({0.0, 1.0, false, vertex});
  return policy;
}

VertexChoice optimal_distribution_n_games(ObjectiveKind objective, std::span<const DilemmaGame> games, double p_a,
                                          int k) {
  if (games.empty()) throw std::invalid_argument("need at least one game");
  std::size_t best = 0;
  double best_cost = cost(objective, games[0], p_a, k);
  bool tie = false;
  for (std::size_t i = 1; i < games.size(); ++i) {
    const double c = cost(objective, games[i], p_a, k);
    if (c < best_cost - kTieTolerance) {
      best = i;
      best_cost = c;
      tie = false;
    } else if (std::abs(c - best_cost) <= kTieTolerance) {
      tie = true;
    }
  }
  return {GameDistribution::vertex(games.size(), best), best, tie};
}

GridReport grid_verify(ObjectiveKind objective, std::span<const DilemmaGame> games2, int k, int resolution) {
  require_two(games2);
  if (resolution < 10) throw std::invalid_argument("grid resolution must be >= 10");
  const auto policy = optimal_policy_two_games(objective, games2, k);

  const GameDistribution first({1.0, 0.0}), second({0.0, 1.0});
  auto vertex_score = [&](const GameDistribution& d, double p_a) {
    return objective == ObjectiveKind::MaxGradient ? h1(d, games2, p_a, k) : -h2(d, games2, p_a);
  };

  GridReport report;
  report.degenerate = true;
  std::optional<int> first_argbest;
  for (int i = 1; i < resolution; ++i) {
    const double p = static_cast<double>(i) / resolution;
    // Both objectives are linear in the distribution, so a mixture scores the
    // same mixture of the vertex scores.
    const double s1 = vertex_score(first, p), s2 = vertex_score(second, p);
    auto score = [&](double, double pi1) { return pi1 * s1 + (1.0 - pi1) * s2; };
    double best = -INFINITY, worst = INFINITY;
    int argbest = 0;
    for (int j = 0; j <= resolution; ++j) {
      const double pi1 = static_cast<double>(j) / resolution;
      const double s = score(p, pi1);
      if (s > best + kTieTolerance) {
        best = s;
        argbest = j;
      }
      worst = std::min(worst, s);
    }
    best = std::max(best, score(p, static_cast<double>(argbest) / resolution));
    if (best - worst > kTieTolerance) report.degenerate = false;

    const double chosen = vertex_score(policy.at(p), p);
    const double gap = best - chosen;
    report.worst_gap = std::max(report.worst_gap, gap);
    if (gap > kTieTolerance) ++report.violations;
    ++report.points;

    if (!first_argbest)
      first_argbest = argbest;
    else if (!report.switch_point && argbest != *first_argbest)
      report.switch_point = p;
  }
  if (report.degenerate) report.switch_point.reset();
  return report;
}

} // namespace varigame
