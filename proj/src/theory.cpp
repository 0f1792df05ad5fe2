#include "varigame/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace varigame {

namespace {

constexpr double kFeasibilitySlack = 1e-12;

void require_k(int k, int minimum) {
  if (k < minimum)
    throw std::invalid_argument("degree k = " + std::to_string(k) + " not supported; need k >= " +
                                std::to_string(minimum) + " (the k - 2 prefactor makes the dynamics degenerate)");
}

// Generic polynomial multipliers: a = k^2 - k - 1.
double a_of(int k) {
  const double kd = k;
  return kd * kd - kd - 1.0;
}

double in_unit(double x) {
  if (x < -kFeasibilitySlack || x > 1.0 + kFeasibilitySlack) return -1.0;
  return std::clamp(x, 0.0, 1.0);
}

// k - a E[Dr] - E[Dg] + (a - 1) p E[Dr - Dg]: the common bracket of the reduced
// dynamics, equal to (k - 1)(I_a - I_b E[Dr] - I_c E[Dg]) on the manifold.
double reduced_bracket(double p, int k, const DilemmaMeans& m) {
  const double a = a_of(k);
  return k - a * m.dr - m.dg + (a - 1.0) * p * (m.dr - m.dg);
}

} // namespace

void PairApproxParams::validate() const {
  require_k(k, 3);
  if (n_pop < 2) throw std::invalid_argument("population size must be >= 2");
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be finite and >= 0");
}

Conditionals conditionals(const DynamicsState& state) {
  const double p = in_unit(state.p_a);
  const double q = in_unit(state.q_a_given_a);
  if (p < 0.0 || q < 0.0) throw std::invalid_argument("pair state outside [0, 1]");
  double q_ab;
  if (p >= 1.0) {
    if (q < 1.0 - kFeasibilitySlack) throw std::invalid_argument("all-A state needs q_{A|A} = 1");
    q_ab = 1.0;
  } else {
    q_ab = in_unit(p * (1.0 - q) / (1.0 - p));
    if (q_ab < 0.0)
      throw std::invalid_argument("infeasible pair state: q_{A|B} = " + std::to_string(p * (1.0 - q) / (1.0 - p)));
  }
  return {q, 1.0 - q, q_ab, 1.0 - q_ab};
}

double slow_manifold_q(double p_a, int k) {
  require_k(k, 2);
  return p_a + (1.0 - p_a) / (k - 1.0);
}

Coefficients coefficients_general(const DynamicsState& state, int k) {
  require_k(k, 2);
  const auto c = conditionals(state);
  const double km1 = k - 1.0;
  const double s = c.q_aa + c.q_bb;
  return {km1 * s * (c.q_aa - c.q_ab), km1 * c.q_ba * s + c.q_bb, km1 * c.q_ab * s + c.q_aa};
}

Coefficients coefficients_on_manifold(double p_a, int k) {
  require_k(k, 2);
  const double kd = k;
  const double km1 = kd - 1.0;
  const double a = a_of(k);
  return {kd / km1, (a - (a - 1.0) * p_a) / km1, (1.0 + (a - 1.0) * p_a) / km1};
}

std::pair<double, double> pair_dynamics(const DynamicsState& state, const PairApproxParams& params,
                                        const GameDistribution& dist, std::span<const DilemmaGame> games) {
  params.validate();
  const auto c = conditionals(state);
  const double p = std::clamp(state.p_a, 0.0, 1.0);
  if (p <= 0.0 || p >= 1.0) return {0.0, 0.0};
  const auto m = expected_dilemmas(dist, games);
  const auto co = coefficients_general(state, params.k);
  const double k = params.k;
  const double p_ab = p * c.q_ba;
  const double dp = params.omega * ((k - 1.0) / k) * p_ab * (co.i_a - co.i_b * m.dr - co.i_c * m.dg);
  const double dq = (2.0 / k) * c.q_ba * (1.0 + (k - 1.0) * (c.q_ab - c.q_aa));
  return {dp, dq};
}

double selection_gradient(double p_a, const PairApproxParams& params, const GameDistribution& dist,
                          std::span<const DilemmaGame> games) {
  require_k(params.k, 3);
  const double k = params.k;
  const auto m = expected_dilemmas(dist, games);
  return params.omega * ((k - 2.0) / (k * (k - 1.0))) * p_a * (1.0 - p_a) * reduced_bracket(p_a, params.k, m);
}

DiffusionTerms diffusion_terms(double p_a, const PairApproxParams& params, const GameDistribution& dist,
                               std::span<const DilemmaGame> games) {
  params.validate();
  const double k = params.k;
  const double n = static_cast<double>(params.n_pop);
  const auto m = expected_dilemmas(dist, games);
  const auto co = coefficients_on_manifold(p_a, params.k);
  const double pq = p_a * (1.0 - p_a);
  DiffusionTerms d;
  d.drift = params.omega * ((k - 2.0) / (n * k)) * pq * (co.i_a - co.i_b * m.dr - co.i_c * m.dg);
  d.variance = (2.0 * (k - 2.0) / (n * n * (k - 1.0))) * pq;
  return d;
}

double phi_a(double x, const PairApproxParams& params, const GameDistribution& dist,
             std::span<const DilemmaGame> games) {
  params.validate();
  const double k = params.k;
  const double n = static_cast<double>(params.n_pop);
  const auto m = expected_dilemmas(dist, games);
  const double bracket = (-2.0 * k * k + 2.0 * k + 1.0) * m.dr - (k * k - k + 1.0) * m.dg + 3.0 * k +
                         (k * k - k - 2.0) * x * (m.dr - m.dg);
  return x + (params.omega * n / (6.0 * k)) * x * (1.0 - x) * bracket;
}

double phi_a_quadrature(double x, const PairApproxParams& params, const GameDistribution& dist,
                        std::span<const DilemmaGame> games, int intervals) {
  params.validate();
  if (intervals < 2 || intervals % 2 != 0) throw std::invalid_argument("intervals must be even and >= 2");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const int n = intervals;
  const double h = 1.0 / n;
  // log psi(y) = -2 int_0^y m/v. The ratio m/v is evaluated at cell midpoints,
  // away from the 0/0 endpoints.
  std::vector<double> log_psi(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const double mid = (i + 0.5) * h;
    const auto d = diffusion_terms(mid, params, dist, games);
    log_psi[i + 1] = log_psi[i] - 2.0 * h * d.drift / d.variance;
  }
  auto psi = [&](double y) {
    const double pos = y / h;
    const int i = std::min(static_cast<int>(pos), n - 1);
    const double t = pos - i;
    return std::exp(log_psi[i] + t * (log_psi[i + 1] - log_psi[i]));
  };
  auto simpson = [&](double upper) {
    const int m = std::max(2, 2 * static_cast<int>(std::ceil(upper * n / 2.0)));
    const double step = upper / m;
    double s = psi(0.0) + psi(upper);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * psi(i * step);
    return s * step / 3.0;
  };
  return simpson(x) / simpson(1.0);
}

double rho_a(const PairApproxParams& params, const GameDistribution& dist, std::span<const DilemmaGame> games) {
  params.validate();
  const double k = params.k;
  const double n = static_cast<double>(params.n_pop);
  const auto m = expected_dilemmas(dist, games);
  const double bracket = (-2.0 * k * k + 2.0 * k + 1.0) * m.dr - (k * k - k + 1.0) * m.dg + 3.0 * k +
                         (k * k - k - 2.0) / n * (m.dr - m.dg);
  return 1.0 / n + (params.omega / (6.0 * k)) * (1.0 - 1.0 / n) * bracket;
}

double rho_b(const PairApproxParams& params, const GameDistribution& dist, std::span<const DilemmaGame> games) {
  params.validate();
  const double k = params.k;
  const double n = static_cast<double>(params.n_pop);
  const auto m = expected_dilemmas(dist, games);
  const double bracket = (-k * k + k - 1.0) * m.dr - (2.0 * k * k - 2.0 * k - 1.0) * m.dg + 3.0 * k -
                         (k * k - k - 2.0) / n * (m.dr - m.dg);
  return 1.0 / n - (params.omega / (6.0 * k)) * (1.0 - 1.0 / n) * bracket;
}

double rho_ratio(const PairApproxParams& params, const GameDistribution& dist, std::span<const DilemmaGame> games) {
  params.validate();
  const double k = params.k;
  const double n = static_cast<double>(params.n_pop);
  const auto m = expected_dilemmas(dist, games);
  return 1.0 + params.omega * ((n - 1.0) / 2.0) * (-(k - 1.0) * m.dr - (k - 1.0) * m.dg + 2.0);
}

ConditionResult favors_cooperation(int k, const GameDistribution& dist, std::span<const DilemmaGame> games) {
  require_k(k, 3);
  const double kd = k;
  const auto m = expected_dilemmas(dist, games);
  const double margin = 3.0 * kd - (2.0 * kd * kd - 2.0 * kd - 1.0) * m.dr - (kd * kd - kd + 1.0) * m.dg;
  return {margin > 0.0, margin};
}

ConditionResult cooperation_over_defection(int k, const GameDistribution& dist, std::span<const DilemmaGame> games) {
  require_k(k, 2);
  const auto m = expected_dilemmas(dist, games);
  const double margin = 2.0 / (k - 1.0) - (m.dr + m.dg);
  return {margin > 0.0, margin};
}

double solve_threshold(Condition condition, FreeParameter free, int k, const GameDistribution& dist,
                       std::span<const DilemmaGame> games) {
  if (free.game >= games.size()) throw std::invalid_argument("free parameter refers to a missing game");
  const double kd = k;
  double margin, slope;
  if (condition == Condition::FavorsCooperation) {
    margin = favors_cooperation(k, dist, games).margin;
    slope = free.kind == FreeParameter::Kind::Dr ? -(2.0 * kd * kd - 2.0 * kd - 1.0) : -(kd * kd - kd + 1.0);
  } else {
    margin = cooperation_over_defection(k, dist, games).margin;
    slope = -1.0;
  }
  slope *= dist[free.game];
  if (slope == 0.0)
    throw std::invalid_argument("no threshold: game " + std::to_string(free.game) +
                                " has zero probability, so its parameter does not affect the condition");
  const auto& g = games[free.game];
  const double current = free.kind == FreeParameter::Kind::Dr ? g.dr() : g.dg();
  return current - margin / slope;
}

namespace {

double snap(double p) {
  if (p < kAbsorbingSnap) return 0.0;
  if (p > 1.0 - kAbsorbingSnap) return 1.0;
  return p;
}

} // namespace

double rk4_step(double p, double h, const PairApproxParams& params, const DistributionPolicy& policy,
                std::span<const DilemmaGame> games) {
  auto f = [&](double x) {
    x = std::clamp(x, 0.0, 1.0);
    return selection_gradient(x, params, policy(x), games);
  };
  const double k1 = f(p);
  const double k2 = f(p + 0.5 * h * k1);
  const double k3 = f(p + 0.5 * h * k2);
  const double k4 = f(p + h * k3);
  return p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

TrajectoryRecord integrate_trajectory(double p0, const PairApproxParams& params, const DistributionPolicy& policy,
                                      std::span<const DilemmaGame> games, double t_end, double step,
                                      double sample_interval) {
  params.validate();
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("initial cooperator fraction must lie in [0, 1]");
  if (!(step > 0.0)) throw std::invalid_argument("integration step must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
  if (!(sample_interval > 0.0)) throw std::invalid_argument("sample interval must be positive");

  const auto n_steps = static_cast<std::uint64_t>(std::llround(t_end / step));
  const auto every = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(sample_interval / step)));
  TrajectoryRecord rec;
  double p = snap(p0);
  rec.times.push_back(0.0);
  rec.coop_fraction.push_back(p);
  for (std::uint64_t i = 1; i <= n_steps; ++i) {
    if (p > 0.0 && p < 1.0) p = snap(std::clamp(rk4_step(p, step, params, policy, games), 0.0, 1.0));
    if (i % every == 0 || i == n_steps) {
      rec.times.push_back(static_cast<double>(i) * step);
      rec.coop_fraction.push_back(p);
    }
  }
  return rec;
}

TrajectoryRecord integrate_trajectory(double p0, const PairApproxParams& params, const GameDistribution& dist,
                                      std::span<const DilemmaGame> games, double t_end, double step,
                                      double sample_interval) {
  return integrate_trajectory(
      p0, params, [&dist](double) { return dist; }, games, t_end, step, sample_interval);
}

} // namespace varigame
