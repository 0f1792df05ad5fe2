#include "varigame/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace varigame {

PayoffMatrix PayoffMatrix::of(const DilemmaGame& game) {
  return {payoff(game, Strategy::A, Strategy::A), payoff(game, Strategy::A, Strategy::B),
          payoff(game, Strategy::B, Strategy::A), payoff(game, Strategy::B, Strategy::B)};
}

double PayoffMatrix::operator()(Strategy own, Strategy opp) const {
  if (own == Strategy::A) return opp == Strategy::A ? aa : ab;
  return opp == Strategy::A ? ba : bb;
}

PayoffMatrix expected_payoff_matrix(const GameDistribution& dist, std::span<const DilemmaGame> games) {
  if (dist.size() != games.size()) throw std::invalid_argument("game distribution length does not match games");
  PayoffMatrix m{0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < games.size(); ++i) {
    const auto g = PayoffMatrix::of(games[i]);
    m.aa += dist[i] * g.aa;
    m.ab += dist[i] * g.ab;
    m.ba += dist[i] * g.ba;
    m.bb += dist[i] * g.bb;
  }
  return m;
}

namespace {

Strategy at(Configuration s, NodeId v) { return (s >> v) & 1u ? Strategy::A : Strategy::B; }

void check_size(const RegularGraph& graph) {
  if (graph.n_nodes() > kOracleMaxNodes)
    throw std::invalid_argument("exact oracle limited to " + std::to_string(kOracleMaxNodes) + " nodes, got " +
                                std::to_string(graph.n_nodes()));
}

// Probability that node `dead` is replaced by A, with fitness from the
// pre-death configuration. `fit` holds every node's fitness in configuration s.
double prob_replaced_by_a(const RegularGraph& graph, Configuration s, NodeId dead, const std::vector<double>& fit) {
  double total = 0.0, to_a = 0.0;
  for (NodeId y : graph.neighbors(dead)) {
    total += fit[y];
    if (at(s, y) == Strategy::A) to_a += fit[y];
  }
  if (!(total > 0.0)) throw std::domain_error("non-positive neighborhood fitness in exact oracle");
  return to_a / total;
}

void fitness_of(const RegularGraph& graph, Configuration s, const PayoffMatrix& m, double omega,
                std::vector<double>& fit) {
  for (NodeId v = 0; v < graph.n_nodes(); ++v) {
    double f = 0.0;
    for (NodeId u : graph.neighbors(v)) f += m(at(s, v), at(s, u));
    fit[v] = 1.0 - omega + omega * f;
    if (fit[v] < 0.0) throw std::domain_error("negative fitness in exact oracle");
  }
}

} // namespace

std::vector<TransitionRow> transition_matrix(const RegularGraph& graph, const PayoffMatrix& payoffs, double omega) {
  check_size(graph);
  const std::size_t n = graph.n_nodes();
  const Configuration states = Configuration{1} << n;
  std::vector<TransitionRow> rows(states);
  std::vector<double> fit(n);
  for (Configuration s = 0; s < states; ++s) {
    fitness_of(graph, s, payoffs, omega, fit);
    auto& row = rows[s];
    double stay = 1.0;
    for (NodeId v = 0; v < n; ++v) {
      const double pa = prob_replaced_by_a(graph, s, v, fit);
      const double flip = (at(s, v) == Strategy::A ? 1.0 - pa : pa) / static_cast<double>(n);
      if (flip > 0.0) {
        row.emplace_back(s ^ (Configuration{1} << v), flip);
        stay -= flip;
      }
    }
    row.emplace_back(s, stay);
  }
  return rows;
}

AbsorptionResult absorption_probabilities(const RegularGraph& graph, const PayoffMatrix& payoffs, double omega,
                                          Strategy target) {
  check_size(graph);
  const std::size_t n = graph.n_nodes();
  const auto rows = transition_matrix(graph, payoffs, omega);
  const Configuration states = static_cast<Configuration>(rows.size());
  const Configuration all_a = states - 1;
  const Configuration goal = target == Strategy::A ? all_a : 0;

  // Unknowns are the transient configurations 1 .. 2^N - 2, index s - 1.
  const Eigen::Index m = static_cast<Eigen::Index>(states) - 2;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(m) * (n + 1));
  for (Configuration s = 1; s < all_a; ++s) {
    const Eigen::Index r = s - 1;
    triplets.emplace_back(r, r, 1.0);
    for (const auto& [t, p] : rows[s]) {
      if (t == goal)
        b[r] += p;
      else if (t != 0 && t != all_a)
        triplets.emplace_back(r, static_cast<Eigen::Index>(t) - 1, -p);
    }
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::VectorXd x;
  if (n <= kOracleDenseMaxNodes) {
    const Eigen::MatrixXd dense(a);
    x = dense.partialPivLu().solve(b);
  } else {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> solver;
    solver.setTolerance(1e-14);
    solver.setMaxIterations(100000);
    solver.compute(a);
    x = solver.solve(b);
  }

  AbsorptionResult out;
  out.residual = (a * x - b).cwiseAbs().maxCoeff();
  if (!(out.residual <= kOracleResidualTolerance))
    throw std::runtime_error("exact oracle solve did not converge (residual " + std::to_string(out.residual) + ")");
  out.probability.assign(states, 0.0);
  out.probability[goal] = 1.0;
  for (Configuration s = 1; s < all_a; ++s) out.probability[s] = x[s - 1];
  return out;
}

ExactResult exact_fixation(const RegularGraph& graph, const PayoffMatrix& payoffs, double omega,
                           bool keep_per_configuration) {
  auto abs = absorption_probabilities(graph, payoffs, omega, Strategy::A);
  ExactResult r;
  const std::size_t n = graph.n_nodes();
  double sum = 0.0;
  for (NodeId v = 0; v < n; ++v) sum += abs.probability[Configuration{1} << v];
  r.fixation_prob = sum / static_cast<double>(n);
  r.solver_residual = abs.residual;
  if (keep_per_configuration) r.per_configuration = std::move(abs.probability);
  return r;
}

double lumped_fixation_complete(std::size_t n, const PayoffMatrix& payoffs, double omega) {
  if (n < 2) throw std::invalid_argument("complete graph needs n >= 2");
  const double nd = static_cast<double>(n);
  auto fit = [&](double payoff_total) {
    const double f = 1.0 - omega + omega * payoff_total;
    if (f < 0.0) throw std::domain_error("negative fitness in lumped chain");
    return f;
  };
  double sum = 1.0, prod = 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double jd = static_cast<double>(j);
    // Every A meets j - 1 other A and n - j B; every B meets j A and n - j - 1
    // other B, whichever node is about to die.
    const double f_a = fit((jd - 1.0) * payoffs.aa + (nd - jd) * payoffs.ab);
    const double f_b = fit(jd * payoffs.ba + (nd - jd - 1.0) * payoffs.bb);
    const double up = (nd - jd) / nd * jd * f_a / (jd * f_a + (nd - jd - 1.0) * f_b);
    const double down = jd / nd * (nd - jd) * f_b / ((jd - 1.0) * f_a + (nd - jd) * f_b);
    prod *= down / up;
    sum += prod;
  }
  return 1.0 / sum;
}

} // namespace varigame
