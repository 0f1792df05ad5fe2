#include <bit>
#include <cmath>

#include <stdexcept>

#include <doctest.h>

#include "varigame/oracle.hpp"

using namespace varigame;
using doctest::Approx;

TEST_CASE("payoff matrices") {
  const auto m = PayoffMatrix::of(DilemmaGame(0.3, 0.2));
  CHECK(m.aa == 1.0);
  CHECK(m.ab == -0.2);
  CHECK(m.ba == 1.3);
  CHECK(m.bb == 0.0);
  CHECK(m(Strategy::B, Strategy::A) == 1.3);

  const auto e = expected_payoff_matrix(GameDistribution({0.25, 0.75}),
                                        std::vector{DilemmaGame(0.4, 0.0), DilemmaGame(0.0, 0.8)});
  CHECK(e.ab == Approx(-0.6));
  CHECK(e.ba == Approx(1.1));
}

TEST_CASE("transition matrix is row stochastic") {
  const auto g = lattice_von_neumann(3);
  const auto rows = transition_matrix(g, PayoffMatrix::of(DilemmaGame(0.3, 0.4)), 0.1);
  REQUIRE(rows.size() == 512u);
  for (Configuration c = 0; c < rows.size(); ++c) {
    double total = 0.0;
    for (const auto& [to, p] : rows[c]) {
      CHECK(p >= 0.0);
      CHECK(std::popcount(c ^ to) <= 1);
      total += p;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
  // Monomorphic states only return to themselves.
  for (Configuration c : {Configuration{0}, Configuration{511}}) {
    REQUIRE(rows[c].size() == 1);
    CHECK(rows[c][0].first == c);
  }
  CHECK_THROWS_AS(transition_matrix(lattice_von_neumann(5), PayoffMatrix{}, 0.1), std::invalid_argument);
}

TEST_CASE("neutral drift is exact") {
  for (const auto& g : {lattice_von_neumann(3), complete_graph(4), lattice_moore(3), complete_graph(12)}) {
    const auto r = exact_fixation(g, PayoffMatrix::of(DilemmaGame(0.5, 0.5)), 0.0);
    CHECK(r.fixation_prob == Approx(1.0 / g.n_nodes()).epsilon(1e-10));
    CHECK(r.solver_residual <= kOracleResidualTolerance);
  }
}

TEST_CASE("complete graphs agree with the lumped chain") {
  const auto m = PayoffMatrix::of(DilemmaGame(0.5, 0.5));
  const double exact = exact_fixation(complete_graph(4), m, 0.1).fixation_prob;
  CHECK(std::abs(exact - lumped_fixation_complete(4, m, 0.1)) <= 1e-10);

  // Above the dense cap the iterative solver takes over.
  for (double w : {0.02, 0.08}) {
    const auto s = PayoffMatrix::of(DilemmaGame(-0.2, 0.3));
    const auto r = exact_fixation(complete_graph(12), s, w);
    CHECK(std::abs(r.fixation_prob - lumped_fixation_complete(12, s, w)) <= 1e-10);
  }
  for (std::size_t n : {2u, 3u, 5u, 7u}) {
    const auto s = PayoffMatrix::of(DilemmaGame(0.1, 0.6));
    CHECK(std::abs(exact_fixation(complete_graph(n), s, 0.05).fixation_prob -
                   lumped_fixation_complete(n, s, 0.05)) <= 1e-10);
  }
}

TEST_CASE("two-node chain") {
  // Whichever node dies copies the other, so one A fixes with probability 1/2.
  const auto m = PayoffMatrix::of(DilemmaGame(0.9, 0.9));
  CHECK(lumped_fixation_complete(2, m, 0.3) == Approx(0.5).epsilon(1e-15));
  CHECK(lumped_fixation_complete(7, m, 0.0) == Approx(1.0 / 7).epsilon(1e-14));
}

TEST_CASE("absorption probabilities into both states sum to one") {
  const auto g = lattice_von_neumann(3);
  const auto m = PayoffMatrix::of(DilemmaGame(0.2, -0.3));
  const auto a = absorption_probabilities(g, m, 0.07, Strategy::A);
  const auto b = absorption_probabilities(g, m, 0.07, Strategy::B);
  for (std::size_t c = 0; c < a.probability.size(); ++c) {
    CHECK(a.probability[c] >= -1e-12);
    CHECK(a.probability[c] <= 1 + 1e-12);
    CHECK(std::abs(a.probability[c] + b.probability[c] - 1.0) <= 1e-10);
  }
  CHECK(a.probability[0] == 0.0);
  CHECK(a.probability[511] == 1.0);

  const auto full = exact_fixation(g, m, 0.07, true);
  REQUIRE(full.per_configuration.size() == 512u);
  double mean = 0.0;
  for (int v = 0; v < 9; ++v) mean += full.per_configuration[1u << v];
  CHECK(mean / 9 == Approx(full.fixation_prob).epsilon(1e-14));
}

TEST_CASE("harsher prisoner's dilemmas lower cooperator fixation") {
  double prev = 1.0;
  for (double d : {0.0, 0.1, 0.2, 0.4, 0.6}) {
    const double r = lumped_fixation_complete(8, PayoffMatrix::of(DilemmaGame(d, d)), 0.1);
    CHECK(r < prev);
    prev = r;
  }
  prev = 1.0;
  for (double d : {0.0, 0.2, 0.5}) {
    const double r = exact_fixation(complete_graph(5), PayoffMatrix::of(DilemmaGame(d, d)), 0.1).fixation_prob;
    CHECK(r < prev);
    prev = r;
  }
}
