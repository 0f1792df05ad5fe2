import math

import pytest

import varigame as vg


def test_games_and_stationary_distribution():
    g = vg.DilemmaGame(0.3, 0.5)
    assert g.payoff(vg.Strategy.B, vg.Strategy.A) == pytest.approx(1.3)
    assert g.payoff(vg.Strategy.A, vg.Strategy.B) == pytest.approx(-0.5)
    proc = vg.GameProcess([g, vg.DilemmaGame(0.0, 0.2)], [vg.Uniform(50, 150), vg.Exponential(0.02)])
    pi = vg.stationary_distribution(proc)
    assert pi.values == pytest.approx([2 / 3, 1 / 3])


def test_invalid_inputs_raise():
    with pytest.raises(ValueError):
        vg.DilemmaGame(1.5, 0.0)
    with pytest.raises(ValueError):
        vg.GameDistribution([0.7, 0.7])
    with pytest.raises(ValueError):
        vg.lattice_von_neumann(2)


def test_graphs():
    g = vg.lattice_von_neumann(10)
    assert (g.n_nodes, g.degree, g.n_edges) == (100, 4, 200)
    assert vg.lattice_moore(10).degree == 8
    assert vg.complete_graph(5).degree == 4
    assert sorted(vg.lattice_von_neumann(3).neighbors(4)) == [1, 3, 5, 7]


def test_neutral_fixation_matches_exact():
    graph = vg.lattice_von_neumann(3)
    env = vg.GameEnvironment.from_distribution([vg.DilemmaGame(0.2, 0.2)], vg.GameDistribution([1.0]))
    cfg = vg.SimConfig()
    cfg.omega = 0.0
    cfg.game_mode = vg.GameMode.IidStationary
    cfg.seed = 5
    res = vg.estimate_fixation(graph, env, cfg, vg.Strategy.A, 20000)
    assert abs(res.estimate - 1 / 9) <= 4 * res.stderr
    exact = vg.exact_fixation(graph, vg.PayoffMatrix.of(vg.DilemmaGame(0.2, 0.2)), 0.0)
    assert exact.fixation_prob == pytest.approx(1 / 9, abs=1e-10)


def test_theory_identities():
    games = [vg.DilemmaGame(0.5, 0.3), vg.DilemmaGame(0.0, 0.2)]
    dist = vg.GameDistribution([0.4, 0.6])
    p = vg.PairApproxParams(4, 100, 0.01)
    assert vg.rho_b(p, dist, games) == pytest.approx(1 - vg.phi_a(0.99, p, dist, games), abs=1e-12)
    margin = vg.cooperation_over_defection(4, dist, games).margin
    assert (vg.rho_ratio(p, dist, games) > 1) == (margin > 0)
    t = vg.solve_threshold(vg.Condition.CooperationOverDefection, "dg", 0, 4, vg.GameDistribution([0.5, 0.5]),
                           [vg.DilemmaGame(0.9, 0.3), vg.DilemmaGame(0.2, 0.5)])
    assert t == pytest.approx(1 / 3, abs=1e-12)


def test_ode_trajectory_stays_in_unit_interval():
    games = [vg.DilemmaGame(0.0, 0.1)]
    rec = vg.integrate_trajectory(0.5, vg.PairApproxParams(4, 100, 0.01), vg.GameDistribution([1.0]), games, 2000.0)
    assert all(0.0 <= x <= 1.0 for x in rec.coop_fraction)
    assert rec.coop_fraction[-1] > rec.coop_fraction[0]


def test_optimizer_policy_and_grid_check():
    games = [vg.DilemmaGame(0.0, 0.35), vg.DilemmaGame(0.6, 0.3)]
    pol = vg.optimal_policy_two_games(vg.ObjectiveKind.MaxGradient, games, 4)
    assert pol.case_label == "1(i)"
    assert pol.at(0.5).values == [1.0, 0.0]
    rep = vg.grid_verify(vg.ObjectiveKind.MaxGradient, games, 4, 200)
    assert rep.violations == 0


def test_oracle_k4_matches_lumped_chain():
    m = vg.expected_payoff_matrix(vg.GameDistribution([0.5, 0.5]), [vg.DilemmaGame(0.4, -0.2), vg.DilemmaGame(-0.1, 0.5)])
    exact = vg.exact_fixation(vg.complete_graph(4), m, 0.1).fixation_prob
    assert math.isclose(exact, vg.lumped_fixation_complete(4, m, 0.1), abs_tol=1e-10)
