#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "varigame/engine.hpp"
#include "varigame/games.hpp"
#include "varigame/network.hpp"
#include "varigame/optimizer.hpp"
#include "varigame/oracle.hpp"
#include "varigame/random.hpp"
#include "varigame/theory.hpp"

namespace py = pybind11;
using namespace varigame;

namespace {

std::vector<DurationDistribution> to_durations(const std::vector<py::object>& items) {
  std::vector<DurationDistribution> out;
  for (const auto& o : items) {
    if (py::isinstance<Exponential>(o))
      out.emplace_back(o.cast<Exponential>());
    else if (py::isinstance<Uniform>(o))
      out.emplace_back(o.cast<Uniform>());
    else if (py::isinstance<Deterministic>(o))
      out.emplace_back(o.cast<Deterministic>());
    else
      throw py::type_error("durations must be Exponential, Uniform or Deterministic");
  }
  return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Evolutionary dynamics of cooperation with variable games on regular networks";

  py::enum_<Strategy>(m, "Strategy").value("A", Strategy::A).value("B", Strategy::B);

  // games
  py::class_<DilemmaGame>(m, "DilemmaGame")
      .def(py::init<double, double>(), py::arg("dg"), py::arg("dr"))
      .def_property_readonly("dg", &DilemmaGame::dg)
      .def_property_readonly("dr", &DilemmaGame::dr)
      .def("payoff", [](const DilemmaGame& g, Strategy own, Strategy opp) { return payoff(g, own, opp); })
      .def("__repr__", [](const DilemmaGame& g) {
        return "DilemmaGame(dg=" + std::to_string(g.dg()) + ", dr=" + std::to_string(g.dr()) + ")";
      });

  py::class_<Exponential>(m, "Exponential").def(py::init<double>(), py::arg("rate")).def_readonly("rate", &Exponential::rate);
  py::class_<Uniform>(m, "Uniform")
      .def(py::init<double, double>(), py::arg("lower"), py::arg("upper"))
      .def_readonly("lower", &Uniform::lower)
      .def_readonly("upper", &Uniform::upper);
  py::class_<Deterministic>(m, "Deterministic")
      .def(py::init<double>(), py::arg("duration"))
      .def_readonly("duration", &Deterministic::duration);

  py::class_<GameProcess>(m, "GameProcess")
      .def(py::init([](std::vector<DilemmaGame> games, const std::vector<py::object>& durations) {
             return GameProcess(std::move(games), to_durations(durations));
           }),
           py::arg("games"), py::arg("durations"))
      .def_property_readonly("games", &GameProcess::games)
      .def("__len__", &GameProcess::size);

  py::class_<GameDistribution>(m, "GameDistribution")
      .def(py::init<std::vector<double>>(), py::arg("pi"))
      .def_static("vertex", &GameDistribution::vertex, py::arg("n"), py::arg("index"))
      .def_property_readonly("values", &GameDistribution::values)
      .def("__getitem__", &GameDistribution::operator[])
      .def("__len__", &GameDistribution::size);

  m.def("stationary_distribution", &stationary_distribution, py::arg("process"));
  py::class_<DilemmaMeans>(m, "DilemmaMeans").def_readonly("dr", &DilemmaMeans::dr).def_readonly("dg", &DilemmaMeans::dg);
  m.def("expected_dilemmas", [](const GameDistribution& d, const std::vector<DilemmaGame>& g) {
    return expected_dilemmas(d, g);
  });

  py::class_<GameEnvironment>(m, "GameEnvironment")
      .def_static("from_process", &GameEnvironment::from_process, py::arg("process"))
      .def_static("from_distribution", &GameEnvironment::from_distribution, py::arg("games"), py::arg("pi"))
      .def_readonly("games", &GameEnvironment::games)
      .def_readonly("pi", &GameEnvironment::pi)
      .def_readwrite("policy", &GameEnvironment::policy);

  // network
  py::class_<RegularGraph>(m, "RegularGraph")
      .def(py::init<std::vector<std::vector<NodeId>>>(), py::arg("adjacency"))
      .def_property_readonly("n_nodes", &RegularGraph::n_nodes)
      .def_property_readonly("degree", &RegularGraph::degree)
      .def_property_readonly("n_edges", &RegularGraph::n_edges)
      .def("neighbors", [](const RegularGraph& g, NodeId v) {
        if (v >= g.n_nodes()) throw py::index_error("node out of range");
        const auto nb = g.neighbors(v);
        return std::vector<NodeId>(nb.begin(), nb.end());
      });
  m.def("lattice_von_neumann", py::overload_cast<std::size_t>(&lattice_von_neumann), py::arg("side"));
  m.def("lattice_von_neumann", py::overload_cast<std::size_t, std::size_t>(&lattice_von_neumann), py::arg("width"),
        py::arg("height"));
  m.def("lattice_moore", py::overload_cast<std::size_t>(&lattice_moore), py::arg("side"));
  m.def("lattice_moore", py::overload_cast<std::size_t, std::size_t>(&lattice_moore), py::arg("width"),
        py::arg("height"));
  m.def("complete_graph", &complete_graph, py::arg("n"));
  m.def("random_regular", &random_regular, py::arg("n"), py::arg("k"), py::arg("seed"));

  // engine
  py::enum_<GameMode>(m, "GameMode")
      .value("Renewal", GameMode::Renewal)
      .value("IidStationary", GameMode::IidStationary)
      .value("Fixed", GameMode::Fixed);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("omega", &SimConfig::omega)
      .def_readwrite("game_mode", &SimConfig::game_mode)
      .def_readwrite("fixed_game", &SimConfig::fixed_game)
      .def_readwrite("dt_per_event", &SimConfig::dt_per_event)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("max_events", &SimConfig::max_events);

  py::class_<FixationResult>(m, "FixationResult")
      .def_readonly("runs", &FixationResult::runs)
      .def_readonly("fixations", &FixationResult::fixations)
      .def_readonly("non_absorbed", &FixationResult::non_absorbed)
      .def_readonly("estimate", &FixationResult::estimate)
      .def_readonly("stderr", &FixationResult::stderr_);

  m.def("estimate_fixation", &estimate_fixation, py::arg("graph"), py::arg("env"), py::arg("config"),
        py::arg("invader"), py::arg("runs"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("times", &TrajectoryRecord::times)
      .def_readonly("coop_fraction", &TrajectoryRecord::coop_fraction);

  m.def(
      "simulate_trajectory",
      [](const RegularGraph& g, const GameEnvironment& env, const SimConfig& c, double init, std::uint64_t horizon,
         std::uint64_t every, std::uint64_t seed) {
        RandomStream rng(seed);
        return simulate_trajectory(g, env, c, init, horizon, every, rng);
      },
      py::arg("graph"), py::arg("env"), py::arg("config"), py::arg("initial_coop_fraction"),
      py::arg("horizon_events"), py::arg("sample_every"), py::arg("seed"));

  // theory
  py::class_<PairApproxParams>(m, "PairApproxParams")
      .def(py::init([](int k, std::size_t n, double omega) { return PairApproxParams{k, n, omega}; }), py::arg("k"),
           py::arg("n_pop"), py::arg("omega"))
      .def_readwrite("k", &PairApproxParams::k)
      .def_readwrite("n_pop", &PairApproxParams::n_pop)
      .def_readwrite("omega", &PairApproxParams::omega);

  py::class_<ConditionResult>(m, "ConditionResult")
      .def_readonly("holds", &ConditionResult::holds)
      .def_readonly("margin", &ConditionResult::margin);
  py::enum_<Condition>(m, "Condition")
      .value("FavorsCooperation", Condition::FavorsCooperation)
      .value("CooperationOverDefection", Condition::CooperationOverDefection);

  using Games = const std::vector<DilemmaGame>&;
  m.def("selection_gradient", [](double p, const PairApproxParams& pr, const GameDistribution& d, Games g) {
    return selection_gradient(p, pr, d, g);
  });
  m.def("phi_a", [](double x, const PairApproxParams& pr, const GameDistribution& d, Games g) { return phi_a(x, pr, d, g); });
  m.def("rho_a", [](const PairApproxParams& pr, const GameDistribution& d, Games g) { return rho_a(pr, d, g); });
  m.def("rho_b", [](const PairApproxParams& pr, const GameDistribution& d, Games g) { return rho_b(pr, d, g); });
  m.def("rho_ratio", [](const PairApproxParams& pr, const GameDistribution& d, Games g) { return rho_ratio(pr, d, g); });
  m.def("favors_cooperation", [](int k, const GameDistribution& d, Games g) { return favors_cooperation(k, d, g); });
  m.def("cooperation_over_defection",
        [](int k, const GameDistribution& d, Games g) { return cooperation_over_defection(k, d, g); });
  m.def(
      "solve_threshold",
      [](Condition c, const std::string& kind, std::size_t game, int k, const GameDistribution& d, Games g) {
        FreeParameter free;
        if (kind == "dg")
          free.kind = FreeParameter::Kind::Dg;
        else if (kind == "dr")
          free.kind = FreeParameter::Kind::Dr;
        else
          throw py::value_error("kind must be 'dg' or 'dr'");
        free.game = game;
        return solve_threshold(c, free, k, d, g);
      },
      py::arg("condition"), py::arg("kind"), py::arg("game"), py::arg("k"), py::arg("dist"), py::arg("games"));
  m.def(
      "integrate_trajectory",
      [](double p0, const PairApproxParams& pr, const GameDistribution& d, Games g, double t_end, double step,
         double sample) { return integrate_trajectory(p0, pr, d, g, t_end, step, sample); },
      py::arg("p0"), py::arg("params"), py::arg("dist"), py::arg("games"), py::arg("t_end"), py::arg("step") = 1.0,
      py::arg("sample_interval") = 1.0);

  // optimizer
  py::enum_<ObjectiveKind>(m, "ObjectiveKind")
      .value("MaxGradient", ObjectiveKind::MaxGradient)
      .value("MinFitnessDiff", ObjectiveKind::MinFitnessDiff);

  py::class_<PolicySegment>(m, "PolicySegment")
      .def_readonly("lower", &PolicySegment::lower)
      .def_readonly("upper", &PolicySegment::upper)
      .def_readonly("dist", &PolicySegment::dist);
  py::class_<PiecewisePolicy>(m, "PiecewisePolicy")
      .def_readonly("objective", &PiecewisePolicy::objective)
      .def_readonly("segments", &PiecewisePolicy::segments)
      .def_readonly("breakpoints", &PiecewisePolicy::breakpoints)
      .def_readonly("case_label", &PiecewisePolicy::case_label)
      .def_readonly("degenerate", &PiecewisePolicy::degenerate)
      .def("at", &PiecewisePolicy::at, py::arg("p_a"));

  m.def("h1", [](const GameDistribution& d, Games g, double p, int k) { return h1(d, g, p, k); });
  m.def("h2", [](const GameDistribution& d, Games g, double p) { return h2(d, g, p); });
  m.def("g1", [](double p, Games g, int k) { return g1(p, g, k); });
  m.def("g2", [](double p, Games g) { return g2(p, g); });
  m.def("optimal_policy_two_games",
        [](ObjectiveKind o, Games g, int k) { return optimal_policy_two_games(o, g, k); }, py::arg("objective"),
        py::arg("games"), py::arg("k"));

  py::class_<GridReport>(m, "GridReport")
      .def_readonly("points", &GridReport::points)
      .def_readonly("violations", &GridReport::violations)
      .def_readonly("worst_gap", &GridReport::worst_gap)
      .def_readonly("switch_point", &GridReport::switch_point)
      .def_readonly("degenerate", &GridReport::degenerate);
  m.def("grid_verify", [](ObjectiveKind o, Games g, int k, int res) { return grid_verify(o, g, k, res); },
        py::arg("objective"), py::arg("games"), py::arg("k"), py::arg("resolution") = 1000);

  // oracle
  py::class_<PayoffMatrix>(m, "PayoffMatrix")
      .def_static("of", &PayoffMatrix::of, py::arg("game"))
      .def_readonly("aa", &PayoffMatrix::aa)
      .def_readonly("ab", &PayoffMatrix::ab)
      .def_readonly("ba", &PayoffMatrix::ba)
      .def_readonly("bb", &PayoffMatrix::bb);
  m.def("expected_payoff_matrix",
        [](const GameDistribution& d, Games g) { return expected_payoff_matrix(d, g); });

  py::class_<ExactResult>(m, "ExactResult")
      .def_readonly("fixation_prob", &ExactResult::fixation_prob)
      .def_readonly("solver_residual", &ExactResult::solver_residual)
      .def_readonly("per_configuration", &ExactResult::per_configuration);
  m.def("exact_fixation", &exact_fixation, py::arg("graph"), py::arg("payoffs"), py::arg("omega"),
        py::arg("keep_per_configuration") = false);
  m.def("lumped_fixation_complete", &lumped_fixation_complete, py::arg("n"), py::arg("payoffs"), py::arg("omega"));
}
