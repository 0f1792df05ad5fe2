#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include <stdexcept>

#include <doctest.h>

#include "varigame/experiment/commands.hpp"
#include "varigame/experiment/config.hpp"
#include "varigame/experiment/csv.hpp"

using namespace varigame;
using namespace varigame::experiment;
using nlohmann::json;

namespace {

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
  return out;
}

json small_config() {
  return json::parse(R"({
    "topology": {"kind": "von_neumann", "side": 4},
    "games": [{"dg": 0.3, "dr": 0.5}, {"dg": 0.0, "dr": 0.3}],
    "process": {"pi": [0.5, 0.5]},
    "sim": {"omega": 0.05, "seed": 3, "runs": 400}
  })");
}

} // namespace

TEST_CASE("default config parses") {
  const auto c = parse_config(default_config_json());
  CHECK(c.games.size() == 2);
  CHECK(c.sim.game_mode == GameMode::IidStationary);
  CHECK(build_graph(c.topology).n_nodes() == 100);
}

TEST_CASE("topologies") {
  auto doc = small_config();
  doc["topology"] = "moore";
  CHECK(build_graph(parse_config(doc).topology).degree() == 8);
  doc["topology"] = json{{"kind", "von_neumann"}, {"width", 20}, {"height", 25}};
  CHECK(build_graph(parse_config(doc).topology).n_nodes() == 500);
  doc["topology"] = json{{"kind", "complete"}, {"n", 4}};
  CHECK(build_graph(parse_config(doc).topology).degree() == 3);
  doc["topology"] = json{{"kind", "random_regular"}, {"n", 10}, {"k", 3}, {"graph_seed", 4}};
  CHECK(build_graph(parse_config(doc).topology).degree() == 3);
}

TEST_CASE("schema violations name the offending key") {
  auto doc = small_config();
  doc["topology"]["sides"] = 4;
  CHECK(error_of(doc).rfind("topology.sides:", 0) == 0);

  doc = small_config();
  doc["games"][1]["dr"] = "x";
  CHECK(error_of(doc).rfind("games.1.dr:", 0) == 0);

  doc = small_config();
  doc["games"][0]["dg"] = 1.5;
  CHECK(error_of(doc).rfind("games.0:", 0) == 0);

  doc = small_config();
  doc["process"]["pi"] = {0.5, 0.6};
  CHECK(error_of(doc).rfind("process.pi:", 0) == 0);

  doc = small_config();
  doc["process"]["durations"] = json::array({{{"kind", "exponential"}, {"rate", 0.1}}, {{"kind", "uniform"}}});
  CHECK(error_of(doc).rfind("process:", 0) == 0);
  doc["process"].erase("pi");
  CHECK(error_of(doc).rfind("process.durations.1.lower:", 0) == 0);

  doc = small_config();
  doc["sim"]["game_mode"] = "renewal";
  CHECK(error_of(doc).rfind("sim.game_mode:", 0) == 0);

  doc = small_config();
  doc["sim"]["runs"] = -3;
  CHECK(error_of(doc).rfind("sim.runs:", 0) == 0);

  doc = small_config();
  doc["sweep"] = json::array({{{"parameter", "dg7"}, {"from", 0}, {"to", 1}, {"steps", 4}}});
  CHECK(error_of(doc).rfind("sweep.0.parameter:", 0) == 0);

  doc = small_config();
  doc["extra"] = 1;
  CHECK(error_of(doc).rfind("extra:", 0) == 0);
}

TEST_CASE("durations select renewal mode") {
  auto doc = small_config();
  doc["process"] = json::parse(R"({"durations": [{"kind": "exponential", "rate": 0.05},
                                                 {"kind": "table", "values": [[10, 0.5], [30, 0.5]]}]})");
  const auto c = parse_config(doc);
  CHECK(c.sim.game_mode == GameMode::Renewal);
  const auto env = build_environment(c);
  CHECK(env.pi[0] == doctest::Approx(0.5));
  REQUIRE(env.process);
}

TEST_CASE("sweep parameters") {
  CHECK(resolve_parameter("dg1") == "games.0.dg");
  CHECK(resolve_parameter("dr2") == "games.1.dr");
  CHECK(resolve_parameter("pi1") == "process.pi.0");
  CHECK(resolve_parameter("omega") == "sim.omega");
  CHECK(resolve_parameter("sim.seed") == "sim.seed");

  const auto c = parse_config(small_config());
  const auto d = with_parameter(c, "dg1", 0.7);
  CHECK(d.games[0].dg() == 0.7);
  const auto p = with_parameter(c, "pi1", 0.2);
  REQUIRE(p.pi);
  CHECK((*p.pi)[1] == doctest::Approx(0.8));
  CHECK_THROWS_AS(with_parameter(c, "dg1", 3.0), ConfigError);

  SweepAxis axis{"dg1", 0.0, 1.0, 4};
  CHECK(axis.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("CSV formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  std::ostringstream out;
  CsvWriter w(out, {"a", "b", "c"});
  w.row({std::string("x,y"), std::optional<double>{}, std::int64_t{-2}});
  CHECK(out.str() == "a,b,c\n\"x,y\",,-2\n");
  CHECK_THROWS(w.row({1.0}));
}

TEST_CASE("theory sweep reports the constant first-condition threshold") {
  auto doc = small_config();
  doc["games"] = json::array({{{"dg", 0.0}, {"dr", 0.0}}, {{"dg", 0.2}, {"dr", 0.2}}});
  doc["process"]["pi"] = {1.0, 0.0};
  std::ostringstream out;
  TheoryOptions t;
  t.sweep_parameter = "dg1";
  t.from = 0.0;
  t.to = 1.0;
  t.steps = 50;
  RunOptions o;
  o.deterministic = true;
  run_theory(parse_config(doc), o, t, out);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 52);
  const auto header = split(lines[0]);
  const auto col = std::find(header.begin(), header.end(), "thm1_threshold") - header.begin();
  for (std::size_t i = 1; i < lines.size(); ++i)
    CHECK(std::stod(split(lines[i])[col]) == doctest::Approx(12.0 / 13).epsilon(1e-12));
}

TEST_CASE("neutral fixation command") {
  auto doc = small_config();
  doc["sim"]["omega"] = 0.0;
  std::ostringstream out;
  RunOptions o;
  o.deterministic = true;
  o.runs = 20000;
  run_fixation(parse_config(doc), o, out);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 3);
  for (int i = 1; i <= 2; ++i) {
    const auto cells = split(lines[i]);
    const double est = std::stod(cells[6]), se = std::stod(cells[7]);
    CHECK(std::abs(est - 1.0 / 16) < 3 * se);
  }
}

TEST_CASE("output is byte-identical across thread counts") {
  auto doc = small_config();
  doc["sweep"] = json::array({{{"parameter", "dg1"}, {"from", 0}, {"to", 0.6}, {"steps", 2}}});
  const auto c = parse_config(doc);
  auto render = [&](unsigned threads, auto&& fn) {
    std::ostringstream out;
    RunOptions o;
    o.deterministic = true;
    o.threads = threads;
    fn(c, o, out);
    return out.str();
  };
  auto sweep = [](const ExperimentConfig& cfg, const RunOptions& o, std::ostream& out) { run_sweep(cfg, o, out); };
  auto fix = [](const ExperimentConfig& cfg, const RunOptions& o, std::ostream& out) { run_fixation(cfg, o, out); };
  auto traj = [](const ExperimentConfig& cfg, const RunOptions& o, std::ostream& out) {
    RunOptions r = o;
    r.runs = 5;
    run_trajectory(cfg, r, TrajectoryOptions{}, out);
  };
  CHECK(render(1, sweep) == render(8, sweep));
  CHECK(render(1, fix) == render(8, fix));
  CHECK(render(1, traj) == render(8, traj));
  CHECK(render(3, sweep) == render(3, sweep));
}

TEST_CASE("timestamp comment is suppressed when deterministic") {
  std::ostringstream a, b;
  RunOptions o;
  run_oracle(parse_config(json::parse(R"({"topology": {"kind": "complete", "n": 4},
      "games": [{"dg": 0.5, "dr": 0.5}], "sim": {"omega": 0.1}})")),
             o, false, a);
  CHECK(a.str().rfind("# varigame", 0) == 0);
  o.deterministic = true;
  run_oracle(parse_config(json::parse(R"({"topology": {"kind": "complete", "n": 4},
      "games": [{"dg": 0.5, "dr": 0.5}], "sim": {"omega": 0.1}})")),
             o, false, b);
  const auto lines = lines_of(b.str());
  REQUIRE(lines.size() == 2);
  const auto cells = split(lines[1]);
  // Exact and lumped columns agree on K4.
  CHECK(std::stod(cells[3]) == doctest::Approx(std::stod(cells[5])).epsilon(1e-10));
}

TEST_CASE("optimize command") {
  auto doc = small_config();
  doc["games"] = json::array({{{"dg", -0.3}, {"dr", 0.2}}, {{"dg", 0.0}, {"dr", 0.0}}});
  std::ostringstream out, log;
  OptimizeOptions opt;
  opt.verify = true;
  RunOptions o;
  o.deterministic = true;
  CHECK(run_optimize(parse_config(doc), o, opt, out, log) == 0);
  CHECK(lines_of(out.str()).size() == 3);
  CHECK(log.str().find("0 violations") != std::string::npos);
  CHECK(parse_objective("min_fitness_diff") == ObjectiveKind::MinFitnessDiff);
  CHECK_THROWS(parse_objective("fastest"));
}

TEST_CASE("reproduce rejects unknown figures") {
  std::ostringstream out;
  RunOptions o;
  o.deterministic = true;
  CHECK_THROWS_AS(run_reproduce("fig9", o, ReproduceOptions{}, out), std::invalid_argument);
}
