#include "varigame/experiment/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace varigame::experiment {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so unknown keys
// can be reported.
class Reader {
public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path_of(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(path_of(key), "missing required number");
    }
    const auto& v = raw(key);
    if (!v.is_number()) throw ConfigError(path_of(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path_of(key), "expected a finite number");
    return d;
  }

  std::uint64_t count(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(path_of(key), "missing required integer");
    }
    const auto& v = raw(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(path_of(key), "expected a nonnegative integer");
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(path_of(key), "missing required string");
    }
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(path_of(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!used_.count(key)) throw ConfigError(path_of(key), "unknown key");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

TopologySpec parse_topology(const json& j) {
  Reader r(j, "topology");
  TopologySpec t;
  t.kind = r.text("kind", t.kind);
  if (t.kind == "von_neumann" || t.kind == "moore") {
    if (r.has("side")) {
      t.width = t.height = r.count("side");
    } else {
      t.width = r.count("width", t.width);
      t.height = r.count("height", t.height);
    }
  } else if (t.kind == "complete") {
    t.n = r.count("n");
  } else if (t.kind == "random_regular") {
    t.n = r.count("n");
    t.k = r.count("k");
    t.graph_seed = r.count("graph_seed", t.graph_seed);
  } else {
    throw ConfigError("topology.kind", "unknown topology '" + t.kind + "'");
  }
  r.finish();
  return t;
}

DurationDistribution parse_duration(const json& j, const std::string& path) {
  Reader r(j, path);
  const auto kind = r.text("kind");
  try {
    if (kind == "exponential") {
      Exponential e{r.number("rate")};
      r.finish();
      return e;
    }
    if (kind == "uniform") {
      Uniform u{r.number("lower"), r.number("upper")};
      r.finish();
      return u;
    }
    if (kind == "deterministic") {
      Deterministic d{r.number("duration")};
      r.finish();
      return d;
    }
    if (kind == "table") {
      const auto& values = r.raw("values");
      if (!values.is_array()) throw ConfigError(path + ".values", "expected an array of [duration, probability]");
      EmpiricalTable t;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& pair = values[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
          throw ConfigError(path + ".values." + std::to_string(i), "expected [duration, probability]");
        t.values.emplace_back(pair[0].get<double>(), pair[1].get<double>());
      }
      r.finish();
      return t;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + ".kind", "unknown duration distribution '" + kind + "'");
}

GameMode parse_mode(const std::string& s) {
  if (s == "renewal") return GameMode::Renewal;
  if (s == "iid_stationary") return GameMode::IidStationary;
  if (s == "fixed") return GameMode::Fixed;
  throw ConfigError("sim.game_mode", "expected renewal, iid_stationary or fixed, got '" + s + "'");
}

} // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) v.push_back(steps == 0 ? from : from + (to - from) * i / steps);
  return v;
}

ExperimentConfig parse_config(const json& doc) {
  Reader root(doc, "");
  ExperimentConfig c;
  c.source = doc;

  if (root.has("topology")) {
    const auto& t = root.raw("topology");
    c.topology = t.is_string() ? parse_topology(json{{"kind", t}}) : parse_topology(t);
  }

  if (!root.has("games")) throw ConfigError("games", "missing required list of games");
  const auto& games = root.raw("games");
  if (!games.is_array() || games.empty()) throw ConfigError("games", "expected a non-empty array");
  for (std::size_t i = 0; i < games.size(); ++i) {
    const auto path = "games." + std::to_string(i);
    Reader g(games[i], path);
    const double dg = g.number("dg");
    const double dr = g.number("dr");
    g.finish();
    try {
      c.games.emplace_back(dg, dr);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path, e.what());
    }
  }
  const std::size_t n_games = c.games.size();

  if (root.has("process")) {
    Reader p(root.raw("process"), "process");
    if (p.has("durations") == p.has("pi")) throw ConfigError("process", "give exactly one of durations or pi");
    if (p.has("durations")) {
      const auto& d = p.raw("durations");
      if (!d.is_array()) throw ConfigError("process.durations", "expected an array");
      if (d.size() != n_games)
        throw ConfigError("process.durations", "expected " + std::to_string(n_games) + " entries, one per game");
      std::vector<DurationDistribution> ds;
      for (std::size_t i = 0; i < d.size(); ++i)
        ds.push_back(parse_duration(d[i], "process.durations." + std::to_string(i)));
      c.durations = std::move(ds);
    } else {
      const auto& pi = p.raw("pi");
      if (!pi.is_array() || pi.size() != n_games)
        throw ConfigError("process.pi", "expected an array of " + std::to_string(n_games) + " probabilities");
      std::vector<double> v;
      for (std::size_t i = 0; i < pi.size(); ++i) {
        if (!pi[i].is_number()) throw ConfigError("process.pi." + std::to_string(i), "expected a number");
        v.push_back(pi[i].get<double>());
      }
      try {
        GameDistribution check(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("process.pi", e.what());
      }
      c.pi = std::move(v);
    }
    p.finish();
  } else if (n_games == 1) {
    c.pi = std::vector<double>{1.0};
  } else {
    throw ConfigError("process", "missing; needed to weight more than one game");
  }

  c.sim.game_mode = c.durations ? GameMode::Renewal : GameMode::IidStationary;
  if (root.has("sim")) {
    Reader s(root.raw("sim"), "sim");
    c.sim.omega = s.number("omega", c.sim.omega);
    if (s.has("game_mode")) c.sim.game_mode = parse_mode(s.text("game_mode"));
    c.sim.fixed_game = s.count("fixed_game", c.sim.fixed_game);
    c.sim.dt_per_event = s.number("dt_per_event", c.sim.dt_per_event);
    c.sim.seed = s.count("seed", c.sim.seed);
    c.sim.max_events = s.count("max_events", c.sim.max_events);
    c.runs = s.count("runs", c.runs);
    c.initial_coop_fraction = s.number("initial_coop_fraction", c.initial_coop_fraction);
    c.horizon_events = s.count("horizon_events", c.horizon_events);
    s.finish();
  }
  if (c.sim.fixed_game >= n_games) throw ConfigError("sim.fixed_game", "index out of range");
  if (c.sim.game_mode == GameMode::Renewal && !c.durations)
    throw ConfigError("sim.game_mode", "renewal mode needs process.durations");
  if (!(c.initial_coop_fraction >= 0.0 && c.initial_coop_fraction <= 1.0))
    throw ConfigError("sim.initial_coop_fraction", "must lie in [0, 1]");
  try {
    c.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("sim", e.what());
  }
  if (c.runs == 0) throw ConfigError("sim.runs", "must be positive");

  if (root.has("sweep")) {
    const auto& sw = root.raw("sweep");
    if (!sw.is_array()) throw ConfigError("sweep", "expected an array of axes");
    for (std::size_t i = 0; i < sw.size(); ++i) {
      const auto path = "sweep." + std::to_string(i);
      Reader a(sw[i], path);
      SweepAxis axis;
      axis.parameter = a.text("parameter");
      axis.from = a.number("from");
      axis.to = a.number("to");
      const auto steps = a.count("steps", 10);
      if (steps > 100000) throw ConfigError(path + ".steps", "too many steps");
      axis.steps = static_cast<int>(steps);
      a.finish();
      // Resolve now so a bad path is reported against the sweep entry.
      try {
        (void)with_parameter(c, axis.parameter, axis.from);
      } catch (const ConfigError& e) {
        throw ConfigError(path + ".parameter", e.what());
      }
      c.sweep.push_back(axis);
    }
  }

  if (root.has("output")) {
    Reader o(root.raw("output"), "output");
    c.output.csv = o.text("csv", "");
    c.output.sample_every = o.count("sample_every", c.output.sample_every);
    if (c.output.sample_every == 0) throw ConfigError("output.sample_every", "must be positive");
    o.finish();
  }
  root.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json default_config_json() {
  return json{
      {"topology", {{"kind", "von_neumann"}, {"side", 10}}},
      {"games", json::array({{{"dg", 0.3}, {"dr", 0.5}}, {{"dg", 0.0}, {"dr", 0.3}}})},
      {"process", {{"pi", {0.5, 0.5}}}},
      {"sim", {{"omega", 0.01}, {"seed", 1}, {"runs", 1000}}},
  };
}

std::string resolve_parameter(const std::string& parameter) {
  if (parameter == "omega") return "sim.omega";
  auto indexed = [&](const char* prefix) -> std::optional<std::size_t> {
    const std::string p(prefix);
    if (parameter.size() <= p.size() || parameter.compare(0, p.size(), p) != 0) return std::nullopt;
    const auto digits = parameter.substr(p.size());
    if (digits.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    const auto i = std::stoul(digits);
    if (i == 0) throw ConfigError(parameter, "game numbers count from 1");
    return i - 1;
  };
  if (auto i = indexed("dg")) return "games." + std::to_string(*i) + ".dg";
  if (auto i = indexed("dr")) return "games." + std::to_string(*i) + ".dr";
  if (auto i = indexed("pi")) return "process.pi." + std::to_string(*i);
  return parameter;
}

ExperimentConfig with_parameter(const ExperimentConfig& config, const std::string& parameter, double value) {
  const auto path = resolve_parameter(parameter);
  json doc = config.source;
  json* node = &doc;
  std::string walked;
  std::istringstream parts(path);
  std::string part;
  while (std::getline(parts, part, '.')) {
    walked += walked.empty() ? part : "." + part;
    if (node->is_array()) {
      if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(walked, "expected an array index");
      const auto i = std::stoul(part);
      if (i >= node->size()) throw ConfigError(walked, "index out of range");
      node = &(*node)[i];
    } else if (node->is_object()) {
      if (!node->contains(part)) throw ConfigError(walked, "no such key");
      node = &(*node)[part];
    } else {
      throw ConfigError(walked, "not a container");
    }
  }
  if (!node->is_number()) throw ConfigError(path, "sweep target is not a numeric leaf");
  *node = value;

  // A direct two-game pi keeps summing to one.
  if (path.rfind("process.pi.", 0) == 0) {
    auto& pi = doc["process"]["pi"];
    if (pi.size() == 2) {
      const auto i = std::stoul(path.substr(std::string("process.pi.").size()));
      pi[1 - i] = 1.0 - value;
    }
  }
  // The sweep block is carried over unparsed; its axes were checked already.
  json sweep;
  if (doc.contains("sweep")) {
    sweep = doc["sweep"];
    doc.erase("sweep");
  }
  auto out = parse_config(doc);
  out.sweep = config.sweep;
  if (!sweep.is_null()) out.source["sweep"] = sweep;
  return out;
}

RegularGraph build_graph(const TopologySpec& t) {
  try {
    if (t.kind == "von_neumann") return lattice_von_neumann(t.width, t.height);
    if (t.kind == "moore") return lattice_moore(t.width, t.height);
    if (t.kind == "complete") return complete_graph(t.n);
    if (t.kind == "random_regular") return random_regular(t.n, t.k, t.graph_seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("topology", e.what());
  }
  throw ConfigError("topology.kind", "unknown topology '" + t.kind + "'");
}

GameEnvironment build_environment(const ExperimentConfig& c) {
  if (c.durations) return GameEnvironment::from_process(GameProcess(c.games, *c.durations));
  return GameEnvironment::from_distribution(c.games, GameDistribution(*c.pi));
}

} // namespace varigame::experiment
