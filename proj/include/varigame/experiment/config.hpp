#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "varigame/engine.hpp"
#include "varigame/games.hpp"
#include "varigame/network.hpp"

namespace varigame::experiment {

/// Schema violation; the message starts with the offending key path.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& path, const std::string& what) : std::runtime_error(path + ": " + what) {}
};

struct TopologySpec {
  std::string kind = "von_neumann"; ///< von_neumann | moore | complete | random_regular
  std::size_t width = 10;
  std::size_t height = 10;
  std::size_t n = 0; ///< complete and random_regular
  std::size_t k = 0; ///< random_regular
  std::uint64_t graph_seed = 1;
};

struct SweepAxis {
  std::string parameter;
  double from = 0.0;
  double to = 1.0;
  int steps = 10; ///< number of intervals; steps + 1 points

  std::vector<double> values() const;
};

struct OutputSpec {
  std::string csv;
  std::uint64_t sample_every = 100;
};

struct ExperimentConfig {
  TopologySpec topology;
  std::vector<DilemmaGame> games;
  std::optional<std::vector<DurationDistribution>> durations;
  std::optional<std::vector<double>> pi;
  SimConfig sim;
  std::uint64_t runs = 1000;
  double initial_coop_fraction = 0.5;
  std::uint64_t horizon_events = 100000;
  std::vector<SweepAxis> sweep;
  OutputSpec output;

  /// The document this config was parsed from; sweeps rewrite it.
  nlohmann::json source;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Small von Neumann lattice, two games, uniform pi.
nlohmann::json default_config_json();

/// Dotted path into the document ("games.0.dg", "sim.omega") or one of the
/// aliases dgN / drN (game N, counted from 1), piN (direct pi; with exactly
/// two games the other entry becomes the complement) and omega.
std::string resolve_parameter(const std::string& parameter);

/// Copy of the config with one numeric leaf replaced, re-validated.
ExperimentConfig with_parameter(const ExperimentConfig& config, const std::string& parameter, double value);

RegularGraph build_graph(const TopologySpec& topology);
GameEnvironment build_environment(const ExperimentConfig& config);

} // namespace varigame::experiment
