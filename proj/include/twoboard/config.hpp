#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twoboard/domain.hpp"
#include "twoboard/dpp_solver.hpp"
#include "twoboard/game_engine.hpp"
#include "twoboard/n_system.hpp"

namespace twoboard {

inline constexpr int kSchemaVersion = 1;

/// Raised for malformed or inconsistent configuration; the message names
/// the offending field as a JSON path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Built-in strategy by name; target is used by pull_to only.
struct StrategySpec {
  std::string name = "stationary_random";
  std::vector<double> target;

  friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

struct GridConfig {
  double epsilon = 0.1;
  double h_ratio = 0.125;
  std::optional<double> h;  // overrides h_ratio * epsilon for single solves
  std::vector<double> epsilon_list{0.2, 0.1, 0.05};

  double spacing() const { return h ? *h : h_ratio * epsilon; }
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct SimulationConfig {
  std::vector<double> x0;
  int board = 1;
  StrategySpec s1{"greedy_max", {}};
  StrategySpec s2{"greedy_min", {}};
  std::size_t episodes = 1000;
  std::uint64_t seed = 1;
  GameMode mode = GameMode::Full;
  std::size_t cap = 0;
  std::size_t trace_episodes = 0;

  friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

struct VerifyConfig {
  std::vector<std::string> suites{"kappa", "consistency", "reference", "convergence"};
  std::size_t mc_samples = 4'000'000;
  double kappa_tolerance = 1e-3;
  double ratio_bound = 0.75;
  double reference_tolerance = 1e-10;
  std::vector<double> probe;  // consistency probe; defaults to (0.5, 0, ...)
  std::size_t reference_mesh = 4000;

  friend bool operator==(const VerifyConfig&, const VerifyConfig&) = default;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  Domain domain = Domain::interval(0.0, 1.0);
  PayoffData payoff;
  GridConfig grid;
  DppParams dpp;
  std::vector<ComponentSpec> n_system;
  SolveOptions solver;
  SimulationConfig simulation;
  VerifyConfig verify;
  std::string output_directory = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses and validates a JSON configuration. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON text; parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

/// Instantiates a built-in strategy. Greedy strategies need solved values.
Strategy make_strategy(const StrategySpec& spec, std::shared_ptr<const Lattice> lattice,
                       std::shared_ptr<const ValuePair> values);

}  // namespace twoboard
