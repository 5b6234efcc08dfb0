#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adiabatica/error.hpp"
#include "adiabatica/grid.hpp"
#include "adiabatica/metrics.hpp"
#include "adiabatica/model.hpp"
#include "adiabatica/propagator.hpp"

namespace adiabatica {

/// Malformed or invalid configuration. Carries the offending key path and the 1-based line
/// in the source file (0 when the value came from an override or a default).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key, int line)
      : Error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

enum class Experiment { A0Map, MaxLocus, FidelityMap, ATrace, EffectiveModel, Snapshot };

std::string to_string(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& tag);
const std::vector<std::string>& experiment_tags();

struct ModelBlock {
  double mass = 1.0;
  std::vector<double> detunings;  ///< a single entry unless detuning_sweep is given
  int photon_number = 1;
  FrameCase frame = FrameCase::Case1;
  ModeShape mode = ModeShape::none();

  ModelParams params(double detuning) const;
};

struct GridBlock {
  std::size_t points = 0;
  double x_min = 0.0;
  double x_max = 0.0;
};

struct StateBlock {
  double x0 = 0.0;
  double p0 = 0.0;
  double width = 1.0;
  Basis basis = Basis::Bare;
  double upper = 1.0;  ///< amplitude of the upper internal state
  double lower = 0.0;
};

struct RunBlock {
  std::optional<double> t_final;
  std::optional<double> x_stop;
  std::optional<double> dt;  ///< default_time_step when absent
  std::size_t stride = 1;
};

/// Output axis shared by sweep experiments.
struct SweepBlock {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t points = 0;
  Abscissa abscissa = Abscissa::Measured;
};

struct ScenarioConfig {
  std::optional<Experiment> experiment;
  ModelBlock model;
  std::optional<GridBlock> grid;
  std::optional<StateBlock> state;
  std::optional<RunBlock> run;
  std::optional<SweepBlock> sweep;
  /// Effective configuration after overrides, with defaults filled in.
  nlohmann::json resolved;

  /// Compact, key-sorted dump of `resolved`.
  std::string canonical() const;
};

/// Maps dotted key paths ("model.mode.width", "model.detuning_sweep.count") to their line in a
/// JSON text. Array elements are addressed as "key[i]".
std::map<std::string, int> locate_keys(const std::string& text);

/// Parses "a.b.c=value" overrides. The value is read as JSON when possible, else as a string.
/// A null value removes the key.
std::pair<std::string, nlohmann::json> parse_override(const std::string& assignment);

/// Parses and validates a configuration text. `overrides` are applied before validation.
/// `experiment` (from the command line) takes precedence over the "experiment" key.
ScenarioConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                            std::optional<Experiment> experiment = std::nullopt);

ScenarioConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides = {},
                           std::optional<Experiment> experiment = std::nullopt);

/// Propagation scenario for one detuning of a config that has grid, state and run blocks.
Scenario make_scenario(const ScenarioConfig& config, double detuning,
                       ExecutionPolicy policy = ExecutionPolicy::Serial);

}  // namespace adiabatica
