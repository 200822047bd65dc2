#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinfactor/anneal.hpp"
#include "spinfactor/ising.hpp"

namespace spinfactor::experiments {

/// Malformed or out-of-range experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Either an explicit list or a {"start", "stop", "num"} linspace.
struct Grid {
  std::vector<double> values;

  static Grid linspace(double start, double stop, std::size_t num);
  static Grid from_json(const nlohmann::json& j, const std::string& name);
  nlohmann::json to_json() const { return values; }
};

struct ModelParams {
  double r = 0.25;
  double alpha = 1.0;
  /// Unset means 7/6 of the largest alpha in use.
  std::optional<double> beta;
  std::vector<std::size_t> beta_spins;
  double gap_target = 1.0;
  double coeff_bound = 8.0;
  /// Q1 bias of the standalone connection triple.
  double bias_q1 = 0.5;
};

/// Static per-spin bias offsets drawn uniformly from [-delta, +delta].
struct DisorderModel {
  double delta = 0.0;
  std::uint64_t seed = 1;

  BiasOffsets offsets(std::size_t n) const;
};

struct CalibrationParams {
  std::size_t rounds = 5;
  std::size_t points = 9;  // odd
  double range = 0.4;
  double shrink = 0.5;
  /// Passes over the directions per refinement level; stops early on a pass without gain.
  std::size_t passes = 3;
  /// Search directions: "principal" (eigenvectors of the centered valid-state
  /// spin matrix) or "axis" (one qubit at a time).
  std::string basis = "principal";
  /// Adds, per pass, the direction fitted to the current log counts.
  bool log_ratio_direction = true;
  std::uint64_t search_seed = 11;
  std::uint64_t validation_seed = 12;
  /// Adds each spin's exact negated disorder offset to its candidate set.
  bool include_injected_negatives = false;
  /// Disorder seeds to run; empty means just disorder.seed.
  std::vector<std::uint64_t> disorder_seeds;
};

struct ExperimentConfig {
  std::string command;
  std::uint64_t master_seed = 2024;
  std::size_t runs = 1000;
  unsigned workers = 1;
  ModelParams model;
  Schedule schedule;
  DisorderModel disorder;
  CalibrationParams calibration;

  // sweep grids
  std::vector<unsigned> products{4, 6, 9};
  Grid alpha;
  Grid r;
  Grid b1;
  Grid b2;
  Grid swept;
  std::string fixed_axis = "b1";
  double fixed_bias = -0.5;

  // oracle
  std::string oracle_target = "mu";
  std::optional<unsigned> oracle_product;
  std::optional<std::pair<unsigned, unsigned>> oracle_inputs;

  std::size_t trace_stride = 100;
  bool plots = true;

  nlohmann::json to_json() const;
  void validate() const;
  /// beta if set, else 7/6 of max(alpha grid, model.alpha).
  double effective_beta() const;
};

const std::vector<std::string>& command_names();

/// Built-in defaults for `command`.
ExperimentConfig default_config(const std::string& command);

/// Overlays `j` onto the defaults of its "command" (or `command` when
/// given). Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& command = "");
ExperimentConfig load_config(const std::string& path, const std::string& command = "");

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace spinfactor::experiments
