#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinfactor/experiments/config.hpp"

namespace spinfactor::experiments {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailure = 1;
inline constexpr int kExitConfigError = 2;

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
  /// Same content as the command's JSON report.
  nlohmann::json summary;
};

/// Dispatches on config.command and writes all outputs under `out_dir`.
CommandResult run_command(const ExperimentConfig& config, const std::filesystem::path& out_dir);

CommandResult cmd_synth(const ExperimentConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_mu_hist(const ExperimentConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_cq_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_phase_diagram(const ExperimentConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_line_scan(const ExperimentConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_factorize(const ExperimentConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_trace(const ExperimentConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_calibrate(const ExperimentConfig& config, const std::filesystem::path& out_dir);
CommandResult cmd_oracle(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace spinfactor::experiments
