#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinfactor/experiments/commands.hpp"
#include "spinfactor/experiments/config.hpp"
#include "spinfactor/ising.hpp"
#include "spinfactor/spin_logic.hpp"

namespace ex = spinfactor::experiments;

int main(int argc, char** argv) {
  CLI::App app{"Spin-logic integer factorization experiments"};
  std::string command, config_path, out_dir;
  unsigned workers = 0;
  std::uint64_t seed = 0;
  bool print_defaults = false;

  std::string names;
  for (const auto& n : ex::command_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("command", command, "one of: " + names);
  auto* cfg_opt = app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--out", out_dir, "output directory (default: results/<command>)");
  auto* workers_opt = app.add_option("--workers", workers, "worker threads (0 = all cores)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed override");
  app.add_flag("--print-defaults", print_defaults, "print built-in defaults as JSON and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ex::kExitOk : ex::kExitConfigError;
  }

  try {
    if (print_defaults) {
      if (command.empty()) {
        nlohmann::json all;
        for (const auto& n : ex::command_names()) all[n] = ex::default_config(n).to_json();
        std::cout << all.dump(2) << '\n';
      } else {
        std::cout << ex::default_config(command).to_json().dump(2) << '\n';
      }
      return ex::kExitOk;
    }
    if (command.empty()) throw ex::ConfigError("missing command (one of: " + names + ")");
    if (cfg_opt->count() == 0) throw ex::ConfigError("--config is required");

    auto config = ex::load_config(config_path, command);
    if (workers_opt->count()) config.workers = workers;
    if (seed_opt->count()) config.master_seed = seed;
    config.validate();

    const std::filesystem::path out = out_dir.empty() ? std::filesystem::path("results") / command
                                                      : std::filesystem::path(out_dir);
    std::filesystem::create_directories(out);
    const auto result = ex::run_command(config, out);
    for (const auto& f : result.files) std::cerr << "wrote " << f.string() << '\n';
    std::cout << result.summary.dump(2) << '\n';
    return result.exit_code;
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ex::kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ex::kExitConfigError;
  } catch (const spinfactor::ContractViolation& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ex::kExitConfigError;
  } catch (const spinfactor::InfeasibleRelation& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return ex::kExitVerificationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ex::kExitVerificationFailure;
  }
}
