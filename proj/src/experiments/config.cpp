#include "spinfactor/experiments/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "spinfactor/circuit.hpp"

namespace spinfactor::experiments {

using nlohmann::json;

Grid Grid::linspace(double start, double stop, std::size_t num) {
  Grid g;
  if (num == 1) {
    g.values = {start};
    return g;
  }
  for (std::size_t k = 0; k < num; ++k)
  {
    const double a = static_cast<double>(num - 1 - k), b = static_cast<double>(k);
    g.values.push_back((start * a + stop * b) / static_cast<double>(num - 1));
  }
  return g;
}

Grid Grid::from_json(const json& j, const std::string& name) {
  if (j.is_array()) {
    Grid g;
    for (const auto& v : j) {
      if (!v.is_number()) throw ConfigError("grid '" + name + "' must contain numbers");
      g.values.push_back(v.get<double>());
    }
    return g;
  }
  if (j.is_object()) {
    for (const auto& key : {"start", "stop", "num"})
      if (!j.contains(key)) throw ConfigError("linspace grid '" + name + "' needs start, stop, num");
    const auto num = j.at("num").get<long long>();
    if (num < 1) throw ConfigError("linspace grid '" + name + "' needs num >= 1");
    return linspace(j.at("start").get<double>(), j.at("stop").get<double>(),
                    static_cast<std::size_t>(num));
  }
  throw ConfigError("grid '" + name + "' must be a list or a {start, stop, num} object");
}

BiasOffsets DisorderModel::offsets(std::size_t n) const {
  BiasOffsets out;
  if (delta == 0.0) return out;
  RunRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) out[i] = delta * (2.0 * rng.uniform() - 1.0);
  return out;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"synth",     "mu-hist",  "cq-sweep",
                                                 "phase-diagram", "line-scan", "factorize",
                                                 "trace",     "calibrate", "oracle"};
  return names;
}

ExperimentConfig default_config(const std::string& command) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end())
    throw ConfigError("unknown command '" + command + "'");
  ExperimentConfig c;
  c.command = command;
  c.alpha.values = {1.0};
  c.r.values = {kRecommendedChainStrength};
  c.b1 = Grid::linspace(-1.0, 1.0, 21);
  c.b2 = Grid::linspace(-1.0, 1.0, 21);
  c.swept = Grid::linspace(-1.0, 1.0, 41);

  if (command == "mu-hist") {
    c.runs = 10000;
    c.schedule.sweeps = 1000;
  } else if (command == "cq-sweep") {
    c.runs = 100;
    c.r = Grid::linspace(0.0, 0.5, 11);
  } else if (command == "phase-diagram" || command == "line-scan") {
    c.model.r = 0.25;
    c.schedule.sweeps = 500;
  } else if (command == "factorize" || command == "trace") {
    c.model.r = kRecommendedChainStrength;
    c.schedule.sweeps = 5000;
    c.schedule.t_start = 1.0;
    c.products = command == "trace" ? std::vector<unsigned>{6} : std::vector<unsigned>{4, 6, 9};
  } else if (command == "calibrate") {
    c.disorder.delta = 0.2;
    c.schedule.sweeps = 200;
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json beta_json = model.beta ? json(*model.beta) : json(nullptr);
  json product_json = oracle_product ? json(*oracle_product) : json(nullptr);
  json inputs_json = oracle_inputs ? json::array({oracle_inputs->first, oracle_inputs->second})
                                   : json(nullptr);
  return {
      {"command", command},
      {"master_seed", master_seed},
      {"runs", runs},
      {"workers", workers},
      {"model",
       {{"r", model.r},
        {"alpha", model.alpha},
        {"beta", beta_json},
        {"beta_spins", model.beta_spins},
        {"gap_target", model.gap_target},
        {"coeff_bound", model.coeff_bound},
        {"bias_q1", model.bias_q1}}},
      {"schedule",
       {{"engine", spinfactor::to_string(schedule.engine)},
        {"sweeps", schedule.sweeps},
        {"t_start", schedule.t_start},
        {"t_end", schedule.t_end},
        {"interpolation", spinfactor::to_string(schedule.interpolation)},
        {"a_start", schedule.a_start},
        {"b_end", schedule.b_end},
        {"proposal_width", schedule.proposal_width}}},
      {"disorder", {{"delta", disorder.delta}, {"seed", disorder.seed}}},
      {"calibration",
       {{"rounds", calibration.rounds},
        {"points", calibration.points},
        {"range", calibration.range},
        {"shrink", calibration.shrink},
        {"passes", calibration.passes},
        {"basis", calibration.basis},
        {"log_ratio_direction", calibration.log_ratio_direction},
        {"search_seed", calibration.search_seed},
        {"validation_seed", calibration.validation_seed},
        {"include_injected_negatives", calibration.include_injected_negatives},
        {"disorder_seeds", calibration.disorder_seeds}}},
      {"grids",
       {{"products", products},
        {"alpha", alpha.to_json()},
        {"r", r.to_json()},
        {"b1", b1.to_json()},
        {"b2", b2.to_json()},
        {"swept", swept.to_json()}}},
      {"line_scan", {{"fixed_axis", fixed_axis}, {"fixed_bias", fixed_bias}}},
      {"oracle", {{"target", oracle_target}, {"product", product_json}, {"inputs", inputs_json}}},
      {"trace_stride", trace_stride},
      {"plots", plots},
  };
}

namespace {

void check_keys(const json& user, const json& reference, const std::string& path) {
  if (!user.is_object()) return;
  for (const auto& [key, value] : user.items()) {
    if (!reference.contains(key)) throw ConfigError("unknown config key '" + path + key + "'");
    if (path == "grids.") continue;
    if (value.is_object() && reference.at(key).is_object())
      check_keys(value, reference.at(key), path + key + ".");
  }
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

// Merge patches drop keys set to null.
bool is_null(const json& j, const char* key) { return !j.contains(key) || j.at(key).is_null(); }

}  // namespace

ExperimentConfig config_from_json(const json& user, const std::string& command) {
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  std::string cmd = command;
  if (user.contains("command")) {
    const auto named = user.at("command").get<std::string>();
    if (!cmd.empty() && named != cmd)
      throw ConfigError("config is for '" + named + "' but command is '" + cmd + "'");
    cmd = named;
  }
  if (cmd.empty()) throw ConfigError("config does not name a command");
  ExperimentConfig c = default_config(cmd);
  json merged = c.to_json();
  check_keys(user, merged, "");
  merged.merge_patch(user);

  try {
    c.master_seed = get<std::uint64_t>(merged, "master_seed");
    c.runs = get<std::size_t>(merged, "runs");
    c.workers = get<unsigned>(merged, "workers");

    const auto& m = merged.at("model");
    c.model.r = get<double>(m, "r");
    c.model.alpha = get<double>(m, "alpha");
    c.model.beta = is_null(m, "beta") ? std::nullopt : std::optional(get<double>(m, "beta"));
    c.model.beta_spins = get<std::vector<std::size_t>>(m, "beta_spins");
    c.model.gap_target = get<double>(m, "gap_target");
    c.model.coeff_bound = get<double>(m, "coeff_bound");
    c.model.bias_q1 = get<double>(m, "bias_q1");

    const auto& s = merged.at("schedule");
    c.schedule.engine = engine_from_string(get<std::string>(s, "engine"));
    c.schedule.sweeps = get<std::size_t>(s, "sweeps");
    c.schedule.t_start = get<double>(s, "t_start");
    c.schedule.t_end = get<double>(s, "t_end");
    c.schedule.interpolation = interpolation_from_string(get<std::string>(s, "interpolation"));
    c.schedule.a_start = get<double>(s, "a_start");
    c.schedule.b_end = get<double>(s, "b_end");
    c.schedule.proposal_width = get<double>(s, "proposal_width");

    const auto& d = merged.at("disorder");
    c.disorder.delta = get<double>(d, "delta");
    c.disorder.seed = get<std::uint64_t>(d, "seed");

    const auto& cal = merged.at("calibration");
    c.calibration.rounds = get<std::size_t>(cal, "rounds");
    c.calibration.points = get<std::size_t>(cal, "points");
    c.calibration.range = get<double>(cal, "range");
    c.calibration.shrink = get<double>(cal, "shrink");
    c.calibration.passes = get<std::size_t>(cal, "passes");
    c.calibration.basis = get<std::string>(cal, "basis");
    c.calibration.log_ratio_direction = get<bool>(cal, "log_ratio_direction");
    c.calibration.search_seed = get<std::uint64_t>(cal, "search_seed");
    c.calibration.validation_seed = get<std::uint64_t>(cal, "validation_seed");
    c.calibration.include_injected_negatives = get<bool>(cal, "include_injected_negatives");
    c.calibration.disorder_seeds = get<std::vector<std::uint64_t>>(cal, "disorder_seeds");

    const auto& g = merged.at("grids");
    c.products = get<std::vector<unsigned>>(g, "products");
    c.alpha = Grid::from_json(g.at("alpha"), "alpha");
    c.r = Grid::from_json(g.at("r"), "r");
    c.b1 = Grid::from_json(g.at("b1"), "b1");
    c.b2 = Grid::from_json(g.at("b2"), "b2");
    c.swept = Grid::from_json(g.at("swept"), "swept");

    const auto& ls = merged.at("line_scan");
    c.fixed_axis = get<std::string>(ls, "fixed_axis");
    c.fixed_bias = get<double>(ls, "fixed_bias");

    const auto& o = merged.at("oracle");
    c.oracle_target = get<std::string>(o, "target");
    c.oracle_product =
        is_null(o, "product") ? std::nullopt : std::optional(get<unsigned>(o, "product"));
    if (is_null(o, "inputs")) {
      c.oracle_inputs.reset();
    } else {
      const auto in = get<std::vector<unsigned>>(o, "inputs");
      if (in.size() != 2) throw ConfigError("oracle.inputs must be [M, N]");
      c.oracle_inputs = std::pair(in[0], in[1]);
    }

    c.trace_stride = get<std::size_t>(merged, "trace_stride");
    c.plots = get<bool>(merged, "plots");
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, command);
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (runs < 1) fail("runs must be >= 1");
  try {
    schedule.validate();
  } catch (const ContractViolation& e) {
    fail(e.what());
  }
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!(model.r > 0.0) || !std::isfinite(model.r)) fail("model.r must be positive");
  if (!finite_nonneg(model.alpha)) fail("model.alpha must be >= 0");
  if (model.beta && !finite_nonneg(*model.beta)) fail("model.beta must be >= 0");
  if (!(model.gap_target > 0.0) || !(model.coeff_bound > 0.0))
    fail("gap_target and coeff_bound must be positive");
  if (!finite_nonneg(disorder.delta)) fail("disorder.delta must be >= 0");
  for (const Grid* g : {&alpha, &r, &b1, &b2, &swept}) {
    if (g->values.empty()) fail("grids must be non-empty");
    for (double v : g->values)
      if (!std::isfinite(v)) fail("grid values must be finite");
  }
  for (double a : alpha.values)
    if (a < 0.0) fail("alpha grid values must be >= 0");
  for (double v : r.values)
    if (v < 0.0) fail("r grid values must be >= 0");
  if (command == "factorize" || command == "trace") {
    for (double v : r.values)
      if (v <= 0.0) fail("factorize needs r > 0");
  }
  if (products.empty()) fail("products grid must be non-empty");
  for (unsigned p : products)
    if (p >= 16) fail("products must lie in 0..15");
  if (fixed_axis != "b1" && fixed_axis != "b2") fail("line_scan.fixed_axis must be b1 or b2");
  if (calibration.points < 3 || calibration.points % 2 == 0)
    fail("calibration.points must be odd and >= 3");
  if (!(calibration.shrink > 0.0 && calibration.shrink < 1.0))
    fail("calibration.shrink must lie in (0, 1)");
  if (calibration.passes < 1) fail("calibration.passes must be >= 1");
  if (calibration.basis != "principal" && calibration.basis != "axis")
    fail("calibration.basis must be 'principal' or 'axis'");
  if (!(calibration.range > 0.0)) fail("calibration.range must be positive");
  if (calibration.rounds < 1) fail("calibration.rounds must be >= 1");
  if (oracle_target != "mu" && oracle_target != "circuit" && oracle_target != "cq-triple")
    fail("oracle.target must be mu, circuit or cq-triple");
  if (oracle_product && *oracle_product >= 16) fail("oracle.product must lie in 0..15");
  if (oracle_inputs && (oracle_inputs->first > 3 || oracle_inputs->second > 3))
    fail("oracle.inputs must lie in 0..3");
  if (trace_stride < 1) fail("trace_stride must be >= 1");
}

double ExperimentConfig::effective_beta() const {
  if (model.beta) return *model.beta;
  double a = model.alpha;
  for (double v : alpha.values) a = std::max(a, v);
  return a * 7.0 / 6.0;
}

std::string config_hash(const ExperimentConfig& config) {
  // Worker count does not change results, so it is left out of the hash.
  json j = config.to_json();
  j.erase("workers");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace spinfactor::experiments
