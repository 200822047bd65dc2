#include "spinfactor/experiments/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "spinfactor/anneal.hpp"
#include "spinfactor/circuit.hpp"
#include "spinfactor/experiments/output.hpp"
#include "spinfactor/experiments/stats.hpp"
#include "spinfactor/oracle.hpp"
#include "spinfactor/spin_logic.hpp"

namespace spinfactor::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Joint (Q1, Q2) states of the coupled pair, keyed "<Q1><Q2>".
const std::vector<std::string> kPairStates = {"00", "01", "10", "11"};

SynthesisResult synthesize_mu(const ExperimentConfig& c) {
  return synthesize(mu_relation(), c.model.gap_target, c.model.coeff_bound);
}

std::string fmt(double v) { return format_number(v); }

struct Emitter {
  const ExperimentConfig& config;
  const fs::path& dir;
  CommandResult result;

  void csv(const std::string& name, const CsvTable& table) {
    write_text(dir / name, table.render(csv_metadata(config)));
    result.files.push_back(dir / name);
  }
  void json_file(const std::string& name, const json& j) {
    write_json(dir / name, j);
    result.files.push_back(dir / name);
  }
  void svg(const std::string& name, const std::string& content) {
    if (!config.plots) return;
    write_text(dir / name, content);
    result.files.push_back(dir / name);
  }
};

json with_meta(const ExperimentConfig& c, json j) {
  j["command"] = c.command;
  j["config_hash"] = config_hash(c);
  j["master_seed"] = c.master_seed;
  return j;
}

std::vector<double> to_vector(const BiasOffsets& offs, std::size_t n) {
  std::vector<double> v(n, 0.0);
  for (const auto& [i, x] : offs) v[i] = x;
  return v;
}

// Counts of the 16 valid MU rows (in relation order) and of everything else.
struct MuCounts {
  std::vector<std::size_t> valid;
  std::size_t excited = 0;
};

MuCounts count_mu_rows(const RelationSpec& rel, const SampleSet& set) {
  MuCounts out;
  out.valid.assign(rel.valid.size(), 0);
  for (const auto& rec : set.records) {
    const auto row = row_of_config(rec.config);
    const auto it = std::lower_bound(rel.valid.begin(), rel.valid.end(), row);
    if (it != rel.valid.end() && *it == row)
      ++out.valid[static_cast<std::size_t>(it - rel.valid.begin())];
    else
      ++out.excited;
  }
  return out;
}

std::map<std::string, double> pair_probabilities(const SampleSet& set) {
  std::map<std::string, double> p;
  for (const auto& s : kPairStates) p[s] = 0.0;
  const std::size_t idx[] = {0, 2};
  for (const auto& [key, count] : set.subset_counts(idx))
    p[key] = static_cast<double>(count) / static_cast<double>(set.runs);
  return p;
}

std::string dominant_state(const std::map<std::string, double>& p) {
  std::string best = kPairStates.front();
  for (const auto& s : kPairStates)
    if (p.at(s) > p.at(best)) best = s;
  return best;
}

std::string oracle_pair_state(double r, double b1, double b2) {
  const auto rep = ground_states(coupled_pair(r, b1, b2));
  std::set<std::string> states;
  for (const auto& c : rep.ground_configs)
    states.insert(std::string{static_cast<char>('0' + c.bit(0)), static_cast<char>('0' + c.bit(2))});
  if (states.size() != 1) return "degenerate";
  return *states.begin();
}

std::vector<std::vector<double>> axis_directions(std::size_t n) {
  std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) dirs[i][i] = 1.0;
  return dirs;
}

// Centered +-1 matrix of the valid rows: row k holds the spins of valid
// state k minus the column means, so A * offsets is the energy shift of each
// valid state relative to their average.
Eigen::MatrixXd valid_state_matrix(const RelationSpec& rel) {
  const auto k = static_cast<Eigen::Index>(rel.k);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rel.valid.size()), k);
  for (std::size_t r = 0; r < rel.valid.size(); ++r)
    for (Eigen::Index v = 0; v < k; ++v)
      a(static_cast<Eigen::Index>(r), v) = ((rel.valid[r] >> v) & 1U) ? 1.0 : -1.0;
  a.rowwise() -= a.colwise().mean();
  return a;
}

// Unit eigenvectors of A^T A, weakest first. Offsets along different
// eigenvectors change the valid-state energies independently to second order.
std::vector<std::vector<double>> principal_directions(const Eigen::MatrixXd& a) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.transpose() * a);
  const auto k = a.cols();
  const double top = eig.eigenvalues()(k - 1);
  std::vector<std::vector<double>> dirs;
  for (Eigen::Index col = 0; col < k; ++col) {
    if (!(eig.eigenvalues()(col) > 1e-9 * top)) continue;
    Eigen::Index arg = 0;
    eig.eigenvectors().col(col).cwiseAbs().maxCoeff(&arg);
    const double sign = eig.eigenvectors()(arg, col) < 0 ? -1.0 : 1.0;
    std::vector<double> d(static_cast<std::size_t>(k));
    for (Eigen::Index v = 0; v < k; ++v) d[static_cast<std::size_t>(v)] = sign * eig.eigenvectors()(v, col);
    dirs.push_back(std::move(d));
  }
  return dirs;
}

// Offsets whose valid-state energy shifts best match the centered log counts
// (zero counts floored at 1/2), normalized to unit length. Over-represented
// states sit too low; moving along +d raises them.
std::vector<double> log_ratio_direction(const Eigen::MatrixXd& pinv,
                                        const std::vector<std::size_t>& counts) {
  Eigen::VectorXd logc(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t k = 0; k < counts.size(); ++k)
    logc(static_cast<Eigen::Index>(k)) = std::log(std::max(static_cast<double>(counts[k]), 0.5));
  logc.array() -= logc.mean();
  const Eigen::VectorXd d = pinv * logc;
  const double norm = d.norm();
  std::vector<double> out(static_cast<std::size_t>(d.size()), 0.0);
  if (norm > 0.0)
    for (Eigen::Index v = 0; v < d.size(); ++v) out[static_cast<std::size_t>(v)] = d(v) / norm;
  return out;
}

}  // namespace

CommandResult cmd_synth(const ExperimentConfig& c, const fs::path& dir) {
  Emitter out{c, dir, {}};
  const auto rel = mu_relation();
  SynthesisResult syn;
  try {
    syn = synthesize(rel, c.model.gap_target, c.model.coeff_bound);
  } catch (const InfeasibleRelation& e) {
    out.result.summary = with_meta(c, {{"status", "infeasible"},
                                       {"message", e.what()},
                                       {"certificate", e.certificate()}});
    out.json_file("synth_report.json", out.result.summary);
    out.result.exit_code = kExitVerificationFailure;
    return std::move(out.result);
  }
  const auto report = verify_degenerate_ground(rel, syn.model, 1e-9);
  out.json_file("mu_model.json", model_to_json(syn.model));
  out.json_file("mu_model.sidecar.json", synthesis_sidecar_json(syn));
  json summary = verification_json(rel, report);
  summary["status"] = report.passed ? "pass" : "fail";
  summary["raw_gap"] = syn.raw_gap;
  summary["coeff_bound"] = syn.coeff_bound;
  out.result.summary = with_meta(c, summary);
  out.json_file("synth_report.json", out.result.summary);
  out.result.exit_code = report.passed ? kExitOk : kExitVerificationFailure;
  return std::move(out.result);
}

CommandResult cmd_mu_hist(const ExperimentConfig& c, const fs::path& dir) {
  Emitter out{c, dir, {}};
  const auto rel = mu_relation();
  const auto syn = synthesize_mu(c);
  const auto offsets = c.disorder.offsets(syn.model.size());
  const auto model = with_offsets(syn.model, offsets);
  const auto set = sample(model, c.schedule, c.runs, c.master_seed, c.workers);
  const auto counts = count_mu_rows(rel, set);
  const double chi2 = chi_square_uniform(counts.valid, c.runs);

  CsvTable table({"state", "X", "Y", "Z", "D", "S", "C", "count", "probability"});
  std::size_t nonzero = 0;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < rel.valid.size(); ++k) {
    const auto row = rel.valid[k];
    const auto cfg = config_of_row(row, rel.k);
    std::vector<std::string> cells{cfg.bitstring()};
    for (std::size_t v = 0; v < rel.k; ++v) cells.push_back(std::to_string(cfg.bit(v)));
    const double p = static_cast<double>(counts.valid[k]) / static_cast<double>(c.runs);
    cells.push_back(std::to_string(counts.valid[k]));
    cells.push_back(fmt(p));
    table.add_row(std::move(cells));
    if (counts.valid[k] > 0) ++nonzero;
    xs.push_back(static_cast<double>(k));
    ys.push_back(p);
  }
  table.add_row({"excited", "", "", "", "", "", "", std::to_string(counts.excited),
                 fmt(static_cast<double>(counts.excited) / static_cast<double>(c.runs))});
  out.csv("mu_hist.csv", table);
  out.svg("mu_hist.svg", svg_line_plot("MU ground-state frequencies", "valid state index",
                                       "probability", {{"frequency", xs, ys}}));

  out.result.summary = with_meta(c, {{"runs", c.runs},
                                     {"chi_square", chi2},
                                     {"nonzero_bins", nonzero},
                                     {"valid_counts", counts.valid},
                                     {"excited", counts.excited},
                                     {"disorder_delta", c.disorder.delta},
                                     {"disorder_offsets", to_vector(offsets, syn.model.size())}});
  out.json_file("mu_hist.json", out.result.summary);
  return std::move(out.result);
}

CommandResult cmd_cq_sweep(const ExperimentConfig& c, const fs::path& dir) {
  Emitter out{c, dir, {}};
  CsvTable table({"r", "runs", "errors", "error_rate", "floor"});
  std::vector<double> rates, plotted;
  json points = json::array();
  const double floor = 1.0 / static_cast<double>(c.runs);
  for (std::size_t k = 0; k < c.r.values.size(); ++k) {
    const double r = c.r.values[k];
    const auto set = sample(cq_triple(r, c.model.bias_q1), c.schedule, c.runs,
                            derive_seed(c.master_seed, k), c.workers);
    std::size_t errors = 0;
    for (const auto& rec : set.records)
      if (rec.config[0] != rec.config[2]) ++errors;
    const double rate = static_cast<double>(errors) / static_cast<double>(c.runs);
    rates.push_back(rate);
    plotted.push_back(std::max(rate, floor));
    table.add_row({fmt(r), std::to_string(c.runs), std::to_string(errors), fmt(rate), fmt(floor)});
    points.push_back({{"r", r}, {"errors", errors}, {"error_rate", rate}});
  }
  out.csv("cq_sweep.csv", table);
  out.svg("cq_sweep.svg", svg_line_plot("Q1/Q2 disagreement vs chain strength", "r",
                                        "error rate (floor 1/runs)",
                                        {{"error", c.r.values, plotted}}, true));
  out.result.summary = with_meta(c, {{"runs", c.runs},
                                     {"floor", floor},
                                     {"bias_q1", c.model.bias_q1},
                                     {"points", points},
                                     {"non_increasing", non_increasing_within_noise(rates, c.runs)}});
  out.json_file("cq_sweep.json", out.result.summary);
  return std::move(out.result);
}

CommandResult cmd_phase_diagram(const ExperimentConfig& c, const fs::path& dir) {
  Emitter out{c, dir, {}};
  const auto& b1 = c.b1.values;
  const auto& b2 = c.b2.values;
  // probs[iy][ix] for b2 index iy, b1 index ix
  std::vector<std::vector<std::map<std::string, double>>> probs(b2.size(),
                                                                std::vector<std::map<std::string, double>>(b1.size()));
  CsvTable table({"b1", "b2", "P00", "P01", "P10", "P11"});
  std::size_t point = 0;
  for (std::size_t iy = 0; iy < b2.size(); ++iy) {
    for (std::size_t ix = 0; ix < b1.size(); ++ix, ++point) {
      const auto set = sample(coupled_pair(c.model.r, b1[ix], b2[iy]), c.schedule, c.runs,
                              derive_seed(c.master_seed, point), c.workers);
      probs[iy][ix] = pair_probabilities(set);
      const auto& p = probs[iy][ix];
      table.add_row({fmt(b1[ix]), fmt(b2[iy]), fmt(p.at("00")), fmt(p.at("01")), fmt(p.at("10")),
                     fmt(p.at("11"))});
    }
  }
  out.csv("phase_diagram.csv", table);

  // Boundary scans along the outer rows/columns of the grid.
  struct Scan {
    std::string name;
    bool along_b2;      // swept axis
    std::size_t fixed;  // index on the other axis
  };
  const std::vector<Scan> scans = {{"b1=min, sweep b2", true, 0},
                                   {"b1=max, sweep b2", true, b1.size() - 1},
                                   {"b2=min, sweep b1", false, 0},
                                   {"b2=max, sweep b1", false, b2.size() - 1}};
  json zones = json::array();
  bool all_finite = true;
  for (const auto& s : scans) {
    const auto& xs = s.along_b2 ? b2 : b1;
    std::vector<std::vector<double>> line;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const auto& p = s.along_b2 ? probs[k][s.fixed] : probs[s.fixed][k];
      std::vector<double> row;
      for (const auto& st : kPairStates) row.push_back(p.at(st));
      line.push_back(std::move(row));
    }
    const auto& first = s.along_b2 ? probs.front()[s.fixed] : probs[s.fixed].front();
    const auto& last = s.along_b2 ? probs.back()[s.fixed] : probs[s.fixed].back();
    const std::string from = dominant_state(first), to = dominant_state(last);
    const double width = xs.size() >= 2 ? gray_zone_width(xs, line) : 0.0;
    const double span = std::abs(xs.back() - xs.front());
    const bool finite = from != to && width > 0.0 && width < span;
    all_finite = all_finite && finite;
    zones.push_back({{"scan", s.name},
                     {"fixed_value", s.along_b2 ? b1[s.fixed] : b2[s.fixed]},
                     {"boundary", from + "|" + to},
                     {"width", width},
                     {"finite", finite}});
  }

  json corners = json::array();
  bool corners_match = true;
  for (std::size_t iy : {std::size_t{0}, b2.size() - 1}) {
    for (std::size_t ix : {std::size_t{0}, b1.size() - 1}) {
      const auto measured = dominant_state(probs[iy][ix]);
      const auto predicted = oracle_pair_state(c.model.r, b1[ix], b2[iy]);
      corners_match = corners_match && measured == predicted;
      corners.push_back({{"b1", b1[ix]},
                         {"b2", b2[iy]},
                         {"dominant", measured},
                         {"probability", probs[iy][ix].at(measured)},
                         {"oracle", predicted}});
    }
  }

  std::vector<std::vector<int>> category(b2.size(), std::vector<int>(b1.size()));
  std::vector<std::vector<double>> strength(b2.size(), std::vector<double>(b1.size()));
  for (std::size_t iy = 0; iy < b2.size(); ++iy)
    for (std::size_t ix = 0; ix < b1.size(); ++ix) {
      const auto d = dominant_state(probs[iy][ix]);
      category[iy][ix] = static_cast<int>(
          std::find(kPairStates.begin(), kPairStates.end(), d) - kPairStates.begin());
      strength[iy][ix] = probs[iy][ix].at(d);
    }
  out.svg("phase_diagram.svg",
          svg_category_map("Dominant joint state (Q1 Q2)", b1, b2, category, strength, kPairStates));

  out.result.summary = with_meta(c, {{"r", c.model.r},
                                     {"runs", c.runs},
                                     {"grid", {b1.size(), b2.size()}},
                                     {"gray_zones", zones},
                                     {"all_gray_zones_finite", all_finite},
                                     {"corners", corners},
                                     {"corners_match_oracle", corners_match}});
  out.json_file("phase_diagram.json", out.result.summary);
  return std::move(out.result);
}

CommandResult cmd_line_scan(const ExperimentConfig& c, const fs::path& dir) {
  Emitter out{c, dir, {}};
  const bool fix_b1 = c.fixed_axis == "b1";
  const auto& xs = c.swept.values;
  CsvTable table({"swept", "P00", "P01", "P10", "P11"});
  std::map<std::string, std::vector<double>> curves;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double b1 = fix_b1 ? c.fixed_bias : xs[k];
    const double b2 = fix_b1 ? xs[k] : c.fixed_bias;
    const auto p = pair_probabilities(sample(coupled_pair(c.model.r, b1, b2), c.schedule, c.runs,
                                             derive_seed(c.master_seed, k), c.workers));
    table.add_row({fmt(xs[k]), fmt(p.at("00")), fmt(p.at("01")), fmt(p.at("10")), fmt(p.at("11"))});
    for (const auto& s : kPairStates) curves[s].push_back(p.at(s));
  }
  out.csv("line_scan.csv", table);

  std::map<std::string, double> start;
  for (const auto& s : kPairStates) start[s] = curves[s].front();
  const auto initial = dominant_state(start);
  const double midpoint = crossing_point(xs, curves[initial], 0.5);

  // Exact boundary along the same line from the 3-spin oracle.
  double oracle_midpoint = std::numeric_limits<double>::quiet_NaN();
  {
    constexpr int kFine = 4000;
    std::string prev;
    for (int m = 0; m <= kFine; ++m) {
      const double x = xs.front() + (xs.back() - xs.front()) * m / kFine;
      const auto st = oracle_pair_state(c.model.r, fix_b1 ? c.fixed_bias : x, fix_b1 ? x : c.fixed_bias);
      if (st == "degenerate") continue;
      if (!prev.empty() && st != prev) {
        oracle_midpoint = x;
        break;
      }
      prev = st;
    }
  }

  std::vector<Series> series;
  for (const auto& s : kPairStates) series.push_back({"P" + s, xs, curves[s]});
  out.svg("line_scan.svg", svg_line_plot("Joint-state probabilities along a bias line",
                                         fix_b1 ? "b2" : "b1", "probability", series));
  json summary = {{"fixed_axis", c.fixed_axis},
                  {"fixed_bias", c.fixed_bias},
                  {"initial_state", initial},
                  {"final_state", [&] {
                     std::map<std::string, double> end;
                     for (const auto& s : kPairStates) end[s] = curves[s].back();
                     return dominant_state(end);
                   }()}};
  summary["transition_midpoint"] = std::isnan(midpoint) ? json(nullptr) : json(midpoint);
  summary["oracle_midpoint"] = std::isnan(oracle_midpoint) ? json(nullptr) : json(oracle_midpoint);
  out.result.summary = with_meta(c, summary);
  out.json_file("line_scan.json", out.result.summary);
  return std::move(out.result);
}

CommandResult cmd_factorize(const ExperimentConfig& c, const fs::path& dir) {
  Emitter out{c, dir, {}};
  const auto syn = synthesize_mu(c);
  const double beta = c.effective_beta();
  CsvTable table({"P", "alpha", "beta", "r", "runs", "successes", "success_rate", "chain_ok_mean",
                  "pairs"});
  CsvTable pairs_table({"P", "alpha", "r", "M", "N", "count", "frequency"});
  json points = json::array();
  std::map<unsigned, Series> plot;
  std::size_t point = 0;
  for (double r : c.r.values) {
    const auto [base, layout] = build_factorizer(syn, r);
    for (unsigned P : c.products) {
      for (double alpha : c.alpha.values) {
        ClampSpec clamp{P, alpha, beta, c.model.beta_spins};
        const auto model = apply_problem(base, layout, clamp);
        const auto set = sample(model, c.schedule, c.runs, derive_seed(c.master_seed, point++), c.workers);
        std::size_t successes = 0;
        double chain_ok = 0.0;
        std::map<std::pair<unsigned, unsigned>, std::size_t> pairs;
        for (const auto& rec : set.records) {
          const auto rd = readout_factors(rec.config, layout, P);
          successes += rd.success;
          chain_ok += rd.chain_ok_fraction;
          ++pairs[{rd.M, rd.N}];
        }
        const double rate = static_cast<double>(successes) / static_cast<double>(c.runs);
        std::string pair_text;
        json pair_json = json::array();
        for (const auto& [mn, count] : pairs) {
          if (!pair_text.empty()) pair_text += ' ';
          pair_text += std::to_string(mn.first) + "x" + std::to_string(mn.second) + ":" +
                       std::to_string(count);
          const double f = static_cast<double>(count) / static_cast<double>(c.runs);
          pairs_table.add_row({std::to_string(P), fmt(alpha), fmt(r), std::to_string(mn.first),
                               std::to_string(mn.second), std::to_string(count), fmt(f)});
          pair_json.push_back({{"M", mn.first}, {"N", mn.second}, {"count", count}, {"frequency", f}});
        }
        table.add_row({std::to_string(P), fmt(alpha), fmt(beta), fmt(r), std::to_string(c.runs),
                       std::to_string(successes), fmt(rate),
                       fmt(chain_ok / static_cast<double>(c.runs)), pair_text});
        points.push_back({{"P", P},
                          {"alpha", alpha},
                          {"beta", beta},
                          {"r", r},
                          {"runs", c.runs},
                          {"successes", successes},
                          {"success_rate", rate},
                          {"pairs", pair_json}});
        auto& s = plot[P];
        s.name = "P=" + std::to_string(P);
        s.x.push_back(alpha);
        s.y.push_back(rate);
      }
    }
  }
  out.csv("factorize.csv", table);
  out.csv("factorize_pairs.csv", pairs_table);
  if (c.alpha.values.size() > 1 && c.r.values.size() == 1) {
    std::vector<Series> series;
    for (auto& [P, s] : plot) series.push_back(s);
    out.svg("factorize.svg", svg_line_plot("Success probability vs alpha", "alpha",
                                           "success probability", series));
  }
  out.result.summary = with_meta(c, {{"beta", beta}, {"points", points}});
  out.json_file("factorize.json", out.result.summary);
  return std::move(out.result);
}

CommandResult cmd_trace(const ExperimentConfig& c, const fs::path& dir) {
  Emitter out{c, dir, {}};
  const auto syn = synthesize_mu(c);
  const auto [base, layout] = build_factorizer(syn, c.model.r);
  const unsigned P = c.products.front();
  const auto model = apply_problem(base, layout, {P, c.model.alpha, c.effective_beta(), c.model.beta_spins});
  const auto seed = derive_seed(c.master_seed, 0);
  const auto points = trace(model, c.schedule, seed, c.trace_stride);
  std::string csv = trace_csv(points);
  for (const auto& [k, v] : csv_metadata(c)) csv += "# " + k + "=" + v + "\n";
  write_text(dir / "trace.csv", csv);
  out.result.files.push_back(dir / "trace.csv");

  const auto rd = readout_factors(points.back().config, layout, P);
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    xs.push_back(static_cast<double>(p.sweep));
    ys.push_back(p.energy);
  }
  out.svg("trace.svg", svg_line_plot("Energy during one anneal", "sweep", "energy", {{"E", xs, ys}}));
  out.result.summary = with_meta(c, {{"P", P},
                                     {"seed", seed},
                                     {"snapshots", points.size()},
                                     {"final_energy", points.back().energy},
                                     {"M", rd.M},
                                     {"N", rd.N},
                                     {"P_read", rd.P_read},
                                     {"success", rd.success},
                                     {"chain_ok_fraction", rd.chain_ok_fraction}});
  out.json_file("trace.json", out.result.summary);
  return std::move(out.result);
}

CommandResult cmd_calibrate(const ExperimentConfig& c, const fs::path& dir) {
  Emitter out{c, dir, {}};
  const auto rel = mu_relation();
  const auto syn = synthesize_mu(c);
  const std::size_t n = syn.model.size();
  const auto& cal = c.calibration;
  auto histogram = [&](const IsingModel& m, std::uint64_t seed) {
    return count_mu_rows(rel, sample(m, c.schedule, c.runs, seed, c.workers)).valid;
  };
  auto chi2 = [&](const IsingModel& m, std::uint64_t seed) {
    return chi_square_uniform(histogram(m, seed), c.runs);
  };
  const double baseline = chi2(syn.model, cal.validation_seed);
  const Eigen::MatrixXd a = valid_state_matrix(rel);
  const Eigen::MatrixXd pinv = a.completeOrthogonalDecomposition().pseudoInverse();
  const auto fixed_dirs = cal.basis == "axis" ? axis_directions(n) : principal_directions(a);

  std::vector<std::uint64_t> seeds = cal.disorder_seeds;
  if (seeds.empty()) seeds.push_back(c.disorder.seed);

  CsvTable table({"disorder_seed", "chi_square_before", "chi_square_after", "improvement",
                  "evaluations"});
  json results = json::array();
  std::size_t improved_5x = 0;
  for (std::uint64_t dseed : seeds) {
    DisorderModel disorder{c.disorder.delta, dseed};
    const auto injected = disorder.offsets(n);
    const auto disordered = with_offsets(syn.model, injected);
    const auto injected_vec = to_vector(injected, n);

    // Grid refinement along one direction at a time, with common random
    // numbers: every evaluation reuses the same search seed.
    std::size_t evaluations = 0;
    struct Point {
      std::vector<double> corr;
      std::vector<std::size_t> counts;
      double score = 0.0;
    };
    auto evaluate = [&](std::vector<double> v) {
      BiasOffsets offs;
      for (std::size_t i = 0; i < n; ++i)
        if (v[i] != 0.0) offs[i] = v[i];
      ++evaluations;
      Point p{std::move(v), histogram(with_offsets(disordered, offs), cal.search_seed), 0.0};
      p.score = chi_square_uniform(p.counts, c.runs);
      return p;
    };
    const long half = static_cast<long>(cal.points / 2);
    Point current = evaluate(std::vector<double>(n, 0.0));
    double step = cal.range / static_cast<double>(half);
    for (std::size_t round = 0; round < cal.rounds; ++round, step *= cal.shrink) {
      for (std::size_t pass = 0; pass < cal.passes; ++pass) {
        bool gained = false;
        auto dirs = fixed_dirs;
        if (cal.log_ratio_direction) dirs.push_back(log_ratio_direction(pinv, current.counts));
        for (std::size_t d = 0; d < dirs.size(); ++d) {
          std::vector<double> steps;
          for (long j = -half; j <= half; ++j)
            if (j != 0) steps.push_back(step * static_cast<double>(j));
          if (cal.include_injected_negatives && round == 0 && pass == 0 && d < fixed_dirs.size()) {
            double t = 0.0;
            for (std::size_t i = 0; i < n; ++i) t -= dirs[d][i] * (injected_vec[i] + current.corr[i]);
            steps.push_back(t);
          }
          Point best = current;
          for (double t : steps) {
            auto v = current.corr;
            for (std::size_t i = 0; i < n; ++i) v[i] += t * dirs[d][i];
            auto p = evaluate(std::move(v));
            if (p.score < best.score) best = std::move(p);
          }
          if (best.score < current.score) {
            current = std::move(best);
            gained = true;
          }
        }
        if (!gained) break;
      }
    }
    const auto& corr = current.corr;

    BiasOffsets final_offs;
    for (std::size_t i = 0; i < n; ++i)
      if (corr[i] != 0.0) final_offs[i] = corr[i];
    const double before = chi2(disordered, cal.validation_seed);
    const double after = chi2(with_offsets(disordered, final_offs), cal.validation_seed);
    const double improvement = after > 0.0 ? before / after : std::numeric_limits<double>::infinity();
    if (improvement >= 5.0) ++improved_5x;
    table.add_row({std::to_string(dseed), fmt(before), fmt(after), fmt(improvement),
                   std::to_string(evaluations)});
    std::vector<double> residual(n), recovered(n);
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] = injected_vec[i] + corr[i];
      recovered[i] = -corr[i];
    }
    results.push_back({{"disorder_seed", dseed},
                       {"injected_offsets", injected_vec},
                       {"corrections", corr},
                       {"recovered_offsets", recovered},
                       {"residual", residual},
                       {"chi_square_before", before},
                       {"chi_square_after", after},
                       {"improvement", improvement},
                       {"search_chi_square", current.score},
                       {"evaluations", evaluations}});
  }
  out.csv("calibrate.csv", table);
  out.result.summary = with_meta(c, {{"delta", c.disorder.delta},
                                     {"runs", c.runs},
                                     {"baseline_chi_square", baseline},
                                     {"results", results},
                                     {"improved_5x", improved_5x},
                                     {"seeds", seeds.size()}});
  out.json_file("calibrate.json", out.result.summary);
  return std::move(out.result);
}

CommandResult cmd_oracle(const ExperimentConfig& c, const fs::path& dir) {
  Emitter out{c, dir, {}};
  json summary;
  if (c.oracle_target == "mu") {
    const auto syn = synthesize_mu(c);
    const auto rep = ground_states(syn.model);
    summary = ground_report_json(rep);
  } else if (c.oracle_target == "cq-triple") {
    summary = ground_report_json(ground_states(cq_triple(c.model.r, c.model.bias_q1)));
  } else {
    if (!c.oracle_product && !c.oracle_inputs)
      throw ConfigError("circuit oracle needs oracle.product or oracle.inputs");
    const auto syn = synthesize_mu(c);
    const auto [base, layout] = build_factorizer(syn, c.model.r);
    const unsigned P = c.oracle_product.value_or(0);
    const double alpha = c.oracle_product ? c.model.alpha : 0.0;
    const auto model = apply_problem(base, layout, {P, alpha, c.effective_beta(), c.model.beta_spins});
    std::map<std::size_t, int> fixed;
    if (c.oracle_product) fixed = product_fixing(layout, P);
    if (c.oracle_inputs)
      fixed = merge_fixings(fixed, input_fixing(layout, c.oracle_inputs->first, c.oracle_inputs->second));
    OracleOptions opts;
    opts.workers = c.workers;
    const auto rep = ground_states_clamped(model, fixed, opts);
    summary = ground_report_json(rep);
    json decoded = json::array();
    std::set<std::pair<unsigned, unsigned>> factor_pairs;
    for (const auto& cfg : rep.ground_configs) {
      const auto rd = readout_factors(cfg, layout, P);
      decoded.push_back({{"M", rd.M},
                         {"N", rd.N},
                         {"P_read", rd.P_read},
                         {"product_matches", rd.M * rd.N == rd.P_read},
                         {"chain_ok_fraction", rd.chain_ok_fraction}});
      if (c.oracle_product && rd.success) factor_pairs.insert({rd.M, rd.N});
    }
    summary["decoded"] = decoded;
    if (c.oracle_product) {
      json fp = json::array();
      for (const auto& [m, n] : factor_pairs) fp.push_back({m, n});
      summary["product"] = P;
      summary["factor_pairs"] = fp;
      if (factor_pairs.empty()) summary["note"] = "no representable factorization";
    }
  }
  summary["target"] = c.oracle_target;
  out.result.summary = with_meta(c, summary);
  out.json_file("oracle.json", out.result.summary);
  return std::move(out.result);
}

CommandResult run_command(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  const auto& cmd = config.command;
  if (cmd == "synth") return cmd_synth(config, out_dir);
  if (cmd == "mu-hist") return cmd_mu_hist(config, out_dir);
  if (cmd == "cq-sweep") return cmd_cq_sweep(config, out_dir);
  if (cmd == "phase-diagram") return cmd_phase_diagram(config, out_dir);
  if (cmd == "line-scan") return cmd_line_scan(config, out_dir);
  if (cmd == "factorize") return cmd_factorize(config, out_dir);
  if (cmd == "trace") return cmd_trace(config, out_dir);
  if (cmd == "calibrate") return cmd_calibrate(config, out_dir);
  if (cmd == "oracle") return cmd_oracle(config, out_dir);
  throw ConfigError("unknown command '" + cmd + "'");
}

}  // namespace spinfactor::experiments
