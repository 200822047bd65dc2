#include "spinfactor/spin_logic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <gmpxx.h>

#include "spinfactor/simplex.hpp"

namespace spinfactor {

namespace {

constexpr std::size_t kMaxRelationVars = 24;

int spin_at(std::uint32_t row, std::size_t v) { return (row >> v) & 1U ? 1 : -1; }

std::string row_string(std::uint32_t row, std::size_t k) {
  std::string s(k, '0');
  for (std::size_t v = 0; v < k; ++v)
    if ((row >> v) & 1U) s[v] = '1';
  return s;
}

}  // namespace

bool RelationSpec::contains(std::uint32_t row) const {
  return std::binary_search(valid.begin(), valid.end(), row);
}

void RelationSpec::validate() const {
  if (k == 0 || k > kMaxRelationVars)
    throw ContractViolation("relation variable count must be in [1, 24]");
  if (names.size() != k) throw ContractViolation("relation needs exactly k variable names");
  const std::uint64_t rows = std::uint64_t{1} << k;
  if (valid.empty() || valid.size() >= rows)
    throw ContractViolation("relation must have at least one valid and one invalid row");
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (valid[i] >= rows) throw ContractViolation("relation row wider than k bits");
    if (i > 0 && valid[i] <= valid[i - 1])
      throw ContractViolation("relation rows must be sorted and unique");
  }
}

RelationSpec relation_from_predicate(std::string name, std::vector<std::string> names,
                                     const std::function<bool(std::uint32_t)>& pred) {
  RelationSpec rel{std::move(name), names.size(), std::move(names), {}};
  if (rel.k == 0 || rel.k > kMaxRelationVars)
    throw ContractViolation("relation variable count must be in [1, 24]");
  for (std::uint32_t row = 0; row < (std::uint32_t{1} << rel.k); ++row)
    if (pred(row)) rel.valid.push_back(row);
  rel.validate();
  return rel;
}

RelationSpec mu_relation() {
  return relation_from_predicate("mu", {"X", "Y", "Z", "D", "S", "C"}, [](std::uint32_t r) {
    auto b = [r](std::size_t v) { return static_cast<int>((r >> v) & 1U); };
    return b(mu::S) + 2 * b(mu::C) == b(mu::X) * b(mu::Y) + b(mu::Z) + b(mu::D);
  });
}

SpinConfig config_of_row(std::uint32_t row, std::size_t k) {
  std::vector<Spin> spins(k);
  for (std::size_t v = 0; v < k; ++v) spins[v] = static_cast<Spin>(spin_at(row, v));
  return SpinConfig(std::move(spins));
}

std::uint32_t row_of_config(const SpinConfig& config) {
  std::uint32_t row = 0;
  for (std::size_t v = 0; v < config.size(); ++v)
    if (config[v] > 0) row |= std::uint32_t{1} << v;
  return row;
}

SynthesisResult synthesize(const RelationSpec& rel, double gap_target, double coeff_bound) {
  rel.validate();
  if (!(gap_target > 0.0) || !std::isfinite(gap_target))
    throw ContractViolation("gap_target must be positive");
  if (!(coeff_bound > 0.0) || !std::isfinite(coeff_bound))
    throw ContractViolation("coeff_bound must be positive");

  const std::size_t k = rel.k;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  const std::size_t nc = k + pairs.size();  // shifted coefficients c' = c + B in [0, 2B]
  const std::size_t e_pos = nc, e_neg = nc + 1, g_col = nc + 2;
  const std::size_t num_vars = nc + 3;
  const mpq_class bound(coeff_bound);

  lp::Program<mpq_class> prog;
  prog.num_vars = num_vars;
  prog.objective.assign(num_vars, mpq_class(0));
  prog.objective[g_col] = 1;

  for (std::uint32_t row = 0; row < (std::uint32_t{1} << k); ++row) {
    lp::Row<mpq_class> r;
    r.coeffs.assign(num_vars, mpq_class(0));
    long feature_sum = 0;
    for (std::size_t v = 0; v < k; ++v) {
      r.coeffs[v] = spin_at(row, v);
      feature_sum += spin_at(row, v);
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const int f = spin_at(row, pairs[p].first) * spin_at(row, pairs[p].second);
      r.coeffs[k + p] = f;
      feature_sum += f;
    }
    r.coeffs[e_pos] = -1;
    r.coeffs[e_neg] = 1;
    // E(row) - E0 = sum f (c' - B) - E0
    r.rhs = bound * feature_sum;
    if (rel.contains(row)) {
      r.sense = lp::Sense::Equal;
    } else {
      r.coeffs[g_col] = -1;
      r.sense = lp::Sense::GreaterEqual;
    }
    prog.rows.push_back(std::move(r));
  }
  for (std::size_t c = 0; c < nc; ++c) {
    lp::Row<mpq_class> r;
    r.coeffs.assign(num_vars, mpq_class(0));
    r.coeffs[c] = 1;
    r.sense = lp::Sense::LessEqual;
    r.rhs = 2 * bound;
    prog.rows.push_back(std::move(r));
  }

  const auto sol = lp::solve(prog);
  if (sol.status == lp::Status::PivotLimit || sol.status == lp::Status::Unbounded)
    throw SolverFailure("simplex did not converge while synthesizing relation '" + rel.name + "'");
  if (sol.status == lp::Status::Infeasible) {
    // The gap-free system (g = 0, all coefficients 0, E0 = 0) is always
    // feasible, so this indicates a construction bug rather than a property
    // of the relation.
    throw SolverFailure("synthesis LP reported infeasible phase one for '" + rel.name + "'");
  }

  const mpq_class best_gap = sol.x[g_col];
  if (best_gap < mpq_class(gap_target)) {
    std::ostringstream cert;
    cert << "LP optimum: maximum gap " << best_gap.get_d() << " with |h|,|J| <= " << coeff_bound
         << " over " << (std::uint64_t{1} << k) << " rows (" << rel.valid.size()
         << " equalities); requested gap_target " << gap_target;
    std::string what = best_gap > 0 ? "relation '" + rel.name + "' cannot reach the requested gap"
                                    : "relation '" + rel.name +
                                          "' has no pairwise Ising realization on its own variables";
    throw InfeasibleRelation(what, cert.str());
  }

  std::vector<mpq_class> coef(nc);
  mpq_class max_abs(0);
  for (std::size_t c = 0; c < nc; ++c) {
    coef[c] = sol.x[c] - bound;
    if (abs(coef[c]) > max_abs) max_abs = abs(coef[c]);
  }
  const mpq_class e0 = sol.x[e_pos] - sol.x[e_neg];

  std::vector<double> h(k);
  for (std::size_t v = 0; v < k; ++v) h[v] = mpq_class(coef[v] / max_abs).get_d();
  std::vector<Coupling> couplings;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    mpq_class j = coef[k + p] / max_abs;
    if (j != 0) couplings.push_back({pairs[p].first, pairs[p].second, j.get_d()});
  }

  SynthesisResult out;
  out.relation_name = rel.name;
  out.model = IsingModel(k, std::move(h), std::move(couplings), rel.names);
  out.ground_energy = mpq_class(e0 / max_abs).get_d();
  out.gap = mpq_class(best_gap / max_abs).get_d();
  out.coeff_bound = coeff_bound;
  out.raw_gap = best_gap.get_d();
  return out;
}

VerificationReport verify_degenerate_ground(const RelationSpec& rel, const IsingModel& model,
                                            double tol) {
  rel.validate();
  if (model.size() != rel.k)
    throw ContractViolation("model size does not match relation variable count");

  const std::size_t k = rel.k;
  const std::uint64_t total = std::uint64_t{1} << k;
  std::vector<double> field(model.h().begin(), model.h().end());
  SpinConfig config = SpinConfig::zeros(k);
  for (std::size_t i = 0; i < k; ++i)
    for (const auto& nb : model.neighbors(i)) field[i] += nb.coupling * config[nb.index];
  double e = energy(model, config);

  // Energies are kept per row so the ground set can be cut after the
  // global minimum is known.
  std::vector<double> energies(total);
  std::uint32_t row = 0;
  energies[0] = e;
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto v = static_cast<std::size_t>(std::countr_zero(step));
    const Spin s = config[v];
    e += -2.0 * s * field[v];
    config.flip(v);
    for (const auto& nb : model.neighbors(v)) field[nb.index] -= 2.0 * nb.coupling * s;
    row ^= std::uint32_t{1} << v;
    energies[row] = e;
  }

  VerificationReport rep;
  double min_all = std::numeric_limits<double>::infinity();
  double min_valid = min_all, max_valid = -min_all, min_invalid = min_all;
  for (std::uint32_t r = 0; r < total; ++r) {
    min_all = std::min(min_all, energies[r]);
    if (rel.contains(r)) {
      min_valid = std::min(min_valid, energies[r]);
      max_valid = std::max(max_valid, energies[r]);
    } else {
      min_invalid = std::min(min_invalid, energies[r]);
    }
  }
  for (std::uint32_t r = 0; r < total; ++r) {
    const bool ground = energies[r] <= min_all + tol;
    const bool valid = rel.contains(r);
    if (ground) rep.ground_rows.push_back(r);
    if (ground && !valid) rep.ground_not_valid.push_back(r);
    if (!ground && valid) rep.valid_not_ground.push_back(r);
  }
  rep.ground_energy = min_all;
  rep.gap = min_invalid - min_valid;
  rep.valid_spread = max_valid - min_valid;
  rep.ground_set_matches = rep.ground_not_valid.empty() && rep.valid_not_ground.empty();
  rep.passed = rep.ground_set_matches && rep.valid_spread <= tol && rep.gap > tol;
  return rep;
}

std::string VerificationReport::summary() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << ": " << ground_rows.size() << " ground states, gap " << gap
     << ", valid spread " << valid_spread;
  if (!valid_not_ground.empty()) os << ", " << valid_not_ground.size() << " valid rows excited";
  if (!ground_not_valid.empty()) os << ", " << ground_not_valid.size() << " invalid rows in ground";
  return os.str();
}

nlohmann::json synthesis_sidecar_json(const SynthesisResult& result) {
  return {{"relation_name", result.relation_name},
          {"ground_energy", result.ground_energy},
          {"gap", result.gap}};
}

nlohmann::json verification_json(const RelationSpec& rel, const VerificationReport& report) {
  auto rows = [&](const std::vector<std::uint32_t>& v) {
    auto arr = nlohmann::json::array();
    for (auto r : v) arr.push_back(row_string(r, rel.k));
    return arr;
  };
  return {{"relation_name", rel.name},
          {"variables", rel.names},
          {"passed", report.passed},
          {"ground_set_matches", report.ground_set_matches},
          {"ground_energy", report.ground_energy},
          {"gap", report.gap},
          {"valid_spread", report.valid_spread},
          {"ground_state_count", report.ground_rows.size()},
          {"ground_states", rows(report.ground_rows)},
          {"valid_not_ground", rows(report.valid_not_ground)},
          {"ground_not_valid", rows(report.ground_not_valid)}};
}

}  // namespace spinfactor
