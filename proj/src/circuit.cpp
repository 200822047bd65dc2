#include "spinfactor/circuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace spinfactor {

namespace {

constexpr std::array<QubitRole, 6> kMuRoles = {QubitRole::X, QubitRole::Y, QubitRole::Z,
                                               QubitRole::D, QubitRole::S, QubitRole::C};
constexpr std::size_t kMuSpins = kMuRoles.size();
constexpr int kGrid = 2;

std::size_t role_offset(QubitRole role) {
  const auto it = std::find(kMuRoles.begin(), kMuRoles.end(), role);
  if (it == kMuRoles.end()) throw ContractViolation("CQ is not a multiplier-unit role");
  return static_cast<std::size_t>(it - kMuRoles.begin());
}

std::size_t port_index(const MuPort& p) {
  if (p.row < 0 || p.row >= kGrid || p.col < 0 || p.col >= kGrid)
    throw ContractViolation("multiplier-unit coordinates out of range");
  return kMuSpins * static_cast<std::size_t>(kGrid * p.row + p.col) + role_offset(p.role);
}

}  // namespace

std::string to_string(QubitRole role) {
  switch (role) {
    case QubitRole::X: return "X";
    case QubitRole::Y: return "Y";
    case QubitRole::Z: return "Z";
    case QubitRole::D: return "D";
    case QubitRole::S: return "S";
    case QubitRole::C: return "C";
    case QubitRole::CQ: return "CQ";
  }
  return "?";
}

QubitRole role_from_string(const std::string& name) {
  for (auto r : {QubitRole::X, QubitRole::Y, QubitRole::Z, QubitRole::D, QubitRole::S,
                 QubitRole::C, QubitRole::CQ})
    if (to_string(r) == name) return r;
  throw ContractViolation("unknown qubit role '" + name + "'");
}

std::size_t CircuitLayout::mu_spin(int row, int col, QubitRole role) const {
  return port_index({row, col, role});
}

std::string CircuitLayout::label(std::size_t index) const {
  const auto& e = roles.at(index);
  if (e.role == QubitRole::CQ) {
    for (std::size_t c = 0; c < chains.size(); ++c)
      if (chains[c].cq == index) return "CQ" + std::to_string(c);
    return "CQ";
  }
  return to_string(e.role) + std::to_string(e.mu_row) + std::to_string(e.mu_col);
}

std::size_t factorizer_spin_count(std::size_t n_bits) {
  if (n_bits == 0 || n_bits % 2 != 0) throw ContractViolation("bit width must be even");
  const std::size_t half = n_bits / 2;
  return 6 * half * half + n_bits * n_bits - 2 * n_bits;
}

std::vector<ChainEnds> wiring_4bit() {
  using R = QubitRole;
  return {
      // shared inputs
      {{0, 0, R::X}, {1, 0, R::X}},
      {{0, 1, R::X}, {1, 1, R::X}},
      {{0, 0, R::Y}, {0, 1, R::Y}},
      {{1, 0, R::Y}, {1, 1, R::Y}},
      // sum and carry propagation
      {{0, 1, R::S}, {1, 0, R::Z}},
      {{0, 0, R::C}, {1, 0, R::D}},
      {{0, 1, R::C}, {1, 1, R::Z}},
      {{1, 0, R::C}, {1, 1, R::D}},
  };
}

std::pair<IsingModel, CircuitLayout> build_factorizer(const SynthesisResult& mu, double r) {
  return build_factorizer(mu, r, wiring_4bit());
}

std::pair<IsingModel, CircuitLayout> build_factorizer(const SynthesisResult& mu, double r,
                                                      const std::vector<ChainEnds>& wiring) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ContractViolation("chain strength must be positive");
  if (mu.model.size() != kMuSpins) throw ContractViolation("MU model must have 6 spins");
  const auto check = verify_degenerate_ground(mu_relation(), mu.model);
  if (!check.passed)
    throw ContractViolation("MU model failed ground-state verification: " + check.summary());

  double j_max = 0.0;
  for (const auto& c : mu.model.couplings()) j_max = std::max(j_max, std::abs(c.value));
  if (j_max == 0.0) throw ContractViolation("MU model has no couplings");

  CircuitLayout layout;
  layout.n_bits = 4;
  const std::size_t mu_total = kMuSpins * kGrid * kGrid;
  const std::size_t n = mu_total + wiring.size();

  std::vector<double> h(n, 0.0);
  std::vector<Coupling> couplings;
  for (int row = 0; row < kGrid; ++row) {
    for (int col = 0; col < kGrid; ++col) {
      const std::size_t base = port_index({row, col, QubitRole::X});
      for (std::size_t v = 0; v < kMuSpins; ++v) {
        h[base + v] = mu.model.h()[v];
        layout.roles.push_back({base + v, row, col, kMuRoles[v]});
      }
      for (const auto& c : mu.model.couplings())
        couplings.push_back({base + c.i, base + c.j, c.value});
    }
  }
  std::set<std::size_t> used;
  for (std::size_t c = 0; c < wiring.size(); ++c) {
    const std::size_t a = port_index(wiring[c].a);
    const std::size_t b = port_index(wiring[c].b);
    if (a == b) throw ContractViolation("chain endpoints must differ");
    const std::size_t cq = mu_total + c;
    layout.roles.push_back({cq, -1, -1, QubitRole::CQ});
    layout.chains.push_back({a, b, cq, r});
    couplings.push_back({a, cq, -r * j_max});
    couplings.push_back({b, cq, -r * j_max});
  }

  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(layout.label(i));

  using R = QubitRole;
  layout.p_bits = {{port_index({1, 1, R::C}), 8},
                   {port_index({1, 1, R::S}), 4},
                   {port_index({1, 0, R::S}), 2},
                   {port_index({0, 0, R::S}), 1}};
  layout.m_bits = {{port_index({0, 1, R::X}), 2}, {port_index({0, 0, R::X}), 1}};
  layout.n_bits_in = {{port_index({1, 1, R::Y}), 2}, {port_index({0, 1, R::Y}), 1}};
  layout.boundary_zero = {port_index({0, 0, R::Z}), port_index({0, 0, R::D}),
                          port_index({0, 1, R::Z}), port_index({0, 1, R::D})};

  if (wiring.size() == 8 && n != factorizer_spin_count(layout.n_bits))
    throw ContractViolation("spin count does not match the factorizer formula");
  return {IsingModel(n, std::move(h), std::move(couplings), std::move(labels)),
          std::move(layout)};
}

BiasOffsets clamp_offsets(const CircuitLayout& layout, const ClampSpec& clamp) {
  if (clamp.P >= (1U << layout.n_bits))
    throw ContractViolation("P = " + std::to_string(clamp.P) + " does not fit in " +
                            std::to_string(layout.n_bits) + " bits");
  if (clamp.alpha < 0.0 || clamp.beta < 0.0)
    throw ContractViolation("clamp magnitudes must be non-negative");
  BiasOffsets offs;
  for (const auto& bit : layout.p_bits) offs[bit.index] += (clamp.P & bit.weight) ? -clamp.alpha : clamp.alpha;
  const auto& targets = clamp.beta_spins.empty() ? layout.boundary_zero : clamp.beta_spins;
  for (std::size_t i : targets) {
    if (i >= layout.spin_count()) throw ContractViolation("beta spin index out of range");
    offs[i] += clamp.beta;
  }
  return offs;
}

IsingModel apply_problem(const IsingModel& model, const CircuitLayout& layout,
                         const ClampSpec& clamp) {
  if (model.size() != layout.spin_count())
    throw ContractViolation("model and layout sizes differ");
  return with_offsets(model, clamp_offsets(layout, clamp));
}

std::map<std::size_t, int> product_fixing(const CircuitLayout& layout, unsigned P) {
  if (P >= (1U << layout.n_bits)) throw ContractViolation("P out of range");
  std::map<std::size_t, int> fixed;
  for (const auto& bit : layout.p_bits) fixed[bit.index] = (P & bit.weight) ? 1 : 0;
  return fixed;
}

std::map<std::size_t, int> input_fixing(const CircuitLayout& layout, unsigned M, unsigned N) {
  const unsigned limit = 1U << (layout.n_bits / 2);
  if (M >= limit || N >= limit) throw ContractViolation("factor out of range");
  std::map<std::size_t, int> fixed;
  for (const auto& bit : layout.m_bits) fixed[bit.index] = (M & bit.weight) ? 1 : 0;
  for (const auto& bit : layout.n_bits_in) fixed[bit.index] = (N & bit.weight) ? 1 : 0;
  return fixed;
}

FactorReadout readout_factors(const SpinConfig& config, const CircuitLayout& layout,
                              unsigned P_target) {
  if (config.size() != layout.spin_count())
    throw ContractViolation("config length does not match layout");
  FactorReadout out;
  for (const auto& b : layout.m_bits) out.M += b.weight * config.bit(b.index);
  for (const auto& b : layout.n_bits_in) out.N += b.weight * config.bit(b.index);
  for (const auto& b : layout.p_bits) out.P_read += b.weight * config.bit(b.index);
  out.success = out.M * out.N == P_target;
  std::size_t ok = 0;
  for (const auto& c : layout.chains)
    if (config[c.endpoint_a] == config[c.cq] && config[c.endpoint_b] == config[c.cq]) ++ok;
  out.chain_ok_fraction =
      layout.chains.empty() ? 1.0 : static_cast<double>(ok) / static_cast<double>(layout.chains.size());
  return out;
}

IsingModel coupled_pair(double r, double h_q1, double h_q2) {
  if (r < 0.0 || !std::isfinite(r)) throw ContractViolation("chain strength must be >= 0");
  std::vector<Coupling> couplings;
  if (r > 0.0) couplings = {{0, 1, -r}, {1, 2, -r}};
  return IsingModel(3, {h_q1, 0.0, h_q2}, std::move(couplings), {"Q1", "CQ", "Q2"});
}

IsingModel cq_triple(double r, double bias_q1) { return coupled_pair(r, -bias_q1, 0.0); }

nlohmann::json layout_to_json(const CircuitLayout& layout) {
  using nlohmann::json;
  json roles = json::array();
  for (const auto& e : layout.roles)
    roles.push_back({{"index", e.index},
                     {"mu_row", e.mu_row},
                     {"mu_col", e.mu_col},
                     {"role", to_string(e.role)}});
  json chains = json::array();
  for (const auto& c : layout.chains)
    chains.push_back({{"endpoint_a", c.endpoint_a},
                      {"endpoint_b", c.endpoint_b},
                      {"cq", c.cq},
                      {"strength", c.strength}});
  auto bits = [](const std::vector<WeightedBit>& v) {
    json arr = json::array();
    for (const auto& b : v) arr.push_back({{"index", b.index}, {"weight", b.weight}});
    return arr;
  };
  return {{"n_bits", layout.n_bits},   {"roles", roles},
          {"chains", chains},          {"p_bits", bits(layout.p_bits)},
          {"m_bits", bits(layout.m_bits)}, {"n_bits_in", bits(layout.n_bits_in)},
          {"boundary_zero", layout.boundary_zero}};
}

}  // namespace spinfactor
