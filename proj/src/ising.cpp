#include "spinfactor/ising.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace spinfactor {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

void require_size(const IsingModel& model, const SpinConfig& config) {
  require(config.size() == model.size(),
          "config length " + std::to_string(config.size()) + " does not match model size " +
              std::to_string(model.size()));
}

}  // namespace

SpinConfig::SpinConfig(std::vector<Spin> spins) : spins_(std::move(spins)) {
  for (Spin s : spins_) require(s == 1 || s == -1, "spin values must be -1 or +1");
}

SpinConfig SpinConfig::from_bitstring(std::string_view bits) {
  std::vector<Spin> spins;
  spins.reserve(bits.size());
  for (char c : bits) {
    require(c == '0' || c == '1', "bitstring may only contain '0' and '1'");
    spins.push_back(spin_of_bit(c == '1'));
  }
  return SpinConfig(std::move(spins));
}

std::string SpinConfig::bitstring() const {
  std::string out(spins_.size(), '0');
  for (std::size_t i = 0; i < spins_.size(); ++i)
    if (spins_[i] > 0) out[i] = '1';
  return out;
}

IsingModel::IsingModel(std::size_t n, std::vector<double> h, std::vector<Coupling> couplings,
                       std::vector<std::string> labels)
    : h_(std::move(h)), couplings_(std::move(couplings)), labels_(std::move(labels)) {
  require(h_.size() == n, "h must have exactly n entries");
  require(labels_.empty() || labels_.size() == n, "labels must be empty or have n entries");
  for (double v : h_) require(std::isfinite(v), "h values must be finite");
  for (auto& c : couplings_) {
    require(c.i < n && c.j < n, "coupling index out of range");
    require(c.i != c.j, "self-coupling is not allowed");
    require(std::isfinite(c.value), "J values must be finite");
    if (c.i > c.j) std::swap(c.i, c.j);
  }
  std::sort(couplings_.begin(), couplings_.end(), [](const Coupling& a, const Coupling& b) {
    return std::pair(a.i, a.j) < std::pair(b.i, b.j);
  });
  for (std::size_t k = 1; k < couplings_.size(); ++k) {
    const auto& a = couplings_[k - 1];
    const auto& b = couplings_[k];
    require(!(a.i == b.i && a.j == b.j),
            "duplicate coupling {" + std::to_string(a.i) + ", " + std::to_string(a.j) + "}");
  }

  std::vector<std::size_t> degree(n, 0);
  for (const auto& c : couplings_) {
    ++degree[c.i];
    ++degree[c.j];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& c : couplings_) {
    adjacency_[fill[c.i]++] = {c.j, c.value};
    adjacency_[fill[c.j]++] = {c.i, c.value};
  }
}

double IsingModel::coupling(std::size_t i, std::size_t j) const {
  require(i < size() && j < size(), "coupling index out of range");
  for (const auto& nb : neighbors(i))
    if (nb.index == j) return nb.coupling;
  return 0.0;
}

double IsingModel::max_abs_coefficient() const noexcept {
  double m = 0.0;
  for (double v : h_) m = std::max(m, std::abs(v));
  for (const auto& c : couplings_) m = std::max(m, std::abs(c.value));
  return m;
}

bool operator==(const IsingModel& a, const IsingModel& b) {
  if (a.h_ != b.h_ || a.labels_ != b.labels_ || a.couplings_.size() != b.couplings_.size())
    return false;
  for (std::size_t k = 0; k < a.couplings_.size(); ++k) {
    const auto& x = a.couplings_[k];
    const auto& y = b.couplings_[k];
    if (x.i != y.i || x.j != y.j || x.value != y.value) return false;
  }
  return true;
}

double energy(const IsingModel& model, const SpinConfig& config) {
  require_size(model, config);
  double e = 0.0;
  const auto h = model.h();
  for (std::size_t i = 0; i < h.size(); ++i) e += h[i] * config[i];
  for (const auto& c : model.couplings()) e += c.value * config[c.i] * config[c.j];
  return e;
}

double delta_energy(const IsingModel& model, const SpinConfig& config, std::size_t k) {
  require_size(model, config);
  require(k < model.size(), "spin index out of range");
  double field = model.h()[k];
  for (const auto& nb : model.neighbors(k)) field += nb.coupling * config[nb.index];
  return -2.0 * config[k] * field;
}

IsingModel with_offsets(const IsingModel& model, const BiasOffsets& offsets) {
  std::vector<double> h(model.h().begin(), model.h().end());
  for (const auto& [i, v] : offsets) {
    require(i < h.size(), "bias offset index out of range");
    require(std::isfinite(v), "bias offsets must be finite");
    h[i] += v;
  }
  const auto cs = model.couplings();
  const auto ls = model.labels();
  return IsingModel(model.size(), std::move(h), {cs.begin(), cs.end()}, {ls.begin(), ls.end()});
}

BiasOffsets negated(const BiasOffsets& offsets) {
  BiasOffsets out;
  for (const auto& [i, v] : offsets) out[i] = -v;
  return out;
}

nlohmann::json model_to_json(const IsingModel& model) {
  nlohmann::json j;
  j["n"] = model.size();
  j["h"] = std::vector<double>(model.h().begin(), model.h().end());
  auto J = nlohmann::json::array();
  for (const auto& c : model.couplings()) J.push_back({c.i, c.j, c.value});
  j["J"] = std::move(J);
  j["labels"] = std::vector<std::string>(model.labels().begin(), model.labels().end());
  return j;
}

IsingModel model_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    auto h = j.at("h").get<std::vector<double>>();
    std::vector<Coupling> couplings;
    for (const auto& entry : j.at("J")) {
      require(entry.is_array() && entry.size() == 3, "J entries must be [i, j, value]");
      couplings.push_back(
          {entry[0].get<std::size_t>(), entry[1].get<std::size_t>(), entry[2].get<double>()});
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return IsingModel(n, std::move(h), std::move(couplings), std::move(labels));
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace spinfactor
