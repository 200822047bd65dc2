#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace spinfactor {

/// Raised when a caller breaks an operation's precondition (bad index,
/// length mismatch, non-finite coefficient, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Spin = std::int8_t;

/// Bit 1 maps to spin +1, bit 0 to spin -1.
constexpr Spin spin_of_bit(int bit) noexcept { return bit ? Spin{1} : Spin{-1}; }
constexpr int bit_of_spin(Spin s) noexcept { return s > 0 ? 1 : 0; }

/// Fixed-length vector of +/-1 spins.
class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(std::vector<Spin> spins);
  /// All spins -1 (all bits 0).
  static SpinConfig zeros(std::size_t n) { return SpinConfig(std::vector<Spin>(n, Spin{-1})); }
  /// Characters '0'/'1', index 0 first.
  static SpinConfig from_bitstring(std::string_view bits);

  std::size_t size() const noexcept { return spins_.size(); }
  Spin operator[](std::size_t k) const noexcept { return spins_[k]; }
  int bit(std::size_t k) const noexcept { return bit_of_spin(spins_[k]); }
  std::span<const Spin> spins() const noexcept { return spins_; }

  void flip(std::size_t k) noexcept { spins_[k] = static_cast<Spin>(-spins_[k]); }
  void set_bit(std::size_t k, int bit) noexcept { spins_[k] = spin_of_bit(bit); }

  std::string bitstring() const;

  auto operator<=>(const SpinConfig&) const = default;

 private:
  std::vector<Spin> spins_;
};

struct Coupling {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
};

struct Neighbor {
  std::size_t index = 0;
  double coupling = 0.0;
};

/// Classical Ising Hamiltonian E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j.
///
/// Couplings are stored once per unordered pair with i < j; inserting the
/// same pair twice (in either order) is rejected. The model is immutable
/// after construction; an adjacency list is built up front so that single
/// flip energy changes cost O(degree).
class IsingModel {
 public:
  IsingModel() = default;
  IsingModel(std::size_t n, std::vector<double> h, std::vector<Coupling> couplings,
             std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return h_.size(); }
  std::span<const double> h() const noexcept { return h_; }
  double h(std::size_t i) const { return h_.at(i); }
  /// Sorted by (i, j), i < j.
  std::span<const Coupling> couplings() const noexcept { return couplings_; }
  /// Zero when the pair is not coupled.
  double coupling(std::size_t i, std::size_t j) const;
  std::span<const Neighbor> neighbors(std::size_t i) const noexcept {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::span<const std::string> labels() const noexcept { return labels_; }

  double max_abs_coefficient() const noexcept;

  friend bool operator==(const IsingModel& a, const IsingModel& b);

 private:
  std::vector<double> h_;
  std::vector<Coupling> couplings_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
};

/// Sparse additive bias shifts, spin index -> delta h.
using BiasOffsets = std::map<std::size_t, double>;

double energy(const IsingModel& model, const SpinConfig& config);

/// E(config with spin k flipped) - E(config).
double delta_energy(const IsingModel& model, const SpinConfig& config, std::size_t k);

/// New model with h_i += offsets[i]; J untouched.
IsingModel with_offsets(const IsingModel& model, const BiasOffsets& offsets);

BiasOffsets negated(const BiasOffsets& offsets);

// JSON: {"n", "h": [...], "J": [[i, j, v], ...], "labels": [...]}.
nlohmann::json model_to_json(const IsingModel& model);
IsingModel model_from_json(const nlohmann::json& j);

}  // namespace spinfactor
