#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <json.hpp>

#include "spinfactor/ising.hpp"

namespace spinfactor {

struct OracleOptions {
  /// Configurations within epsilon of the minimum count as ground states.
  double epsilon = 1e-6;
  std::size_t guard_max_n = 32;
  /// Free spin counts above 28 take minutes; they must be requested explicitly.
  bool allow_large = false;
  std::size_t max_configs = 100000;
  /// Concurrent partitions; 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
};

struct GroundReport {
  double ground_energy = 0.0;
  std::vector<SpinConfig> ground_configs;  // sorted by bitstring
  std::uint64_t states_visited = 0;
  std::map<std::size_t, int> fixed;
  double epsilon = 0.0;
  bool truncated = false;
};

/// Exhaustive minimum over all 2^n configurations.
GroundReport ground_states(const IsingModel& model, const OracleOptions& opts = {});

/// Exhaustive minimum over the free spins with `fixed` spins held at the
/// given bits. Energies include every term touching fixed spins.
GroundReport ground_states_clamped(const IsingModel& model, const std::map<std::size_t, int>& fixed,
                                   const OracleOptions& opts = {});

/// Union of two fixings; throws ContractViolation if they disagree on a spin.
std::map<std::size_t, int> merge_fixings(const std::map<std::size_t, int>& a,
                                         const std::map<std::size_t, int>& b);

nlohmann::json ground_report_json(const GroundReport& report);

/// Walks the free spins of a model in reflected Gray-code order, keeping
/// the energy and every free spin's local field current after each flip.
/// Energy and fields are recomputed from scratch every 2^16 steps so that
/// rounding does not accumulate over long walks. The model must outlive
/// the walker.
class GrayWalker {
 public:
  static constexpr std::uint64_t kResyncInterval = std::uint64_t{1} << 16;

  /// `start` supplies the values of all spins; `free` lists the spins that
  /// the walk may flip (at most 63).
  GrayWalker(const IsingModel& model, const SpinConfig& start, std::vector<std::size_t> free);

  /// Applies the flip for Gray-code step `counter` (1-based), i.e. flips free
  /// spin countr_zero(counter).
  void step(std::uint64_t counter) noexcept {
    const auto k = static_cast<std::size_t>(std::countr_zero(counter));
    const double s = spin_[k];
    energy_ -= 2.0 * s * field_[k];
    spin_[k] = -s;
    const std::size_t end = offsets_[k + 1];
    for (std::size_t e = offsets_[k]; e < end; ++e) field_[adj_[e].pos] -= adj_[e].two_j * s;
    mask_ ^= std::uint64_t{1} << k;
    if ((counter & (kResyncInterval - 1)) == 0) resync();
  }

  /// Recomputes the energy and local fields of the current configuration.
  void resync();

  double energy() const noexcept { return energy_; }
  /// Bit k set iff free spin k is currently +1.
  std::uint64_t mask() const noexcept { return mask_; }
  std::size_t free_count() const noexcept { return free_.size(); }
  SpinConfig config() const;
  SpinConfig config_for(std::uint64_t mask) const;

 private:
  struct Edge {
    std::uint32_t pos;
    double two_j;
  };
  const IsingModel* model_;
  std::vector<std::size_t> free_;
  SpinConfig base_;
  std::vector<double> spin_;
  std::vector<double> field_;
  std::vector<std::size_t> offsets_;
  std::vector<Edge> adj_;
  double energy_ = 0.0;
  std::uint64_t mask_ = 0;
};

}  // namespace spinfactor
