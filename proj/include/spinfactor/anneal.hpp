#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spinfactor/ising.hpp"

namespace spinfactor {

enum class Engine { SA, SVMC };
enum class Interpolation { Geometric, Linear };

std::string to_string(Engine e);
std::string to_string(Interpolation i);
Engine engine_from_string(const std::string& s);
Interpolation interpolation_from_string(const std::string& s);

/// Annealing schedule. One sweep is n single-spin proposals in a fresh
/// random order.
///
/// SA lowers the temperature from t_start to t_end. SVMC ramps the
/// transverse weight A linearly from a_start to 0 and the problem weight B
/// from 0 to b_end, with Metropolis steps at the constant temperature t_end.
struct Schedule {
  Engine engine = Engine::SA;
  std::size_t sweeps = 2000;
  double t_start = 2.0;
  double t_end = 0.05;
  Interpolation interpolation = Interpolation::Geometric;
  double a_start = 2.0;
  double b_end = 1.0;
  double proposal_width = 0.3;  // radians

  void validate() const;
  /// Temperature used during sweep k (0-based).
  double temperature(std::size_t k) const;
  /// Ramp position of sweep k in (0, 1]; the last sweep is at 1.
  double ramp(std::size_t k) const;
};

/// SplitMix64 output function.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

/// 64-bit seed of run `index` under `master`: the (index+1)-th output of a
/// SplitMix64 stream started at `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Per-run generator: a SplitMix64 stream started at the derived seed.
/// Uniform doubles take the top 53 bits; bounded integers use a 128-bit
/// multiply.
class RunRng {
 public:
  explicit RunRng(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept { return splitmix64_mix(state_ += kSplitMixGamma); }
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) noexcept {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

struct AnnealResult {
  SpinConfig config;
  double energy = 0.0;
};

AnnealResult anneal_once(const IsingModel& model, const Schedule& schedule, std::uint64_t seed);

struct SampleRecord {
  SpinConfig config;
  double energy = 0.0;
  std::uint64_t seed = 0;
};

struct SampleSet {
  std::size_t runs = 0;
  std::uint64_t master_seed = 0;
  std::vector<SampleRecord> records;
  /// Final configuration bitstring -> count.
  std::map<std::string, std::size_t> counts;

  /// Counts over the bits at `indices`, keyed by their bitstring in the
  /// given order.
  std::map<std::string, std::size_t> subset_counts(std::span<const std::size_t> indices) const;
};

/// `runs` independent anneals; run i uses derive_seed(master_seed, i).
/// The result does not depend on `workers` (0 = hardware concurrency).
SampleSet sample(const IsingModel& model, const Schedule& schedule, std::size_t runs,
                 std::uint64_t master_seed, unsigned workers = 1);

struct TracePoint {
  std::size_t sweep = 0;
  double energy = 0.0;
  SpinConfig config;
};

/// Snapshot at sweep 0, after every `stride`-th sweep, and at the end. The
/// last point equals anneal_once(model, schedule, seed).
std::vector<TracePoint> trace(const IsingModel& model, const Schedule& schedule, std::uint64_t seed,
                              std::size_t stride);

/// CSV with header `sweep,energy,s0,...,s{n-1}`; spins written as -1/1.
std::string trace_csv(std::span<const TracePoint> points);

namespace detail {
/// Change of the SVMC energy when angle k moves to `new_angle`, given
/// cosines/sines of all current angles.
double svmc_delta(const IsingModel& model, std::span<const double> cosines, std::size_t k,
                  double old_angle, double new_angle, double a, double b);
}  // namespace detail

/// Metropolis rule shared by both engines.
inline bool metropolis_accept(double delta, double temperature, double u) noexcept {
  if (delta <= 0.0) return true;
  const double x = delta / temperature;
  // exp(-x) < 2^-53 here, so only u == 0 can pass.
  if (x > 40.0) return u == 0.0 && std::exp(-x) > 0.0;
  return u < std::exp(-x);
}

}  // namespace spinfactor
