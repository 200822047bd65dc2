#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spinfactor/ising.hpp"
#include "spinfactor/spin_logic.hpp"

namespace spinfactor {

enum class QubitRole { X, Y, Z, D, S, C, CQ };

std::string to_string(QubitRole role);
QubitRole role_from_string(const std::string& name);

/// Position of a role inside a multiplier-unit grid cell.
struct MuPort {
  int row = 0;
  int col = 0;
  QubitRole role = QubitRole::X;
  auto operator<=>(const MuPort&) const = default;
};

/// One connection-spin chain endpoint pair.
struct ChainEnds {
  MuPort a;
  MuPort b;
};

/// Q_a -- CQ -- Q_b, both couplings -strength * Jmax.
struct ChainSpec {
  std::size_t endpoint_a = 0;
  std::size_t endpoint_b = 0;
  std::size_t cq = 0;
  double strength = 0.0;  // relative to the MU's largest |J|
};

struct RoleEntry {
  std::size_t index = 0;
  int mu_row = -1;  // -1 for connection spins
  int mu_col = -1;
  QubitRole role = QubitRole::CQ;
};

struct WeightedBit {
  std::size_t index = 0;
  unsigned weight = 0;
};

struct CircuitLayout {
  std::size_t n_bits = 4;
  std::vector<RoleEntry> roles;  // roles[i].index == i
  std::vector<ChainSpec> chains;
  std::vector<WeightedBit> p_bits;     // P4 .. P1
  std::vector<WeightedBit> m_bits;     // X01, X00
  std::vector<WeightedBit> n_bits_in;  // Y11, Y01
  std::vector<std::size_t> boundary_zero;

  std::size_t spin_count() const noexcept { return roles.size(); }
  std::size_t mu_spin(int row, int col, QubitRole role) const;
  std::string label(std::size_t index) const;
};

/// 6(n/2)^2 + n^2 - 2n spins for an n-bit factorizer (n even).
std::size_t factorizer_spin_count(std::size_t n_bits);

inline constexpr double kDefaultChainStrength = 0.25;
/// Chain strength from the qubit/CQ mutual inductance, linear with 12 pH -> 1/4.
constexpr double chain_strength_from_mutual_ph(double m_ph) { return 0.25 * m_ph / 12.0; }
inline constexpr double kRecommendedChainStrength = chain_strength_from_mutual_ph(20.0);

/// The 8 interconnections of the 2x2 multiplier: 4 shared inputs followed
/// by 4 sum/carry propagations.
std::vector<ChainEnds> wiring_4bit();

/// Four copies of the MU Hamiltonian plus one connection spin per chain.
/// MU(row, col) occupies spins 6*(2*row + col) .. +5 in (X, Y, Z, D, S, C)
/// order; connection spins follow in wiring order. The MU model is
/// re-verified against mu_relation() and rejected if it fails.
std::pair<IsingModel, CircuitLayout> build_factorizer(const SynthesisResult& mu, double r);
std::pair<IsingModel, CircuitLayout> build_factorizer(const SynthesisResult& mu, double r,
                                                      const std::vector<ChainEnds>& wiring);

struct ClampSpec {
  unsigned P = 0;
  double alpha = 0.0;
  double beta = 0.0;
  /// Spins receiving the +beta push toward 0. Empty means layout.boundary_zero.
  std::vector<std::size_t> beta_spins;
};

/// Output bits pushed toward the binary digits of P by -/+alpha, boundary
/// spins pushed toward 0 by +beta.
BiasOffsets clamp_offsets(const CircuitLayout& layout, const ClampSpec& clamp);
IsingModel apply_problem(const IsingModel& model, const CircuitLayout& layout,
                         const ClampSpec& clamp);

/// Output spins fixed to the digits of P (spin index -> bit).
std::map<std::size_t, int> product_fixing(const CircuitLayout& layout, unsigned P);
/// Input spins fixed to the digits of M and N.
std::map<std::size_t, int> input_fixing(const CircuitLayout& layout, unsigned M, unsigned N);

struct FactorReadout {
  unsigned M = 0;
  unsigned N = 0;
  unsigned P_read = 0;
  bool success = false;
  double chain_ok_fraction = 0.0;
};

FactorReadout readout_factors(const SpinConfig& config, const CircuitLayout& layout,
                              unsigned P_target);

/// Q1 -- CQ -- Q2 with both couplings -r and independent fields on Q1, Q2.
IsingModel coupled_pair(double r, double h_q1, double h_q2);
/// Q1 biased toward 1 by bias_q1.
IsingModel cq_triple(double r, double bias_q1);

nlohmann::json layout_to_json(const CircuitLayout& layout);

}  // namespace spinfactor
