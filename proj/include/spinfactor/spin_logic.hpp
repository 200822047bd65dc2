#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinfactor/ising.hpp"

namespace spinfactor {

/// A Boolean relation over k variables. Rows are bit masks where bit v is
/// the value of variable v.
struct RelationSpec {
  std::string name;
  std::size_t k = 0;
  std::vector<std::string> names;
  std::vector<std::uint32_t> valid;  // sorted, unique

  bool contains(std::uint32_t row) const;
  /// Throws ContractViolation unless 0 < |valid| < 2^k, names match k, k <= 24.
  void validate() const;
};

/// Builds a relation from a predicate over all 2^k rows.
RelationSpec relation_from_predicate(std::string name, std::vector<std::string> names,
                                     const std::function<bool(std::uint32_t)>& pred);

/// Multiplier unit: variables (X, Y, Z, D, S, C), valid iff S + 2C = X*Y + Z + D.
RelationSpec mu_relation();

namespace mu {
inline constexpr std::size_t X = 0, Y = 1, Z = 2, D = 3, S = 4, C = 5;
}

struct SynthesisResult {
  std::string relation_name;
  /// Normalized so the largest |h| or |J| equals 1.
  IsingModel model;
  double ground_energy = 0.0;
  /// Lowest invalid-row energy minus ground_energy, in normalized units.
  double gap = 0.0;
  double coeff_bound = 0.0;
  /// Gap achieved by the LP before normalization (>= gap_target).
  double raw_gap = 0.0;
};

/// The relation has no pairwise Ising realization meeting the requested
/// gap within the coefficient bound.
class InfeasibleRelation : public std::runtime_error {
 public:
  InfeasibleRelation(const std::string& what, std::string certificate)
      : std::runtime_error(what), certificate_(std::move(certificate)) {}
  const std::string& certificate() const noexcept { return certificate_; }

 private:
  std::string certificate_;
};

/// The LP solver stopped without a verdict (pivot limit).
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ground-state spin logic synthesis.
///
/// Solves, in exact rational arithmetic, for h, J and E0 such that every
/// valid row has energy E0 and every invalid row has energy >= E0 + g with
/// |h|, |J| <= coeff_bound, maximizing g. Fails with InfeasibleRelation
/// when the best g is below gap_target. The returned model is rescaled so
/// its largest coefficient has magnitude 1.
SynthesisResult synthesize(const RelationSpec& rel, double gap_target = 1.0,
                           double coeff_bound = 8.0);

struct VerificationReport {
  bool passed = false;
  /// Minimum-energy set equals the valid set.
  bool ground_set_matches = false;
  double ground_energy = 0.0;
  double gap = 0.0;
  /// max - min energy across valid rows.
  double valid_spread = 0.0;
  std::vector<std::uint32_t> ground_rows;
  std::vector<std::uint32_t> valid_not_ground;
  std::vector<std::uint32_t> ground_not_valid;

  std::string summary() const;
};

/// Exhaustively enumerates all 2^k configurations of `model` (k <= 24) and
/// checks that its minimum-energy set is exactly rel.valid.
VerificationReport verify_degenerate_ground(const RelationSpec& rel, const IsingModel& model,
                                            double tol = 1e-9);

/// Row mask -> configuration (bit v of row is spin v).
SpinConfig config_of_row(std::uint32_t row, std::size_t k);
std::uint32_t row_of_config(const SpinConfig& config);

nlohmann::json synthesis_sidecar_json(const SynthesisResult& result);
nlohmann::json verification_json(const RelationSpec& rel, const VerificationReport& report);

}  // namespace spinfactor
