#include <doctest.h>

#include <cmath>
#include <set>

#include "spinfactor/spin_logic.hpp"

using namespace spinfactor;

namespace {

RelationSpec equality() { return {"eq", 2, {"a", "b"}, {0b00, 0b11}}; }

RelationSpec and_gate() {
  return relation_from_predicate("and", {"x", "y", "z"}, [](std::uint32_t row) {
    const unsigned x = row & 1U, y = (row >> 1) & 1U, z = (row >> 2) & 1U;
    return z == (x & y);
  });
}

unsigned bit(std::uint32_t row, std::size_t v) { return (row >> v) & 1U; }

}  // namespace

TEST_SUITE("spin_logic") {
  TEST_CASE("mu relation rows") {
    const auto mu = mu_relation();
    CHECK(mu.k == 6);
    CHECK(mu.valid.size() == 16);
    for (std::uint32_t row = 0; row < 64; ++row) {
      const unsigned lhs = bit(row, mu::S) + 2 * bit(row, mu::C);
      const unsigned rhs = bit(row, mu::X) * bit(row, mu::Y) + bit(row, mu::Z) + bit(row, mu::D);
      CHECK(mu.contains(row) == (lhs == rhs));
    }
    CHECK(mu.contains(0));
    CHECK(mu.contains(0b111111));
  }

  TEST_CASE("mu relation defines one output per input") {
    const auto mu = mu_relation();
    std::set<std::uint32_t> inputs;
    for (auto row : mu.valid) CHECK(inputs.insert(row & 0b1111U).second);
    CHECK(inputs.size() == 16);
  }

  TEST_CASE("relation contracts") {
    CHECK_THROWS_AS((RelationSpec{"bad", 2, {"a", "b"}, {0, 1, 2, 3}}.validate()),
                    ContractViolation);
    CHECK_THROWS_AS((RelationSpec{"bad", 2, {"a"}, {0}}.validate()), ContractViolation);
    CHECK_THROWS_AS((RelationSpec{"bad", 2, {"a", "b"}, {3, 1}}.validate()), ContractViolation);
  }

  TEST_CASE("equality relation gives ferromagnetic pair") {
    const auto res = synthesize(equality(), 1.0, 8.0);
    CHECK(res.model.h(0) == 0.0);
    CHECK(res.model.h(1) == 0.0);
    CHECK(res.model.coupling(0, 1) == -1.0);
    CHECK(res.gap == doctest::Approx(2.0));
    const auto rep = verify_degenerate_ground(equality(), res.model);
    CHECK(rep.passed);
    CHECK(rep.ground_rows == std::vector<std::uint32_t>{0b00, 0b11});
  }

  TEST_CASE("hand-written ferromagnetic pair verifies") {
    const IsingModel pair(2, {0.0, 0.0}, {{0, 1, -1.0}});
    CHECK(verify_degenerate_ground(equality(), pair).passed);
  }

  TEST_CASE("and relation") {
    const auto rel = and_gate();
    CHECK(rel.valid.size() == 4);
    const auto res = synthesize(rel, 1.0, 8.0);
    const auto rep = verify_degenerate_ground(rel, res.model);
    CHECK(rep.passed);
    CHECK(rep.ground_rows == rel.valid);
    CHECK(res.gap > 0.0);
  }

  TEST_CASE("mu synthesis") {
    const auto rel = mu_relation();
    const auto res = synthesize(rel, 1.0, 8.0);
    CHECK(res.model.max_abs_coefficient() == 1.0);
    CHECK(res.raw_gap >= 1.0);

    std::vector<double> energies(64);
    double e0 = INFINITY;
    for (std::uint32_t row = 0; row < 64; ++row) {
      energies[row] = energy(res.model, config_of_row(row, 6));
      e0 = std::min(e0, energies[row]);
    }
    std::vector<std::uint32_t> ground;
    double excited = INFINITY;
    for (std::uint32_t row = 0; row < 64; ++row) {
      if (std::abs(energies[row] - e0) <= 1e-9)
        ground.push_back(row);
      else
        excited = std::min(excited, energies[row]);
    }
    CHECK(ground == rel.valid);
    CHECK(res.ground_energy == doctest::Approx(e0).epsilon(1e-12));
    CHECK(res.gap == doctest::Approx(excited - e0).epsilon(1e-12));

    const auto rep = verify_degenerate_ground(rel, res.model);
    CHECK(rep.passed);
    CHECK(rep.ground_rows.size() == 16);
    CHECK(rep.valid_spread <= 1e-9);
  }

  TEST_CASE("positive rescaling keeps the ground set") {
    const auto rel = mu_relation();
    const auto res = synthesize(rel);
    for (double c : {0.1, 3.0, 17.5}) {
      std::vector<double> h(res.model.h().begin(), res.model.h().end());
      for (auto& v : h) v *= c;
      std::vector<Coupling> js(res.model.couplings().begin(), res.model.couplings().end());
      for (auto& j : js) j.value *= c;
      CHECK(verify_degenerate_ground(rel, IsingModel(6, h, js)).passed);
    }
  }

  TEST_CASE("perturbed mu model fails verification") {
    const auto rel = mu_relation();
    const auto res = synthesize(rel);
    for (std::size_t i = 0; i < 6; ++i) {
      const auto bad = with_offsets(res.model, {{i, 2.0 * res.gap}});
      const auto rep = verify_degenerate_ground(rel, bad);
      CHECK_FALSE(rep.passed);
      CHECK((rep.valid_not_ground.size() + rep.ground_not_valid.size()) > 0);
    }
  }

  TEST_CASE("infeasible gap target") {
    try {
      synthesize(mu_relation(), 10.0, 1.0);
      FAIL("expected InfeasibleRelation");
    } catch (const InfeasibleRelation& e) {
      CHECK_FALSE(e.certificate().empty());
    }
  }

  TEST_CASE("xor has no pairwise realization") {
    const auto x = relation_from_predicate("xor", {"a", "b", "c"}, [](std::uint32_t row) {
      return (((row & 1U) ^ ((row >> 1) & 1U)) == ((row >> 2) & 1U));
    });
    CHECK_THROWS_AS(synthesize(x, 1e-6, 8.0), InfeasibleRelation);
  }

  TEST_CASE("row and config mapping") {
    for (std::uint32_t row = 0; row < 64; ++row) CHECK(row_of_config(config_of_row(row, 6)) == row);
    CHECK(config_of_row(0b01, 2)[0] == 1);
  }
}
