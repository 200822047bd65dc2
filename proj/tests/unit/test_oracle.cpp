#include <doctest.h>

#include <cmath>
#include <random>

#include "spinfactor/oracle.hpp"
#include "spinfactor/spin_logic.hpp"

using namespace spinfactor;

namespace {

IsingModel random_model(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution edge(0.4);
  std::vector<double> h(n);
  for (auto& v : h) v = u(rng);
  std::vector<Coupling> js;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (edge(rng)) js.push_back({i, j, u(rng)});
  return IsingModel(n, h, js);
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("single spin") {
    const auto rep = ground_states(IsingModel(1, {1.0}, {}));
    CHECK(rep.ground_energy == -1.0);
    REQUIRE(rep.ground_configs.size() == 1);
    CHECK(rep.ground_configs[0][0] == -1);
    CHECK(rep.states_visited == 2);
  }

  TEST_CASE("mu model has sixteen ground configs") {
    const auto mu = synthesize(mu_relation());
    const auto rep = ground_states(mu.model);
    REQUIRE(rep.ground_configs.size() == 16);
    for (const auto& c : rep.ground_configs) CHECK(mu_relation().contains(row_of_config(c)));
    CHECK(rep.ground_energy == doctest::Approx(mu.ground_energy));
  }

  TEST_CASE("matches brute force minimum") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
      const auto m = random_model(rng, 10);
      double best = INFINITY;
      for (std::uint32_t row = 0; row < 1024; ++row)
        best = std::min(best, energy(m, config_of_row(row, 10)));
      const auto rep = ground_states(m);
      CHECK(std::abs(rep.ground_energy - best) <= 1e-9);
      for (const auto& c : rep.ground_configs) CHECK(std::abs(energy(m, c) - best) <= 1e-6);
    }
  }

  TEST_CASE("gray walk energy matches direct recomputation") {
    std::mt19937_64 rng(22);
    const auto m = random_model(rng, 20);
    std::vector<Spin> start(20);
    for (auto& s : start) s = (rng() & 1U) ? 1 : -1;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < 20; ++i)
      if (i % 5 != 0) free.push_back(i);
    GrayWalker walker(m, SpinConfig(start), free);
    CHECK(std::abs(walker.energy() - energy(m, SpinConfig(start))) <= 1e-9);
    const std::uint64_t total = std::uint64_t{1} << free.size();
    std::uniform_int_distribution<std::uint64_t> pick(1, total - 1);
    std::vector<std::uint64_t> checkpoints;
    for (int i = 0; i < 1000; ++i) checkpoints.push_back(pick(rng));
    std::sort(checkpoints.begin(), checkpoints.end());
    std::size_t next = 0, checked = 0;
    for (std::uint64_t c = 1; c < total && next < checkpoints.size(); ++c) {
      walker.step(c);
      while (next < checkpoints.size() && checkpoints[next] == c) {
        const auto cfg = walker.config();
        CHECK(std::abs(walker.energy() - energy(m, cfg)) <= 1e-9);
        CHECK(cfg == walker.config_for(walker.mask()));
        for (std::size_t i = 0; i < 20; i += 5) CHECK(cfg[i] == start[i]);
        ++next;
        ++checked;
      }
    }
    CHECK(checked == 1000);
  }

  TEST_CASE("clamped enumeration") {
    std::mt19937_64 rng(23);
    const auto m = random_model(rng, 8);
    const auto plain = ground_states(m);
    const auto empty = ground_states_clamped(m, {});
    CHECK(plain.ground_energy == empty.ground_energy);
    CHECK(plain.ground_configs == empty.ground_configs);

    const std::map<std::size_t, int> fixed{{1, 1}, {4, 0}};
    const auto rep = ground_states_clamped(m, fixed);
    CHECK(rep.states_visited == 64);
    double best = INFINITY;
    for (std::uint32_t row = 0; row < 256; ++row) {
      if (((row >> 1) & 1U) != 1 || ((row >> 4) & 1U) != 0) continue;
      best = std::min(best, energy(m, config_of_row(row, 8)));
    }
    CHECK(std::abs(rep.ground_energy - best) <= 1e-9);
    for (const auto& c : rep.ground_configs) {
      CHECK(c.bit(1) == 1);
      CHECK(c.bit(4) == 0);
    }

    std::map<std::size_t, int> all;
    for (std::size_t i = 0; i < 8; ++i) all[i] = static_cast<int>(i % 2);
    const auto single = ground_states_clamped(m, all);
    REQUIRE(single.ground_configs.size() == 1);
    CHECK(single.ground_configs[0].bitstring() == "01010101");
    CHECK(single.ground_energy == doctest::Approx(energy(m, single.ground_configs[0])).epsilon(1e-12));

    CHECK_THROWS_AS(ground_states_clamped(m, {{9, 1}}), ContractViolation);
    CHECK_THROWS_AS(ground_states_clamped(m, {{0, 2}}), ContractViolation);
  }

  TEST_CASE("merge fixings") {
    CHECK(merge_fixings({{0, 1}}, {{1, 0}}) == std::map<std::size_t, int>{{0, 1}, {1, 0}});
    CHECK(merge_fixings({{0, 1}}, {{0, 1}}) == std::map<std::size_t, int>{{0, 1}});
    CHECK_THROWS_AS(merge_fixings({{0, 1}}, {{0, 0}}), ContractViolation);
  }

  TEST_CASE("result does not depend on partition count") {
    std::mt19937_64 rng(24);
    const IsingModel flat(12, std::vector<double>(12, 0.0), {{0, 1, -1.0}});
    const auto m = random_model(rng, 16);
    for (const auto& model : {m, flat}) {
      OracleOptions one;
      one.workers = 1;
      OracleOptions many;
      many.workers = 4;
      const auto a = ground_states(model, one);
      const auto b = ground_states(model, many);
      CHECK(a.ground_energy == b.ground_energy);
      CHECK(a.ground_configs == b.ground_configs);
      CHECK(a.states_visited == b.states_visited);
    }
  }

  TEST_CASE("guards") {
    const IsingModel big(30, std::vector<double>(30, 0.1), {});
    CHECK_THROWS_AS(ground_states(big), ContractViolation);
    OracleOptions small;
    small.max_configs = 10;
    const auto rep = ground_states(IsingModel(6, std::vector<double>(6, 0.0), {}), small);
    CHECK(rep.truncated);
    CHECK(rep.ground_configs.size() == 10);
  }

  TEST_CASE("report json") {
    const auto rep = ground_states(IsingModel(2, {0.0, 0.0}, {{0, 1, -1.0}}));
    const auto j = ground_report_json(rep);
    CHECK(j.at("count") == 2);
    CHECK(j.at("configs") == nlohmann::json::array({"00", "11"}));
    CHECK(j.at("ground_energy") == -1.0);
  }
}
