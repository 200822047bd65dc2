#include <doctest.h>

#include <cmath>
#include <random>

#include "spinfactor/ising.hpp"

using namespace spinfactor;

namespace {

IsingModel ferro_pair() { return IsingModel(2, {0.0, 0.0}, {{0, 1, -1.0}}); }

double brute_energy(const IsingModel& m, const SpinConfig& s) {
  double e = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) e += m.h(i) * s[i];
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) e += m.coupling(i, j) * s[i] * s[j];
  return e;
}

IsingModel random_model(std::mt19937_64& rng, std::size_t n, bool with_h) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution edge(0.5);
  std::vector<double> h(n, 0.0);
  if (with_h)
    for (auto& v : h) v = u(rng);
  std::vector<Coupling> js;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (edge(rng)) js.push_back({i, j, u(rng)});
  return IsingModel(n, h, js);
}

SpinConfig random_config(std::mt19937_64& rng, std::size_t n) {
  std::bernoulli_distribution b(0.5);
  std::vector<Spin> s(n);
  for (auto& v : s) v = b(rng) ? 1 : -1;
  return SpinConfig(s);
}

}  // namespace

TEST_SUITE("ising") {
  TEST_CASE("energy examples") {
    CHECK(energy(IsingModel(1, {0.0}, {}), SpinConfig::from_bitstring("1")) == 0.0);
    CHECK(energy(IsingModel(1, {1.0}, {}), SpinConfig::from_bitstring("0")) == -1.0);
    CHECK(energy(ferro_pair(), SpinConfig::from_bitstring("11")) == -1.0);
  }

  TEST_CASE("energy rejects length mismatch") {
    CHECK_THROWS_AS(energy(ferro_pair(), SpinConfig::from_bitstring("1")), ContractViolation);
  }

  TEST_CASE("delta examples") {
    CHECK(delta_energy(IsingModel(1, {1.0}, {}), SpinConfig::from_bitstring("0"), 0) == 2.0);
    CHECK(delta_energy(ferro_pair(), SpinConfig::from_bitstring("11"), 0) == 2.0);
    CHECK_THROWS_AS(delta_energy(ferro_pair(), SpinConfig::from_bitstring("11"), 2),
                    ContractViolation);
  }

  TEST_CASE("delta matches full energy difference") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto m = random_model(rng, 8, true);
      auto s = random_config(rng, 8);
      const std::size_t k = rng() % 8;
      const double d = delta_energy(m, s, k);
      const double before = energy(m, s);
      s.flip(k);
      CHECK(std::abs(d - (energy(m, s) - before)) <= 1e-12);
    }
  }

  TEST_CASE("energy matches pairwise sum") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      const auto m = random_model(rng, 6, true);
      const auto s = random_config(rng, 6);
      CHECK(energy(m, s) == doctest::Approx(brute_energy(m, s)).epsilon(1e-12));
    }
  }

  TEST_CASE("global flip invariance without fields") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
      const auto m = random_model(rng, 7, false);
      auto s = random_config(rng, 7);
      const double e = energy(m, s);
      for (std::size_t k = 0; k < 7; ++k) s.flip(k);
      CHECK(std::abs(energy(m, s) - e) <= 1e-12);
    }
  }

  TEST_CASE("couplings are order independent") {
    const IsingModel a(3, {0.1, 0.2, 0.3}, {{0, 1, 0.5}, {2, 1, -0.25}});
    const IsingModel b(3, {0.1, 0.2, 0.3}, {{1, 2, -0.25}, {1, 0, 0.5}});
    CHECK(a == b);
    CHECK(a.coupling(2, 1) == -0.25);
    CHECK(a.coupling(0, 2) == 0.0);
  }

  TEST_CASE("constructor contracts") {
    CHECK_THROWS_AS(IsingModel(2, {0.0}, {}), ContractViolation);
    CHECK_THROWS_AS(IsingModel(2, {0.0, 0.0}, {{0, 0, 1.0}}), ContractViolation);
    CHECK_THROWS_AS(IsingModel(2, {0.0, 0.0}, {{0, 2, 1.0}}), ContractViolation);
    CHECK_THROWS_AS(IsingModel(2, {0.0, 0.0}, {{0, 1, 1.0}, {1, 0, 1.0}}), ContractViolation);
    CHECK_THROWS_AS(IsingModel(1, {std::nan("")}, {}), ContractViolation);
    CHECK_THROWS_AS(SpinConfig::from_bitstring("012"), ContractViolation);
  }

  TEST_CASE("with_offsets") {
    const IsingModel m(1, {1.0}, {});
    CHECK(with_offsets(m, {}) == m);
    CHECK(with_offsets(m, {{0, -0.5}}).h(0) == 0.5);
    CHECK_THROWS_AS(with_offsets(m, {{1, 0.5}}), ContractViolation);

    std::mt19937_64 rng(10);
    const auto big = random_model(rng, 6, true);
    BiasOffsets offs;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < 6; i += 2) offs[i] = u(rng);
    const auto back = with_offsets(with_offsets(big, offs), negated(offs));
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(back.h(i) - big.h(i)) <= 1e-12);
    CHECK(back.couplings().size() == big.couplings().size());
  }

  TEST_CASE("json round trip") {
    const IsingModel m(3, {0.125, -1.0, 0.0}, {{0, 2, -0.5}, {1, 2, 0.75}}, {"a", "b", "c"});
    const auto j = model_to_json(m);
    CHECK(model_from_json(j) == m);
    CHECK(model_from_json(nlohmann::json::parse(j.dump())) == m);
  }

  TEST_CASE("bitstring mapping") {
    const auto s = SpinConfig::from_bitstring("10");
    CHECK(s[0] == 1);
    CHECK(s[1] == -1);
    CHECK(s.bitstring() == "10");
    CHECK(SpinConfig::zeros(3).bitstring() == "000");
  }
}
