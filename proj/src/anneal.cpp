#include "spinfactor/anneal.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

namespace spinfactor {

std::string to_string(Engine e) { return e == Engine::SA ? "SA" : "SVMC"; }
std::string to_string(Interpolation i) {
  return i == Interpolation::Geometric ? "geometric" : "linear";
}

Engine engine_from_string(const std::string& s) {
  if (s == "SA" || s == "sa") return Engine::SA;
  if (s == "SVMC" || s == "svmc") return Engine::SVMC;
  throw ContractViolation("unknown engine '" + s + "'");
}

Interpolation interpolation_from_string(const std::string& s) {
  if (s == "geometric") return Interpolation::Geometric;
  if (s == "linear") return Interpolation::Linear;
  throw ContractViolation("unknown interpolation '" + s + "'");
}

void Schedule::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (sweeps < 1) throw ContractViolation("schedule needs at least one sweep");
  if (!positive(t_start) || !positive(t_end) || t_start < t_end)
    throw ContractViolation("temperatures must satisfy t_start >= t_end > 0");
  if (!positive(a_start) || !positive(b_end))
    throw ContractViolation("a_start and b_end must be finite and positive");
  if (!positive(proposal_width)) throw ContractViolation("proposal_width must be positive");
}

double Schedule::temperature(std::size_t k) const {
  const double frac =
      sweeps == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(sweeps - 1);
  if (interpolation == Interpolation::Geometric)
    return t_start * std::pow(t_end / t_start, frac);
  return t_start + (t_end - t_start) * frac;
}

double Schedule::ramp(std::size_t k) const {
  return static_cast<double>(k + 1) / static_cast<double>(sweeps);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64_mix(master + (index + 1) * kSplitMixGamma);
}

namespace detail {

double svmc_delta(const IsingModel& model, std::span<const double> cosines, std::size_t k,
                  double old_angle, double new_angle, double a, double b) {
  double field = model.h()[k];
  for (const auto& nb : model.neighbors(k)) field += nb.coupling * cosines[nb.index];
  return -a * (std::sin(new_angle) - std::sin(old_angle)) +
         b * (std::cos(new_angle) - cosines[k]) * field;
}

}  // namespace detail

namespace {

using Observer = std::function<void(std::size_t sweep, const SpinConfig& config)>;

void shuffle(std::vector<std::size_t>& order, RunRng& rng) {
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
}

SpinConfig to_config(const std::vector<double>& spins) {
  std::vector<Spin> out(spins.size());
  for (std::size_t i = 0; i < spins.size(); ++i) out[i] = spins[i] > 0 ? Spin{1} : Spin{-1};
  return SpinConfig(std::move(out));
}

SpinConfig run_sa(const IsingModel& model, const Schedule& sch, RunRng& rng, std::size_t stride,
                  const Observer& observe) {
  const std::size_t n = model.size();
  std::vector<double> s(n);
  for (auto& v : s) v = (rng.next() >> 63) ? 1.0 : -1.0;
  std::vector<double> field(model.h().begin(), model.h().end());
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& nb : model.neighbors(i)) field[i] += nb.coupling * s[nb.index];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  if (observe) observe(0, to_config(s));
  for (std::size_t k = 0; k < sch.sweeps; ++k) {
    const double t = sch.temperature(k);
    shuffle(order, rng);
    for (std::size_t i : order) {
      const double delta = -2.0 * s[i] * field[i];
      if (!metropolis_accept(delta, t, delta > 0.0 ? rng.uniform() : 0.0)) continue;
      const double old = s[i];
      s[i] = -old;
      for (const auto& nb : model.neighbors(i)) field[nb.index] -= 2.0 * nb.coupling * old;
    }
    if (observe && (k + 1) % stride == 0 && k + 1 != sch.sweeps) observe(k + 1, to_config(s));
  }
  return to_config(s);
}

SpinConfig run_svmc(const IsingModel& model, const Schedule& sch, RunRng& rng, std::size_t stride,
                    const Observer& observe) {
  constexpr double kPi = std::numbers::pi;
  const std::size_t n = model.size();
  std::vector<double> theta(n, kPi / 2), cosv(n, std::cos(kPi / 2)), sinv(n, 1.0);
  std::vector<double> field(model.h().begin(), model.h().end());
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& nb : model.neighbors(i)) field[i] += nb.coupling * cosv[nb.index];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const double temperature = sch.t_end;

  auto snapshot = [&] {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = cosv[i] < -1e-12 ? -1.0 : 1.0;
    return to_config(s);
  };

  if (observe) observe(0, snapshot());
  for (std::size_t k = 0; k < sch.sweeps; ++k) {
    const double r = sch.ramp(k);
    const double a = sch.a_start * (1.0 - r);
    const double b = sch.b_end * r;
    shuffle(order, rng);
    for (std::size_t i : order) {
      const double proposal =
          std::clamp(theta[i] + sch.proposal_width * (2.0 * rng.uniform() - 1.0), 0.0, kPi);
      const double c = std::cos(proposal);
      const double sn = std::sin(proposal);
      const double delta = -a * (sn - sinv[i]) + b * (c - cosv[i]) * field[i];
      if (!metropolis_accept(delta, temperature, delta > 0.0 ? rng.uniform() : 0.0)) continue;
      const double dc = c - cosv[i];
      theta[i] = proposal;
      cosv[i] = c;
      sinv[i] = sn;
      for (const auto& nb : model.neighbors(i)) field[nb.index] += nb.coupling * dc;
    }
    if (observe && (k + 1) % stride == 0 && k + 1 != sch.sweeps) observe(k + 1, snapshot());
  }
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(cosv[i]) < 1e-12)
      s[i] = (rng.next() >> 63) ? 1.0 : -1.0;
    else
      s[i] = cosv[i] > 0 ? 1.0 : -1.0;
  }
  return to_config(s);
}

AnnealResult run(const IsingModel& model, const Schedule& schedule, std::uint64_t seed,
                 std::size_t stride, const Observer& observe) {
  schedule.validate();
  if (model.size() == 0) throw ContractViolation("cannot anneal an empty model");
  RunRng rng(seed);
  SpinConfig final_config = schedule.engine == Engine::SA
                                ? run_sa(model, schedule, rng, stride, observe)
                                : run_svmc(model, schedule, rng, stride, observe);
  const double e = energy(model, final_config);
  if (observe) observe(schedule.sweeps, final_config);
  return {std::move(final_config), e};
}

}  // namespace

AnnealResult anneal_once(const IsingModel& model, const Schedule& schedule, std::uint64_t seed) {
  return run(model, schedule, seed, 1, nullptr);
}

std::map<std::string, std::size_t> SampleSet::subset_counts(std::span<const std::size_t> indices) const {
  std::map<std::string, std::size_t> out;
  std::string key(indices.size(), '0');
  for (const auto& r : records) {
    for (std::size_t k = 0; k < indices.size(); ++k) key[k] = r.config.bit(indices[k]) ? '1' : '0';
    ++out[key];
  }
  return out;
}

SampleSet sample(const IsingModel& model, const Schedule& schedule, std::size_t runs,
                 std::uint64_t master_seed, unsigned workers) {
  if (runs < 1) throw ContractViolation("runs must be >= 1");
  schedule.validate();
  SampleSet set;
  set.runs = runs;
  set.master_seed = master_seed;
  set.records.resize(runs);
  auto one = [&](std::size_t i) {
    const auto seed = derive_seed(master_seed, i);
    auto res = anneal_once(model, schedule, seed);
    set.records[i] = {std::move(res.config), res.energy, seed};
  };
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  if (workers == 1 || runs == 1) {
    for (std::size_t i = 0; i < runs; ++i) one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, runs); ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < runs;) one(i);
      });
  }
  for (const auto& r : set.records) ++set.counts[r.config.bitstring()];
  return set;
}

std::vector<TracePoint> trace(const IsingModel& model, const Schedule& schedule, std::uint64_t seed,
                              std::size_t stride) {
  if (stride < 1) throw ContractViolation("trace stride must be >= 1");
  std::vector<TracePoint> points;
  run(model, schedule, seed, stride, [&](std::size_t sweep, const SpinConfig& c) {
    points.push_back({sweep, energy(model, c), c});
  });
  return points;
}

std::string trace_csv(std::span<const TracePoint> points) {
  std::string out = "sweep,energy";
  const std::size_t n = points.empty() ? 0 : points.front().config.size();
  for (std::size_t i = 0; i < n; ++i) out += ",s" + std::to_string(i);
  out += '\n';
  char buf[64];
  for (const auto& p : points) {
    out += std::to_string(p.sweep);
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p.energy);
    out += ',';
    out.append(buf, end);
    for (Spin s : p.config.spins()) out += s > 0 ? ",1" : ",-1";
    out += '\n';
  }
  return out;
}

}  // namespace spinfactor
