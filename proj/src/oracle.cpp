#include "spinfactor/oracle.hpp"

#include <atomic>
#include <algorithm>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

namespace spinfactor {

GrayWalker::GrayWalker(const IsingModel& model, const SpinConfig& start, std::vector<std::size_t> free)
    : model_(&model), free_(std::move(free)), base_(start) {
  if (start.size() != model.size()) throw ContractViolation("start config length mismatch");
  if (free_.size() > 63) throw ContractViolation("too many free spins for a 64-bit walk");
  std::vector<std::int64_t> pos_of(model.size(), -1);
  for (std::size_t k = 0; k < free_.size(); ++k) {
    if (free_[k] >= model.size()) throw ContractViolation("free spin index out of range");
    pos_of[free_[k]] = static_cast<std::int64_t>(k);
  }
  spin_.resize(free_.size());
  field_.resize(free_.size());
  offsets_.assign(free_.size() + 1, 0);
  for (std::size_t k = 0; k < free_.size(); ++k) {
    const std::size_t i = free_[k];
    spin_[k] = start[i];
    if (start[i] > 0) mask_ |= std::uint64_t{1} << k;
    double f = model.h()[i];
    for (const auto& nb : model.neighbors(i)) {
      f += nb.coupling * start[nb.index];
      if (pos_of[nb.index] >= 0)
        adj_.push_back({static_cast<std::uint32_t>(pos_of[nb.index]), 2.0 * nb.coupling});
    }
    field_[k] = f;
    offsets_[k + 1] = adj_.size();
  }
  energy_ = spinfactor::energy(model, start);
}

void GrayWalker::resync() {
  const SpinConfig current = config();
  energy_ = spinfactor::energy(*model_, current);
  for (std::size_t k = 0; k < free_.size(); ++k) {
    double f = model_->h()[free_[k]];
    for (const auto& nb : model_->neighbors(free_[k])) f += nb.coupling * current[nb.index];
    field_[k] = f;
  }
}

SpinConfig GrayWalker::config_for(std::uint64_t mask) const {
  SpinConfig out = base_;
  for (std::size_t k = 0; k < free_.size(); ++k) out.set_bit(free_[k], (mask >> k) & 1U);
  return out;
}

SpinConfig GrayWalker::config() const { return config_for(mask_); }

std::map<std::size_t, int> merge_fixings(const std::map<std::size_t, int>& a,
                                         const std::map<std::size_t, int>& b) {
  auto out = a;
  for (const auto& [i, bit] : b) {
    auto [it, inserted] = out.emplace(i, bit);
    if (!inserted && it->second != bit)
      throw ContractViolation("conflicting fixed assignments for spin " + std::to_string(i));
  }
  return out;
}

namespace {

struct Candidate {
  SpinConfig config;
  double energy;
};

struct PartitionResult {
  double best = std::numeric_limits<double>::infinity();
  std::vector<Candidate> candidates;
  std::uint64_t visited = 0;
  bool truncated = false;
};

void prune(std::vector<Candidate>& c, double threshold) {
  std::erase_if(c, [threshold](const Candidate& x) { return x.energy > threshold; });
}

PartitionResult enumerate_partition(const IsingModel& model, SpinConfig start,
                                    const std::vector<std::size_t>& inner, double eps,
                                    std::size_t cap) {
  GrayWalker walker(model, start, inner);
  PartitionResult res;
  std::vector<std::pair<std::uint64_t, double>> hits;
  double best = walker.energy();
  double threshold = best + eps;
  hits.emplace_back(walker.mask(), walker.energy());
  const std::uint64_t total = std::uint64_t{1} << inner.size();
  for (std::uint64_t step = 1; step < total; ++step) {
    walker.step(step);
    const double e = walker.energy();
    if (e > threshold) continue;
    if (e < best) {
      best = e;
      threshold = best + eps;
      std::erase_if(hits, [threshold](const auto& h) { return h.second > threshold; });
    }
    if (hits.size() < cap)
      hits.emplace_back(walker.mask(), e);
    else
      res.truncated = true;
  }
  res.visited = total;
  res.best = best;
  for (const auto& [mask, e] : hits) res.candidates.push_back({walker.config_for(mask), e});
  return res;
}

}  // namespace

GroundReport ground_states_clamped(const IsingModel& model, const std::map<std::size_t, int>& fixed,
                                   const OracleOptions& opts) {
  const std::size_t n = model.size();
  for (const auto& [i, bit] : fixed) {
    if (i >= n) throw ContractViolation("fixed spin index out of range");
    if (bit != 0 && bit != 1) throw ContractViolation("fixed values must be bits (0 or 1)");
  }
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i)
    if (!fixed.contains(i)) free.push_back(i);
  if (free.size() > opts.guard_max_n)
    throw ContractViolation(std::to_string(free.size()) + " free spins exceed the oracle guard of " +
                            std::to_string(opts.guard_max_n));
  if (free.size() > 28 && !opts.allow_large)
    throw ContractViolation("more than 28 free spins requires allow_large");

  SpinConfig start = SpinConfig::zeros(n);
  for (const auto& [i, bit] : fixed) start.set_bit(i, bit);

  // The last `outer` free spins are fixed per partition; partitions are
  // enumerated independently and merged.
  unsigned workers = opts.workers ? opts.workers : std::max(1U, std::thread::hardware_concurrency());
  std::size_t outer = 0;
  while (outer < free.size() && (std::size_t{1} << outer) < 4 * static_cast<std::size_t>(workers) &&
         free.size() - outer > 12)
    ++outer;
  if (workers == 1) outer = 0;
  const std::vector<std::size_t> inner(free.begin(), free.end() - static_cast<std::ptrdiff_t>(outer));
  const std::size_t parts = std::size_t{1} << outer;

  std::vector<PartitionResult> results(parts);
  auto run = [&](std::size_t p) {
    SpinConfig s = start;
    for (std::size_t b = 0; b < outer; ++b) s.set_bit(free[inner.size() + b], (p >> b) & 1U);
    results[p] = enumerate_partition(model, std::move(s), inner, opts.epsilon, opts.max_configs);
  };
  if (workers == 1 || parts == 1) {
    for (std::size_t p = 0; p < parts; ++p) run(p);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, parts); ++w)
      pool.emplace_back([&] {
        for (std::size_t p; (p = next.fetch_add(1)) < parts;) run(p);
      });
  }

  GroundReport rep;
  rep.fixed = fixed;
  rep.epsilon = opts.epsilon;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    best = std::min(best, r.best);
    rep.states_visited += r.visited;
    rep.truncated = rep.truncated || r.truncated;
  }
  // Re-evaluate survivors directly so the reported energies do not depend
  // on the partitioning.
  std::vector<Candidate> merged;
  for (auto& r : results)
    for (auto& c : r.candidates)
      if (c.energy <= best + opts.epsilon) merged.push_back({c.config, energy(model, c.config)});
  double exact_best = std::numeric_limits<double>::infinity();
  for (const auto& c : merged) exact_best = std::min(exact_best, c.energy);
  prune(merged, exact_best + opts.epsilon);
  std::sort(merged.begin(), merged.end(),
            [](const Candidate& a, const Candidate& b) { return a.config < b.config; });
  if (merged.size() > opts.max_configs) {
    merged.resize(opts.max_configs);
    rep.truncated = true;
  }
  rep.ground_energy = exact_best;
  for (auto& c : merged) rep.ground_configs.push_back(std::move(c.config));
  return rep;
}

GroundReport ground_states(const IsingModel& model, const OracleOptions& opts) {
  return ground_states_clamped(model, {}, opts);
}

nlohmann::json ground_report_json(const GroundReport& report) {
  nlohmann::json configs = nlohmann::json::array();
  for (const auto& c : report.ground_configs) configs.push_back(c.bitstring());
  nlohmann::json fixed = nlohmann::json::object();
  for (const auto& [i, bit] : report.fixed) fixed[std::to_string(i)] = bit;
  return {{"ground_energy", report.ground_energy},
          {"count", report.ground_configs.size()},
          {"configs", configs},
          {"fixed", fixed},
          {"epsilon", report.epsilon},
          {"states_visited", report.states_visited},
          {"truncated", report.truncated}};
}

}  // namespace spinfactor
