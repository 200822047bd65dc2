#include "spinfactor/experiments/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spinfactor::experiments {

double chi_square_uniform(std::span<const std::size_t> counts, std::size_t total) {
  if (counts.empty() || total == 0) throw std::invalid_argument("chi-square needs bins and samples");
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double chi2 = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  return chi2;
}

std::vector<double> isotonic_non_increasing(std::span<const double> values) {
  struct Block {
    double sum;
    std::size_t n;
    double mean() const { return sum / static_cast<double>(n); }
  };
  std::vector<Block> blocks;
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() < blocks.back().mean()) {
      auto last = blocks.back();
      blocks.pop_back();
      blocks.back().sum += last.sum;
      blocks.back().n += last.n;
    }
  }
  std::vector<double> fit;
  for (const auto& b : blocks) fit.insert(fit.end(), b.n, b.mean());
  return fit;
}

bool non_increasing_within_noise(std::span<const double> rates, std::size_t runs, double z) {
  const auto fit = isotonic_non_increasing(rates);
  const double n = static_cast<double>(runs);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double var = std::max(fit[i] * (1.0 - fit[i]), 1.0 / n) / n;
    if (std::abs(rates[i] - fit[i]) > z * std::sqrt(var)) return false;
  }
  return true;
}

double gray_zone_width(std::span<const double> xs, const std::vector<std::vector<double>>& probs,
                       double threshold) {
  if (xs.size() != probs.size() || xs.size() < 2)
    throw std::invalid_argument("gray zone needs at least two grid points with probabilities");
  constexpr int kSub = 2000;
  double width = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double dx = (xs[k + 1] - xs[k]) / kSub;
    for (int m = 0; m < kSub; ++m) {
      const double t = (m + 0.5) / kSub;
      double best = 0.0;
      for (std::size_t s = 0; s < probs[k].size(); ++s)
        best = std::max(best, (1.0 - t) * probs[k][s] + t * probs[k + 1][s]);
      if (best < threshold) width += std::abs(dx);
    }
  }
  return width;
}

double crossing_point(std::span<const double> xs, std::span<const double> p, double level) {
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double a = p[k] - level, b = p[k + 1] - level;
    if (a == 0.0) return xs[k];
    if ((a < 0) != (b < 0)) return xs[k] + (xs[k + 1] - xs[k]) * a / (a - b);
  }
  if (!p.empty() && p.back() == level) return xs.back();
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace spinfactor::experiments
