#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spinfactor::experiments {

/// Pearson chi-square of `counts` against a uniform split of `total` over
/// counts.size() bins. Mass outside the bins counts as deficit.
double chi_square_uniform(std::span<const std::size_t> counts, std::size_t total);

/// Least-squares non-increasing fit (pool adjacent violators).
std::vector<double> isotonic_non_increasing(std::span<const double> values);

/// True when every point lies within `z` binomial standard errors of the
/// best non-increasing fit; the error uses max(p(1-p), 1/runs) / runs.
bool non_increasing_within_noise(std::span<const double> rates, std::size_t runs, double z = 3.0);

/// Length of the part of [xs.front(), xs.back()] where the largest state
/// probability is below `threshold`, with every state's probability
/// interpolated linearly between grid points. probs[k][s] is state s at xs[k].
double gray_zone_width(std::span<const double> xs, const std::vector<std::vector<double>>& probs,
                       double threshold = 0.9);

/// x where probability series p first crosses `level` (linear interpolation);
/// NaN if it never does.
double crossing_point(std::span<const double> xs, std::span<const double> p, double level = 0.5);

}  // namespace spinfactor::experiments
