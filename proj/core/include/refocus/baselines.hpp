#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "refocus/influence.hpp"
#include "refocus/network.hpp"

namespace refocus {

/// Subset produced by a filter; `kept` and `removed` are increasing index
/// lists that partition the input.
struct FilterResult {
  PointCloud cloud;
  std::vector<std::size_t> kept;
  std::vector<std::size_t> removed;
};

/// Simple random sampling: keeps a uniform random subset of
/// N - floor(drop_fraction * N) points, input order preserved.
[[nodiscard]] FilterResult srs(const PointCloud& cloud, double drop_fraction, std::uint64_t seed);

/// Statistical outlier removal. d_i is the mean distance of point i to its k
/// nearest neighbours; points with d_i > mean(d) + sigma_mult * std(d) are
/// removed (sample standard deviation, as in PCL).
[[nodiscard]] FilterResult sor(const PointCloud& cloud, std::size_t k = 2, double sigma_mult = 1.1);

/// d_i for every point, the first half of sor(); lets a sigma sweep reuse the
/// neighbour search.
[[nodiscard]] std::vector<double> sor_mean_distances(const PointCloud& cloud, std::size_t k = 2);
/// Keep mask for precomputed d_i under the sor() threshold.
[[nodiscard]] std::vector<bool> sor_keep_mask(std::span<const double> mean_distances, double sigma_mult);

/// Keeps points whose influence is at most the mean influence.
[[nodiscard]] FilterResult mean_threshold_filter(const PointCloud& cloud, const InfluenceMap& influence);

/// One forward pass, L1 feature influence, mean threshold.
[[nodiscard]] FilterResult influence_outlier_removal(const EncoderParams& params, const PointCloud& cloud);

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 1.0;
};

/// Precision is 1 when nothing was removed; recall is 1 when nothing is flagged.
[[nodiscard]] PrecisionRecall precision_recall(std::span<const std::size_t> removed,
                                               const std::vector<bool>& flags);

}  // namespace refocus
