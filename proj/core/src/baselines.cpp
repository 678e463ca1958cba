#include "refocus/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "refocus/error.hpp"
#include "refocus/random.hpp"

namespace refocus {

namespace {

FilterResult from_keep_mask(const PointCloud& cloud, const std::vector<bool>& keep) {
  FilterResult r{cloud, {}, {}};
  for (std::size_t i = 0; i < keep.size(); ++i) (keep[i] ? r.kept : r.removed).push_back(i);
  if (r.kept.empty()) throw InvalidArgument("filter removed every point");
  r.cloud = cloud.subset(r.kept);
  return r;
}

}  // namespace

FilterResult srs(const PointCloud& cloud, double drop_fraction, std::uint64_t seed) {
  if (!(drop_fraction >= 0.0 && drop_fraction < 1.0)) {
    throw InvalidArgument("drop fraction must lie in [0, 1)");
  }
  const std::size_t n = cloud.size();
  const auto drop = static_cast<std::size_t>(std::floor(drop_fraction * static_cast<double>(n) + 1e-9));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(seed, {0x5125}));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> keep(n, true);
  for (std::size_t i = 0; i < std::min(drop, n - 1); ++i) keep[order[i]] = false;
  return from_keep_mask(cloud, keep);
}

std::vector<double> sor_mean_distances(const PointCloud& cloud, std::size_t k) {
  const std::size_t n = cloud.size();
  if (k < 1 || k >= n) {
    throw InvalidArgument("SOR needs 1 <= k < N (k=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");
  }
  std::vector<double> mean_dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& nb : knn_query(cloud, i, k)) s += nb.distance;
    mean_dist[i] = s / static_cast<double>(k);
  }
  return mean_dist;
}

std::vector<bool> sor_keep_mask(std::span<const double> mean_distances, double sigma_mult) {
  const std::size_t n = mean_distances.size();
  if (n == 0) return {};
  // Rounding in the mean must not turn a zero-spread cloud into removals.
  const auto [lo, hi] = std::minmax_element(mean_distances.begin(), mean_distances.end());
  if (*lo == *hi) return std::vector<bool>(n, true);
  const double mean = std::accumulate(mean_distances.begin(), mean_distances.end(), 0.0) / static_cast<double>(n);
  double sq = 0.0;
  for (double d : mean_distances) sq += (d - mean) * (d - mean);
  const double stddev = n > 1 ? std::sqrt(sq / static_cast<double>(n - 1)) : 0.0;
  const double threshold = mean + sigma_mult * stddev;
  std::vector<bool> keep(n);
  for (std::size_t i = 0; i < n; ++i) keep[i] = !(mean_distances[i] > threshold);
  return keep;
}

FilterResult sor(const PointCloud& cloud, std::size_t k, double sigma_mult) {
  return from_keep_mask(cloud, sor_keep_mask(sor_mean_distances(cloud, k), sigma_mult));
}

FilterResult mean_threshold_filter(const PointCloud& cloud, const InfluenceMap& influence) {
  if (influence.size() != cloud.size()) throw InvalidArgument("influence map size does not match cloud");
  const double mean = std::accumulate(influence.values.begin(), influence.values.end(), 0.0) /
                      static_cast<double>(influence.size());
  std::vector<bool> keep(cloud.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = influence.values[i] <= mean;
  // All-equal maps can round a few entries above their own mean.
  const auto [lo, hi] = std::minmax_element(influence.values.begin(), influence.values.end());
  if (*lo == *hi) std::fill(keep.begin(), keep.end(), true);
  return from_keep_mask(cloud, keep);
}

FilterResult influence_outlier_removal(const EncoderParams& params, const PointCloud& cloud) {
  return mean_threshold_filter(cloud, l1_feature_influence(forward(params, cloud)));
}

PrecisionRecall precision_recall(std::span<const std::size_t> removed, const std::vector<bool>& flags) {
  std::size_t hits = 0;
  for (std::size_t i : removed) {
    if (i >= flags.size()) throw InvalidArgument("removed index out of range of the flags");
    if (flags[i]) ++hits;
  }
  const auto flagged = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
  PrecisionRecall pr;
  pr.precision = removed.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(removed.size());
  pr.recall = flagged == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(flagged);
  return pr;
}

}  // namespace refocus
