#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "refocus/geometry.hpp"

namespace refocus {

enum class CorruptionFamily { jitter, scale, rotate, add_global, add_local, drop_global, drop_local };

inline constexpr std::array<CorruptionFamily, 7> kAllFamilies = {
    CorruptionFamily::jitter,     CorruptionFamily::scale,       CorruptionFamily::rotate,
    CorruptionFamily::add_global, CorruptionFamily::add_local,   CorruptionFamily::drop_global,
    CorruptionFamily::drop_local};

inline constexpr int kNumSeverities = 5;

[[nodiscard]] std::string_view family_name(CorruptionFamily family) noexcept;
[[nodiscard]] CorruptionFamily parse_family(std::string_view name);

struct CorruptionSpec {
  CorruptionFamily family = CorruptionFamily::jitter;
  int severity = 1;  // 1..5
  std::uint64_t seed = 0;
};

/// Per-level magnitudes. Level s uses s times each `*_per_level` value.
struct SeveritySchedule {
  double jitter_sigma_per_level = 0.01;
  double scale_per_level = 0.1;            // factors in [1/(1+a*s), 1+a*s]
  double rotate_pi_fraction_per_level = 0.1;  // angle in [-pi*a*s, pi*a*s]
  std::size_t added_points_per_level = 10;
  std::size_t local_cluster_size = 10;     // add_local: points per anchor
  double local_sigma = 0.05;
  double drop_fraction_per_level = 0.15;
};

/// Output of a corruption. `outlier_flags[i]` marks points inserted by
/// add_global / add_local; it is all-false for every other family.
struct CorruptedCloud {
  PointCloud cloud;
  std::vector<bool> outlier_flags;
};

/// Applies one corruption. Deterministic for a given spec. The result is not
/// re-normalized. Inserted points are shuffled into the cloud (flags follow
/// them); size-preserving families keep point order.
[[nodiscard]] CorruptedCloud apply_corruption(const PointCloud& cloud, const CorruptionSpec& spec,
                                              const SeveritySchedule& schedule = {});

/// Number of points removed by drop_global / drop_local at severity s.
[[nodiscard]] std::size_t dropped_count(std::size_t n, int severity,
                                        const SeveritySchedule& schedule = {});

struct CorruptedDataset {
  Dataset data;
  std::vector<std::vector<bool>> flags;  // one per sample
};

/// Corrupts every sample of `dataset` with (family, severity); sample i uses a
/// seed derived from (seed, family, severity, i).
[[nodiscard]] CorruptedDataset corrupt_dataset(const Dataset& dataset, CorruptionFamily family,
                                               int severity, std::uint64_t seed,
                                               const SeveritySchedule& schedule = {});

using SuiteKey = std::pair<CorruptionFamily, int>;

/// All 7 families x 5 severities.
[[nodiscard]] std::map<SuiteKey, CorruptedDataset> corruption_suite(
    const Dataset& dataset, std::uint64_t seed, const SeveritySchedule& schedule = {});

}  // namespace refocus
