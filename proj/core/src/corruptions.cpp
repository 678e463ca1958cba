#include "refocus/corruptions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "refocus/error.hpp"
#include "refocus/random.hpp"

namespace refocus {

std::string_view family_name(CorruptionFamily family) noexcept {
  switch (family) {
    case CorruptionFamily::jitter: return "jitter";
    case CorruptionFamily::scale: return "scale";
    case CorruptionFamily::rotate: return "rotate";
    case CorruptionFamily::add_global: return "add_global";
    case CorruptionFamily::add_local: return "add_local";
    case CorruptionFamily::drop_global: return "drop_global";
    case CorruptionFamily::drop_local: return "drop_local";
  }
  return "unknown";
}

CorruptionFamily parse_family(std::string_view name) {
  for (auto f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  throw InvalidArgument("unknown corruption family '" + std::string(name) + "'");
}

std::size_t dropped_count(std::size_t n, int severity, const SeveritySchedule& schedule) {
  // The epsilon keeps exact products like 0.15*5*1024 = 768 from flooring to 767.
  const double raw = schedule.drop_fraction_per_level * severity * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(std::floor(raw + 1e-9));
  return std::min(k, n - 1);
}

namespace {

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

CorruptedCloud unflagged(std::vector<Point> pts) {
  const std::size_t n = pts.size();
  return {PointCloud(std::move(pts)), std::vector<bool>(n, false)};
}

CorruptedCloud jitter(const PointCloud& cloud, double sigma, Rng& rng) {
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Point> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) {
    out.push_back({static_cast<float>(p.x + noise(rng)), static_cast<float>(p.y + noise(rng)),
                   static_cast<float>(p.z + noise(rng))});
  }
  return unflagged(std::move(out));
}

CorruptedCloud scale(const PointCloud& cloud, double amount, Rng& rng) {
  std::uniform_real_distribution<double> factor(1.0 / (1.0 + amount), 1.0 + amount);
  const double sx = factor(rng), sy = factor(rng), sz = factor(rng);
  std::vector<Point> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) {
    out.push_back({static_cast<float>(p.x * sx), static_cast<float>(p.y * sy),
                   static_cast<float>(p.z * sz)});
  }
  return unflagged(std::move(out));
}

CorruptedCloud rotate(const PointCloud& cloud, double max_angle, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double ax = 0.0, ay = 0.0, az = 0.0, len = 0.0;
  while (len < 1e-12) {
    ax = gauss(rng);
    ay = gauss(rng);
    az = gauss(rng);
    len = std::sqrt(ax * ax + ay * ay + az * az);
  }
  ax /= len;
  ay /= len;
  az /= len;
  const double angle = std::uniform_real_distribution<double>(-max_angle, max_angle)(rng);
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  // Rodrigues rotation matrix.
  const double r[3][3] = {{c + ax * ax * t, ax * ay * t - az * s, ax * az * t + ay * s},
                          {ay * ax * t + az * s, c + ay * ay * t, ay * az * t - ax * s},
                          {az * ax * t - ay * s, az * ay * t + ax * s, c + az * az * t}};
  std::vector<Point> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) {
    const double x = p.x, y = p.y, z = p.z;
    out.push_back({static_cast<float>(r[0][0] * x + r[0][1] * y + r[0][2] * z),
                   static_cast<float>(r[1][0] * x + r[1][1] * y + r[1][2] * z),
                   static_cast<float>(r[2][0] * x + r[2][1] * y + r[2][2] * z)});
  }
  return unflagged(std::move(out));
}

// Appends `extra` to the cloud and shuffles, tracking which points were inserted.
CorruptedCloud with_insertions(const PointCloud& cloud, const std::vector<Point>& extra, Rng& rng) {
  std::vector<Point> all(cloud.begin(), cloud.end());
  all.insert(all.end(), extra.begin(), extra.end());
  std::vector<std::size_t> order = iota_indices(all.size());
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Point> out;
  std::vector<bool> flags;
  out.reserve(all.size());
  flags.reserve(all.size());
  for (std::size_t i : order) {
    out.push_back(all[i]);
    flags.push_back(i >= cloud.size());
  }
  return {PointCloud(std::move(out)), std::move(flags)};
}

CorruptedCloud add_global(const PointCloud& cloud, std::size_t count, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> extra;
  extra.reserve(count);
  while (extra.size() < count) {
    const double x = u(rng), y = u(rng), z = u(rng);
    if (x * x + y * y + z * z <= 1.0) {
      extra.push_back({static_cast<float>(x), static_cast<float>(y), static_cast<float>(z)});
    }
  }
  return with_insertions(cloud, extra, rng);
}

CorruptedCloud add_local(const PointCloud& cloud, std::size_t anchors, std::size_t per_anchor,
                         double sigma, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Point> extra;
  extra.reserve(anchors * per_anchor);
  for (std::size_t a = 0; a < anchors; ++a) {
    const Point& c = cloud[pick(rng)];
    for (std::size_t j = 0; j < per_anchor; ++j) {
      extra.push_back({static_cast<float>(c.x + noise(rng)), static_cast<float>(c.y + noise(rng)),
                       static_cast<float>(c.z + noise(rng))});
    }
  }
  return with_insertions(cloud, extra, rng);
}

CorruptedCloud drop_global(const PointCloud& cloud, std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx = iota_indices(cloud.size());
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(cloud.size() - count);
  std::sort(idx.begin(), idx.end());
  auto kept = cloud.subset(idx);
  return {std::move(kept), std::vector<bool>(cloud.size() - count, false)};
}

// Removes `count` points as `anchors` nearest-neighbour balls around random
// surviving anchors. Ball sizes differ by at most one point.
CorruptedCloud drop_local(const PointCloud& cloud, std::size_t count, std::size_t anchors, Rng& rng) {
  std::vector<std::size_t> remaining = iota_indices(cloud.size());
  for (std::size_t a = 0; a < anchors; ++a) {
    const std::size_t ball = count / anchors + (a < count % anchors ? 1 : 0);
    if (ball == 0) continue;
    const std::size_t anchor =
        remaining[std::uniform_int_distribution<std::size_t>(0, remaining.size() - 1)(rng)];
    std::vector<std::pair<double, std::size_t>> by_dist;
    by_dist.reserve(remaining.size());
    for (std::size_t i : remaining) by_dist.emplace_back(squared_distance(cloud[anchor], cloud[i]), i);
    std::nth_element(by_dist.begin(), by_dist.begin() + static_cast<std::ptrdiff_t>(ball - 1),
                     by_dist.end());
    std::vector<std::size_t> removed;
    removed.reserve(ball);
    for (std::size_t j = 0; j < ball; ++j) removed.push_back(by_dist[j].second);
    std::sort(removed.begin(), removed.end());
    std::erase_if(remaining,
                  [&](std::size_t i) { return std::binary_search(removed.begin(), removed.end(), i); });
  }
  auto kept = cloud.subset(remaining);
  return {std::move(kept), std::vector<bool>(remaining.size(), false)};
}

}  // namespace

CorruptedCloud apply_corruption(const PointCloud& cloud, const CorruptionSpec& spec,
                                const SeveritySchedule& schedule) {
  if (spec.severity < 1 || spec.severity > kNumSeverities) {
    throw InvalidArgument("severity must be in [1, 5], got " + std::to_string(spec.severity));
  }
  const auto s = static_cast<std::size_t>(spec.severity);
  Rng rng(mix_seed(spec.seed, {static_cast<std::uint64_t>(spec.family), s}));
  switch (spec.family) {
    case CorruptionFamily::jitter:
      return jitter(cloud, schedule.jitter_sigma_per_level * spec.severity, rng);
    case CorruptionFamily::scale:
      return scale(cloud, schedule.scale_per_level * spec.severity, rng);
    case CorruptionFamily::rotate:
      return rotate(cloud, std::numbers::pi * schedule.rotate_pi_fraction_per_level * spec.severity,
                    rng);
    case CorruptionFamily::add_global:
      return add_global(cloud, schedule.added_points_per_level * s, rng);
    case CorruptionFamily::add_local:
      return add_local(cloud, s, schedule.local_cluster_size, schedule.local_sigma, rng);
    case CorruptionFamily::drop_global:
      return drop_global(cloud, dropped_count(cloud.size(), spec.severity, schedule), rng);
    case CorruptionFamily::drop_local:
      return drop_local(cloud, dropped_count(cloud.size(), spec.severity, schedule), s, rng);
  }
  throw InvalidArgument("unknown corruption family");
}

CorruptedDataset corrupt_dataset(const Dataset& dataset, CorruptionFamily family, int severity,
                                 std::uint64_t seed, const SeveritySchedule& schedule) {
  CorruptedDataset out;
  out.data.class_names = dataset.class_names;
  out.data.split = dataset.split;
  out.data.samples.reserve(dataset.size());
  out.flags.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& sample = dataset.samples[i];
    CorruptionSpec spec{family, severity, mix_seed(seed, {i})};
    auto c = apply_corruption(sample.cloud, spec, schedule);
    out.data.samples.push_back({std::move(c.cloud), sample.label, sample.id});
    out.flags.push_back(std::move(c.outlier_flags));
  }
  return out;
}

std::map<SuiteKey, CorruptedDataset> corruption_suite(const Dataset& dataset, std::uint64_t seed,
                                                      const SeveritySchedule& schedule) {
  if (dataset.samples.empty()) throw InvalidArgument("corruption suite needs a non-empty dataset");
  std::map<SuiteKey, CorruptedDataset> suite;
  for (auto family : kAllFamilies) {
    for (int s = 1; s <= kNumSeverities; ++s) {
      suite.emplace(SuiteKey{family, s}, corrupt_dataset(dataset, family, s, seed, schedule));
    }
  }
  return suite;
}

}  // namespace refocus
