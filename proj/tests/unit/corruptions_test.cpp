#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

#include "refocus/corruptions.hpp"
#include "refocus/error.hpp"
#include "test_support.hpp"

namespace refocus {
namespace {

double norm(const Point& p) { return std::sqrt(double(p.x) * p.x + double(p.y) * p.y + double(p.z) * p.z); }

std::vector<Point> sorted_points(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Point& a, const Point& b) { return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z); });
  return pts;
}

// Symmetric Chamfer distance by brute force.
double chamfer(const PointCloud& a, const PointCloud& b) {
  auto one_way = [](const PointCloud& from, const PointCloud& to) {
    double sum = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, squared_distance(p, q));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return one_way(a, b) + one_way(b, a);
}

PointCloud sample_shape(std::uint64_t seed, std::size_t n = 1024) {
  return synth_shape(kAllShapeKinds[seed % kAllShapeKinds.size()], n, seed);
}

TEST(Corruptions, FamilyNamesRoundTrip) {
  for (auto f : kAllFamilies) EXPECT_EQ(parse_family(family_name(f)), f);
  EXPECT_THROW((void)parse_family("blur"), InvalidArgument);
}

TEST(Corruptions, RejectsSeverityOutOfRange) {
  const PointCloud c = sample_shape(1, 64);
  EXPECT_THROW((void)apply_corruption(c, {CorruptionFamily::jitter, 0, 1}), InvalidArgument);
  EXPECT_THROW((void)apply_corruption(c, {CorruptionFamily::jitter, 6, 1}), InvalidArgument);
}

TEST(Corruptions, DropCountsOn1024) {
  // floor(0.15 * s * 1024) removed: 153, 307, 460, 614, 768.
  const std::size_t expected_removed[] = {153, 307, 460, 614, 768};
  const PointCloud c = sample_shape(3);
  for (int s = 1; s <= 5; ++s) {
    EXPECT_EQ(dropped_count(1024, s), expected_removed[s - 1]);
    for (auto f : {CorruptionFamily::drop_global, CorruptionFamily::drop_local}) {
      const auto out = apply_corruption(c, {f, s, 11});
      EXPECT_EQ(out.cloud.size(), 1024 - expected_removed[s - 1]) << family_name(f) << " s" << s;
      EXPECT_EQ(std::count(out.outlier_flags.begin(), out.outlier_flags.end(), true), 0);
    }
  }
}

TEST(Corruptions, DroppedCloudsAreSubsetsInOrder) {
  const PointCloud c = sample_shape(4, 256);
  for (auto f : {CorruptionFamily::drop_global, CorruptionFamily::drop_local}) {
    const auto out = apply_corruption(c, {f, 3, 5});
    std::size_t j = 0;
    for (const auto& p : out.cloud) {
      while (j < c.size() && !(c[j] == p)) ++j;
      ASSERT_LT(j, c.size()) << family_name(f) << ": point not found in order";
      ++j;
    }
  }
}

TEST(Corruptions, DropLocalRemovesNearestBalls) {
  // Two far-apart clusters; a single-anchor ball of half the points must be
  // exactly one cluster.
  std::vector<Point> pts;
  for (int i = 0; i < 50; ++i) pts.push_back({0.01f * static_cast<float>(i), 0, 0});
  for (int i = 0; i < 50; ++i) pts.push_back({10.0f + 0.01f * static_cast<float>(i), 0, 0});
  SeveritySchedule sched;
  sched.drop_fraction_per_level = 0.5;
  const auto out = apply_corruption(PointCloud(pts), {CorruptionFamily::drop_local, 1, 2}, sched);
  ASSERT_EQ(out.cloud.size(), 50u);
  const bool left = out.cloud[0].x > 5.0f;
  for (const auto& p : out.cloud) EXPECT_EQ(p.x > 5.0f, left);
}

TEST(Corruptions, AddFamiliesFlagExactlyTheInsertedPoints) {
  const PointCloud c = sample_shape(5);
  for (auto f : {CorruptionFamily::add_global, CorruptionFamily::add_local}) {
    for (int s = 1; s <= 5; ++s) {
      const auto out = apply_corruption(c, {f, s, 7});
      ASSERT_EQ(out.cloud.size(), 1024u + 10u * s);
      ASSERT_EQ(out.outlier_flags.size(), out.cloud.size());
      EXPECT_EQ(std::count(out.outlier_flags.begin(), out.outlier_flags.end(), true), 10 * s);
      std::vector<Point> originals;
      for (std::size_t i = 0; i < out.cloud.size(); ++i) {
        if (!out.outlier_flags[i]) {
          originals.push_back(out.cloud[i]);
        } else if (f == CorruptionFamily::add_global) {
          EXPECT_LE(norm(out.cloud[i]), 1.0 + 1e-6);
        }
      }
      EXPECT_EQ(sorted_points(originals), sorted_points({c.begin(), c.end()}));
    }
  }
}

TEST(Corruptions, AddLocalClustersSitNearTheShape) {
  const PointCloud c = sample_shape(6);
  const auto out = apply_corruption(c, {CorruptionFamily::add_local, 3, 9});
  for (std::size_t i = 0; i < out.cloud.size(); ++i) {
    if (!out.outlier_flags[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : c) best = std::min(best, squared_distance(out.cloud[i], q));
    // sigma 0.05 per axis; 6 sigma in norm is far beyond any draw here.
    EXPECT_LT(std::sqrt(best), 0.3);
  }
}

TEST(Corruptions, RotatePreservesNorms) {
  const PointCloud c = sample_shape(7);
  for (int s = 1; s <= 5; ++s) {
    const auto out = apply_corruption(c, {CorruptionFamily::rotate, s, 13});
    ASSERT_EQ(out.cloud.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(norm(out.cloud[i]), norm(c[i]), 1e-6);
  }
}

TEST(Corruptions, ScaleFactorsWithinBounds) {
  const PointCloud c({{1, 1, 1}, {-0.5f, 0.25f, 2}});
  for (int s = 1; s <= 5; ++s) {
    const double a = 0.1 * s;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto out = apply_corruption(c, {CorruptionFamily::scale, s, seed});
      const double fx = out.cloud[0].x, fy = out.cloud[0].y, fz = out.cloud[0].z;
      for (double f : {fx, fy, fz}) {
        EXPECT_GE(f, 1.0 / (1.0 + a) - 1e-6);
        EXPECT_LE(f, 1.0 + a + 1e-6);
      }
      // Per-axis factors apply to every point alike.
      EXPECT_NEAR(out.cloud[1].x, -0.5 * fx, 1e-6);
      EXPECT_NEAR(out.cloud[1].z, 2.0 * fz, 1e-6);
    }
  }
}

TEST(Corruptions, JitterStandardDeviation) {
  const PointCloud c = sample_shape(8);
  for (int s : {1, 5}) {
    const auto out = apply_corruption(c, {CorruptionFamily::jitter, s, 21});
    double ss = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      ss += squared_distance(out.cloud[i], c[i]);
    }
    const double sigma = std::sqrt(ss / (3.0 * static_cast<double>(c.size())));
    EXPECT_NEAR(sigma, 0.01 * s, 0.01 * s * 0.08);
  }
}

TEST(Corruptions, Deterministic) {
  const PointCloud c = sample_shape(9, 256);
  for (auto f : kAllFamilies) {
    const auto a = apply_corruption(c, {f, 3, 99});
    const auto b = apply_corruption(c, {f, 3, 99});
    EXPECT_EQ(a.cloud, b.cloud) << family_name(f);
    EXPECT_EQ(a.outlier_flags, b.outlier_flags);
  }
}

TEST(Corruptions, AllFamiliesFiniteForRandomInputs) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const PointCloud c = normalize_unit_sphere(testing::random_cloud(64 + seed, seed));
    for (auto f : kAllFamilies) {
      for (int s = 1; s <= 5; ++s) {
        const auto out = apply_corruption(c, {f, s, seed});
        for (const auto& p : out.cloud) {
          ASSERT_TRUE(std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z));
        }
        ASSERT_EQ(out.outlier_flags.size(), out.cloud.size());
      }
    }
  }
}

TEST(CorruptionSuite, ThirtyFiveEntriesOfEqualSize) {
  const Dataset ds = make_synthetic_dataset(1, 64, 2, Split::test);
  const auto suite = corruption_suite(ds, 4);
  EXPECT_EQ(suite.size(), 35u);
  for (const auto& [key, cd] : suite) {
    EXPECT_EQ(cd.data.size(), ds.size());
    EXPECT_EQ(cd.flags.size(), ds.size());
    EXPECT_EQ(cd.data.class_names, ds.class_names);
  }
  EXPECT_THROW((void)corruption_suite(Dataset{}, 4), InvalidArgument);
}

TEST(CorruptionSuite, SameSeedSameCoordinates) {
  const Dataset ds = make_synthetic_dataset(1, 64, 2, Split::test);
  const auto a = corrupt_dataset(ds, CorruptionFamily::add_local, 2, 17);
  const auto b = corrupt_dataset(ds, CorruptionFamily::add_local, 2, 17);
  const auto c = corrupt_dataset(ds, CorruptionFamily::add_local, 2, 18);
  bool any_diff = false;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(a.data.samples[i].cloud, b.data.samples[i].cloud);
    any_diff = any_diff || !(a.data.samples[i].cloud == c.data.samples[i].cloud);
  }
  EXPECT_TRUE(any_diff);
}

TEST(CorruptionSuite, JitterChamferGrowsWithSeverity) {
  const Dataset ds = make_synthetic_dataset(13, 128, 3, Split::test);  // 104 samples
  ASSERT_GE(ds.size(), 100u);
  double previous = 0.0;
  for (int s = 1; s <= 5; ++s) {
    const auto cd = corrupt_dataset(ds, CorruptionFamily::jitter, s, 8);
    double mean = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      mean += chamfer(ds.samples[i].cloud, cd.data.samples[i].cloud);
    }
    mean /= static_cast<double>(ds.size());
    EXPECT_GT(mean, previous) << "severity " << s;
    previous = mean;
  }
}

}  // namespace
}  // namespace refocus
