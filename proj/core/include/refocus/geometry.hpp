#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace refocus {

struct Point {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Ordered, non-empty set of 3D points with finite coordinates.
///
/// Coordinates are stored as 32-bit floats; all derived quantities are
/// computed in double precision.
class PointCloud {
 public:
  /// Throws InvalidInput if `points` is empty or any coordinate is not finite.
  explicit PointCloud(std::vector<Point> points);

  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] const Point& operator[](std::size_t i) const { return points_[i]; }
  [[nodiscard]] std::span<const Point> points() const noexcept { return points_; }
  [[nodiscard]] auto begin() const noexcept { return points_.begin(); }
  [[nodiscard]] auto end() const noexcept { return points_.end(); }

  /// Points at `indices`, in the given order.
  [[nodiscard]] PointCloud subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::vector<Point> points_;
};

struct LabeledCloud {
  PointCloud cloud;
  std::size_t label = 0;
  /// File name inside a dataset directory; used to key per-sample outputs.
  std::string id;
};

enum class Split { train, test };

struct Dataset {
  std::vector<LabeledCloud> samples;
  std::vector<std::string> class_names;
  Split split = Split::train;

  [[nodiscard]] std::size_t num_classes() const noexcept { return class_names.size(); }
  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }

  /// Throws InvalidInput if a label is out of range, or if a train split
  /// lacks a class.
  void validate() const;
};

[[nodiscard]] std::string_view split_name(Split split) noexcept;

/// Subtracts the centroid and scales so the farthest point has norm 1.
/// A cloud whose points all coincide maps to all-zeros.
[[nodiscard]] PointCloud normalize_unit_sphere(const PointCloud& cloud);

[[nodiscard]] double squared_distance(const Point& a, const Point& b) noexcept;

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/// The k nearest points to `query_index` (excluding itself), nearest first,
/// ties broken by lower index. Requires 1 <= k <= N-1.
[[nodiscard]] std::vector<Neighbor> knn_query(const PointCloud& cloud, std::size_t query_index,
                                              std::size_t k);

[[nodiscard]] std::vector<std::size_t> knn(const PointCloud& cloud, std::size_t query_index,
                                           std::size_t k);

enum class ShapeKind { sphere, box, cylinder, cone, torus, plane, two_spheres, pyramid };

inline constexpr std::array<ShapeKind, 8> kAllShapeKinds = {
    ShapeKind::sphere, ShapeKind::box,   ShapeKind::cylinder,    ShapeKind::cone,
    ShapeKind::torus,  ShapeKind::plane, ShapeKind::two_spheres, ShapeKind::pyramid};

[[nodiscard]] std::string_view shape_kind_name(ShapeKind kind) noexcept;
/// Accepts the names produced by shape_kind_name ("two-spheres" for two_spheres).
[[nodiscard]] ShapeKind parse_shape_kind(std::string_view name);

/// Samples `n_points` (>= 64) approximately uniformly on the surface of a
/// randomly scaled and rotated instance of `kind`, then normalizes to the unit
/// sphere. Bit-deterministic for a given seed.
///
/// Instances get an independent per-axis scale in [0.8, 1.25] and a random
/// rotation about the vertical (z) axis. Spheres are scaled isotropically so
/// they stay spheres.
[[nodiscard]] PointCloud synth_shape(ShapeKind kind, std::size_t n_points, std::uint64_t seed);

/// One sample of every shape kind per `per_class`, labels in kAllShapeKinds order.
[[nodiscard]] Dataset make_synthetic_dataset(std::size_t per_class, std::size_t n_points,
                                             std::uint64_t seed, Split split);

}  // namespace refocus
