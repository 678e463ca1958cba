#include "refocus/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "refocus/error.hpp"
#include "refocus/random.hpp"

namespace refocus {

namespace {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

bool is_finite(const Point& p) noexcept {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

}  // namespace

PointCloud::PointCloud(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidInput("point cloud must contain at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!is_finite(points_[i])) {
      throw InvalidInput("non-finite coordinate at point " + std::to_string(i));
    }
  }
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  std::vector<Point> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= points_.size()) throw InvalidArgument("subset index out of range");
    out.push_back(points_[i]);
  }
  return PointCloud(std::move(out));
}

void Dataset::validate() const {
  std::vector<std::size_t> per_class(class_names.size(), 0);
  for (const auto& s : samples) {
    if (s.label >= class_names.size()) {
      throw InvalidInput("label " + std::to_string(s.label) + " of sample '" + s.id +
                         "' is out of range for " + std::to_string(class_names.size()) +
                         " classes");
    }
    ++per_class[s.label];
  }
  if (split == Split::train) {
    for (std::size_t c = 0; c < per_class.size(); ++c) {
      if (per_class[c] == 0) {
        throw InvalidInput("train split has no sample of class '" + class_names[c] + "'");
      }
    }
  }
}

std::string_view split_name(Split split) noexcept {
  return split == Split::train ? "train" : "test";
}

PointCloud normalize_unit_sphere(const PointCloud& cloud) {
  const auto n = static_cast<double>(cloud.size());
  Vec3 c;
  for (const auto& p : cloud) {
    c.x += p.x;
    c.y += p.y;
    c.z += p.z;
  }
  c.x /= n;
  c.y /= n;
  c.z /= n;

  double max_norm = 0.0;
  for (const auto& p : cloud) {
    const double dx = p.x - c.x, dy = p.y - c.y, dz = p.z - c.z;
    max_norm = std::max(max_norm, std::sqrt(dx * dx + dy * dy + dz * dz));
  }
  const double scale = max_norm > 0.0 ? 1.0 / max_norm : 0.0;

  std::vector<Point> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) {
    out.push_back({static_cast<float>((p.x - c.x) * scale), static_cast<float>((p.y - c.y) * scale),
                   static_cast<float>((p.z - c.z) * scale)});
  }
  return PointCloud(std::move(out));
}

double squared_distance(const Point& a, const Point& b) noexcept {
  const double dx = static_cast<double>(a.x) - b.x;
  const double dy = static_cast<double>(a.y) - b.y;
  const double dz = static_cast<double>(a.z) - b.z;
  return dx * dx + dy * dy + dz * dz;
}

std::vector<Neighbor> knn_query(const PointCloud& cloud, std::size_t query_index, std::size_t k) {
  const std::size_t n = cloud.size();
  if (query_index >= n) throw InvalidArgument("knn query index out of range");
  if (k < 1 || k >= n) {
    throw InvalidArgument("knn requires 1 <= k <= N-1 (k=" + std::to_string(k) +
                          ", N=" + std::to_string(n) + ")");
  }
  std::vector<Neighbor> candidates;
  candidates.reserve(n - 1);
  const Point& q = cloud[query_index];
  for (std::size_t i = 0; i < n; ++i) {
    if (i != query_index) candidates.push_back({i, squared_distance(q, cloud[i])});
  }
  const auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                    candidates.end(), closer);
  candidates.resize(k);
  for (auto& c : candidates) c.distance = std::sqrt(c.distance);
  return candidates;
}

std::vector<std::size_t> knn(const PointCloud& cloud, std::size_t query_index, std::size_t k) {
  std::vector<std::size_t> out;
  out.reserve(k);
  for (const auto& nb : knn_query(cloud, query_index, k)) out.push_back(nb.index);
  return out;
}

std::string_view shape_kind_name(ShapeKind kind) noexcept {
  switch (kind) {
    case ShapeKind::sphere: return "sphere";
    case ShapeKind::box: return "box";
    case ShapeKind::cylinder: return "cylinder";
    case ShapeKind::cone: return "cone";
    case ShapeKind::torus: return "torus";
    case ShapeKind::plane: return "plane";
    case ShapeKind::two_spheres: return "two-spheres";
    case ShapeKind::pyramid: return "pyramid";
  }
  return "unknown";
}

ShapeKind parse_shape_kind(std::string_view name) {
  for (ShapeKind k : kAllShapeKinds) {
    if (shape_kind_name(k) == name) return k;
  }
  throw InvalidArgument("unknown shape kind '" + std::string(name) + "'");
}

namespace {

constexpr double kPi = std::numbers::pi;

class SurfaceSampler {
 public:
  explicit SurfaceSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double gauss() { return normal_(rng_); }

  Vec3 unit_sphere() {
    for (;;) {
      Vec3 v{gauss(), gauss(), gauss()};
      const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
      if (n > 1e-12) return {v.x / n, v.y / n, v.z / n};
    }
  }

  // Uniform on triangle (a, b, c).
  Vec3 triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double r1 = std::sqrt(uniform(0.0, 1.0));
    const double r2 = uniform(0.0, 1.0);
    const double wa = 1.0 - r1, wb = r1 * (1.0 - r2), wc = r1 * r2;
    return {wa * a.x + wb * b.x + wc * c.x, wa * a.y + wb * b.y + wc * c.y,
            wa * a.z + wb * b.z + wc * c.z};
  }

  // Picks an index with probability proportional to `weights`.
  std::size_t pick(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform(0.0, total);
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    return weights.size() - 1;
  }

  Rng& rng() { return rng_; }

 private:
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

Vec3 sample_box(SurfaceSampler& s) {
  // Unit cube [-1,1]^3: six faces of equal area.
  const auto face = static_cast<int>(s.uniform(0.0, 6.0));
  const double u = s.uniform(-1.0, 1.0), v = s.uniform(-1.0, 1.0);
  const double side = (face % 2 == 0) ? 1.0 : -1.0;
  switch (std::min(face / 2, 2)) {
    case 0: return {side, u, v};
    case 1: return {u, side, v};
    default: return {u, v, side};
  }
}

Vec3 sample_cylinder(SurfaceSampler& s) {
  // Radius 1, z in [-1, 1]: lateral area 4*pi, each cap pi.
  const std::array<double, 3> areas = {4.0 * kPi, kPi, kPi};
  const std::size_t part = s.pick(areas);
  const double theta = s.uniform(0.0, 2.0 * kPi);
  if (part == 0) return {std::cos(theta), std::sin(theta), s.uniform(-1.0, 1.0)};
  const double r = std::sqrt(s.uniform(0.0, 1.0));
  return {r * std::cos(theta), r * std::sin(theta), part == 1 ? 1.0 : -1.0};
}

Vec3 sample_cone(SurfaceSampler& s) {
  // Base radius 1 at z=-1, apex at z=1. Lateral area pi*sqrt(5), base pi.
  const std::array<double, 2> areas = {kPi * std::sqrt(5.0), kPi};
  const double theta = s.uniform(0.0, 2.0 * kPi);
  const double t = std::sqrt(s.uniform(0.0, 1.0));
  if (s.pick(areas) == 0) return {t * std::cos(theta), t * std::sin(theta), 1.0 - 2.0 * t};
  return {t * std::cos(theta), t * std::sin(theta), -1.0};
}

Vec3 sample_torus(SurfaceSampler& s) {
  constexpr double major = 1.0, minor = 0.4;
  for (;;) {
    const double u = s.uniform(0.0, 2.0 * kPi);
    const double v = s.uniform(0.0, 2.0 * kPi);
    // Area element is proportional to (major + minor*cos v).
    if (s.uniform(0.0, major + minor) <= major + minor * std::cos(v)) {
      const double ring = major + minor * std::cos(v);
      return {ring * std::cos(u), ring * std::sin(u), minor * std::sin(v)};
    }
  }
}

Vec3 sample_plane(SurfaceSampler& s) { return {s.uniform(-1.0, 1.0), s.uniform(-1.0, 1.0), 0.0}; }

Vec3 sample_two_spheres(SurfaceSampler& s) {
  const Vec3 d = s.unit_sphere();
  const double cx = s.uniform(0.0, 1.0) < 0.5 ? -1.5 : 1.5;
  return {d.x + cx, d.y, d.z};
}

Vec3 sample_pyramid(SurfaceSampler& s) {
  // Square base [-1,1]^2 at z=-1 (area 4), apex (0,0,1), four faces of area sqrt(5).
  const double face = std::sqrt(5.0);
  const std::array<double, 5> areas = {4.0, face, face, face, face};
  const std::size_t part = s.pick(areas);
  if (part == 0) return {s.uniform(-1.0, 1.0), s.uniform(-1.0, 1.0), -1.0};
  static constexpr std::array<Vec3, 4> corners = {
      Vec3{-1.0, -1.0, -1.0}, Vec3{1.0, -1.0, -1.0}, Vec3{1.0, 1.0, -1.0}, Vec3{-1.0, 1.0, -1.0}};
  const Vec3 apex{0.0, 0.0, 1.0};
  return s.triangle(apex, corners[part - 1], corners[part % 4]);
}

// Points on a sphere, iteratively re-centered so the sample centroid vanishes
// and every point keeps unit norm.
std::vector<Vec3> centered_sphere(SurfaceSampler& s, std::size_t n) {
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = s.unit_sphere();
  for (int iter = 0; iter < 60; ++iter) {
    Vec3 c;
    for (const auto& p : pts) {
      c.x += p.x;
      c.y += p.y;
      c.z += p.z;
    }
    c.x /= static_cast<double>(n);
    c.y /= static_cast<double>(n);
    c.z /= static_cast<double>(n);
    if (std::sqrt(c.x * c.x + c.y * c.y + c.z * c.z) < 1e-15) break;
    for (auto& p : pts) {
      Vec3 q{p.x - c.x, p.y - c.y, p.z - c.z};
      const double len = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
      p = {q.x / len, q.y / len, q.z / len};
    }
  }
  return pts;
}

}  // namespace

PointCloud synth_shape(ShapeKind kind, std::size_t n_points, std::uint64_t seed) {
  if (n_points < 64) throw InvalidArgument("synth_shape requires at least 64 points");
  SurfaceSampler s(mix_seed(seed, {static_cast<std::uint64_t>(kind)}));

  std::vector<Vec3> raw;
  if (kind == ShapeKind::sphere) {
    raw = centered_sphere(s, n_points);
  } else {
    raw.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
      switch (kind) {
        case ShapeKind::box: raw.push_back(sample_box(s)); break;
        case ShapeKind::cylinder: raw.push_back(sample_cylinder(s)); break;
        case ShapeKind::cone: raw.push_back(sample_cone(s)); break;
        case ShapeKind::torus: raw.push_back(sample_torus(s)); break;
        case ShapeKind::plane: raw.push_back(sample_plane(s)); break;
        case ShapeKind::two_spheres: raw.push_back(sample_two_spheres(s)); break;
        case ShapeKind::pyramid: raw.push_back(sample_pyramid(s)); break;
        case ShapeKind::sphere: break;
      }
    }
  }

  double sx = s.uniform(0.8, 1.25), sy = s.uniform(0.8, 1.25), sz = s.uniform(0.8, 1.25);
  if (kind == ShapeKind::sphere) sy = sz = sx;
  const double theta = s.uniform(0.0, 2.0 * kPi);
  const double ct = std::cos(theta), st = std::sin(theta);

  std::vector<Point> pts;
  pts.reserve(raw.size());
  for (const auto& p : raw) {
    const double x = p.x * sx, y = p.y * sy, z = p.z * sz;
    pts.push_back({static_cast<float>(ct * x - st * y), static_cast<float>(st * x + ct * y),
                   static_cast<float>(z)});
  }
  return normalize_unit_sphere(PointCloud(std::move(pts)));
}

Dataset make_synthetic_dataset(std::size_t per_class, std::size_t n_points, std::uint64_t seed,
                               Split split) {
  Dataset ds;
  ds.split = split;
  for (ShapeKind k : kAllShapeKinds) ds.class_names.emplace_back(shape_kind_name(k));
  ds.samples.reserve(per_class * kAllShapeKinds.size());
  // Interleave classes so any prefix of the dataset stays balanced.
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < kAllShapeKinds.size(); ++c) {
      const std::uint64_t sample_seed =
          mix_seed(seed, {static_cast<std::uint64_t>(split), c, i});
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%05zu.xyz",
                    std::string(shape_kind_name(kAllShapeKinds[c])).c_str(), i);
      ds.samples.push_back({synth_shape(kAllShapeKinds[c], n_points, sample_seed), c, name});
    }
  }
  return ds;
}

}  // namespace refocus
