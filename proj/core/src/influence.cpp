#include "refocus/influence.hpp"

#include <cmath>

#include "refocus/error.hpp"

namespace refocus {

InfluenceMap argmax_count_influence(const ForwardTrace& trace) {
  InfluenceMap map{std::vector<double>(trace.per_point_features.num_points(), 0.0)};
  for (std::size_t p : trace.argmax_indices) {
    if (p >= map.values.size()) throw InvalidInput("argmax index out of range");
    map.values[p] += 1.0;
  }
  return map;
}

InfluenceMap l1_feature_influence(const ForwardTrace& trace) {
  const auto& h = trace.per_point_features.by_point();
  InfluenceMap map{std::vector<double>(static_cast<std::size_t>(h.cols()), 0.0)};
  for (Eigen::Index p = 0; p < h.cols(); ++p) {
    map.values[static_cast<std::size_t>(p)] = h.col(p).cwiseAbs().sum();
  }
  return map;
}

InfluenceMap normalize(const InfluenceMap& map) {
  double total = 0.0;
  for (double v : map.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("influence values must be finite and non-negative");
    total += v;
  }
  if (!(total > 0.0)) throw DegenerateInfluence("influence map has no positive mass");
  InfluenceMap out{map.values};
  for (double& v : out.values) v /= total;
  return out;
}

}  // namespace refocus
