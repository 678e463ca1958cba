#pragma once

#include <cstddef>
#include <vector>

#include "refocus/network.hpp"

namespace refocus {

/// Per-point influence scores; non-negative. A normalized map sums to one.
struct InfluenceMap {
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// Number of global-feature columns each point wins in the max-pool. Entries
/// are integers in [0, K] summing to exactly K.
[[nodiscard]] InfluenceMap argmax_count_influence(const ForwardTrace& trace);

/// L1 norm of each point's feature row.
[[nodiscard]] InfluenceMap l1_feature_influence(const ForwardTrace& trace);

/// Divides by the total. Throws DegenerateInfluence when no entry is positive
/// and InvalidInput for negative or non-finite entries.
[[nodiscard]] InfluenceMap normalize(const InfluenceMap& map);

}  // namespace refocus
