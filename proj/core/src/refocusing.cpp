#include "refocus/refocusing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "refocus/error.hpp"
#include "refocus/focus.hpp"

namespace refocus {

void RefocusConfig::validate() const {
  if (k_min < 1) throw InvalidArgument("k_min must be at least 1");
  if (fixed_k && *fixed_k < k_min) {
    throw InvalidArgument("fixed_k (" + std::to_string(*fixed_k) + ") must be >= k_min (" +
                          std::to_string(k_min) + ")");
  }
}

std::string_view variant_name(RefocusVariant variant) noexcept {
  return variant == RefocusVariant::euclidean ? "euclidean" : "feature_space";
}

std::size_t adaptive_k(double f, std::size_t n, std::size_t k_min) {
  if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("focus must lie in [0, 1]");
  if (n == 0) throw InvalidArgument("adaptive_k needs N >= 1");
  // The epsilon keeps exact products (e.g. 0.75 * 1024) from flooring one low.
  const auto k = static_cast<std::size_t>(std::floor((1.0 - f) * static_cast<double>(n) + 1e-9));
  return std::clamp(k, std::min(k_min, n), n);
}

std::vector<std::size_t> lowest_influence_indices(std::span<const double> influence, std::size_t k) {
  if (k > influence.size()) {
    throw InvalidArgument("cannot keep " + std::to_string(k) + " of " +
                          std::to_string(influence.size()) + " points");
  }
  std::vector<std::size_t> order(influence.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return influence[a] < influence[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

PointCloud select_lowest(const PointCloud& cloud, const InfluenceMap& influence, std::size_t k) {
  if (influence.size() != cloud.size()) throw InvalidArgument("influence map size does not match cloud");
  return cloud.subset(lowest_influence_indices(influence.values, k));
}

ModelView ModelView::of(const EncoderParams& params) {
  return {[&params](const PointCloud& c) { return refocus::forward(params, c); },
          [&params](const Eigen::VectorXd& g) { return classify_global(params, g); }};
}

namespace {

// Normalized argmax-count influence; uniform when the map has no mass.
InfluenceMap normalized_influence(const ForwardTrace& trace, bool* degenerate) {
  const InfluenceMap counts = argmax_count_influence(trace);
  try {
    return normalize(counts);
  } catch (const DegenerateInfluence&) {
    if (degenerate != nullptr) *degenerate = true;
    const std::size_t n = counts.size();
    return InfluenceMap{std::vector<double>(n, 1.0 / static_cast<double>(n))};
  }
}

}  // namespace

MaskedFeature feature_space_filter(const ForwardTrace& trace, double f) {
  const std::size_t n = trace.per_point_features.num_points();
  if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("focus must lie in [0, 1]");
  const auto drop = std::min(
      n, static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9)));
  MaskedFeature out;
  if (drop == 0) {
    out.global_feature = trace.global_feature;
    return out;
  }
  if (drop >= n) {
    out.global_feature = trace.global_feature;
    out.unmasked_fallback = true;
    return out;
  }
  const InfluenceMap influence = normalized_influence(trace, nullptr);
  const auto kept = lowest_influence_indices(influence.values, n - drop);
  std::vector<bool> excluded(n, true);
  for (std::size_t i : kept) excluded[i] = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (excluded[i]) out.excluded.push_back(i);
  }
  out.global_feature = max_pool(trace.per_point_features, excluded).values;
  return out;
}

RefocusResult refocus_infer(const ModelView& model, const PointCloud& cloud,
                            const RefocusConfig& config) {
  return refocus_from_first_pass(model, cloud, model.forward(cloud), config);
}

RefocusResult refocus_from_first_pass(const ModelView& model, const PointCloud& cloud,
                                      const ForwardTrace& first, const RefocusConfig& config) {
  config.validate();
  const std::size_t n = cloud.size();
  if (first.per_point_features.num_points() != n) {
    throw InvalidArgument("first-pass trace does not match the cloud");
  }
  RefocusResult result;
  auto& diag = result.diagnostics;

  const InfluenceMap influence = normalized_influence(first, &diag.degenerate_influence);
  diag.focus = focus(influence.values);

  if (config.variant == RefocusVariant::feature_space) {
    const MaskedFeature masked = feature_space_filter(first, diag.focus);
    diag.unmasked_fallback = masked.unmasked_fallback;
    std::vector<bool> excluded(n, false);
    for (std::size_t i : masked.excluded) excluded[i] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!excluded[i]) diag.retained.push_back(i);
    }
    diag.k = diag.retained.size();
    // Focus of the masked pooling, over the retained points.
    std::vector<double> counts(n, 0.0);
    if (!masked.unmasked_fallback && !masked.excluded.empty()) {
      for (std::size_t p : max_pool(first.per_point_features, excluded).argmax) {
        counts[p] += 1.0;
      }
    } else {
      for (std::size_t p : first.argmax_indices) counts[p] += 1.0;
    }
    std::vector<double> retained_counts;
    for (std::size_t i : diag.retained) retained_counts.push_back(counts[i]);
    diag.focus_after = focus(normalize(InfluenceMap{retained_counts}).values);
    result.prediction = prediction_from_logits(model.head(masked.global_feature));
    return result;
  }

  diag.k = config.fixed_k ? std::min(*config.fixed_k, n) : adaptive_k(diag.focus, n, config.k_min);
  diag.retained = lowest_influence_indices(influence.values, diag.k);
  const ForwardTrace second = diag.k == n ? first : model.forward(cloud.subset(diag.retained));
  diag.focus_after = focus(normalized_influence(second, nullptr).values);
  result.prediction = prediction_from_logits(second.logits);
  return result;
}

RefocusResult refocus_infer(const EncoderParams& params, const PointCloud& cloud,
                            const RefocusConfig& config) {
  return refocus_infer(ModelView::of(params), cloud, config);
}

PointCloud refocus_train_sample(const EncoderParams& params, const PointCloud& cloud, Rng& rng,
                                std::size_t min_points, std::size_t max_points) {
  if (min_points == 0 || max_points < min_points) throw InvalidArgument("invalid crop range");
  const std::size_t n = cloud.size();
  if (n < min_points) return cloud;
  const std::size_t k =
      std::uniform_int_distribution<std::size_t>(min_points, std::min(max_points, n))(rng);
  const InfluenceMap influence = normalized_influence(forward(params, cloud), nullptr);
  return cloud.subset(lowest_influence_indices(influence.values, k));
}

Sampler make_refocus_sampler(std::size_t min_points, std::size_t max_points) {
  return [min_points, max_points](const EncoderParams& p, const PointCloud& c, Rng& rng) {
    return refocus_train_sample(p, c, rng, min_points, max_points);
  };
}

Classifier make_refocus_classifier(const RefocusConfig& config) {
  return [config](const EncoderParams& p, const PointCloud& c) {
    return refocus_infer(p, c, config).prediction.label;
  };
}

}  // namespace refocus
