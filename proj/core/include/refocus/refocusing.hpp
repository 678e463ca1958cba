#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "refocus/influence.hpp"
#include "refocus/network.hpp"

namespace refocus {

enum class RefocusVariant { euclidean, feature_space };

struct RefocusConfig {
  /// Lower clamp on the number of retained points.
  std::size_t k_min = 16;
  RefocusVariant variant = RefocusVariant::euclidean;
  /// Retain exactly this many points (clamped to N) instead of the adaptive rule.
  std::optional<std::size_t> fixed_k;

  /// Throws InvalidArgument unless k_min >= 1 and fixed_k >= k_min.
  void validate() const;
};

/// floor((1 - f) * N), clamped to [k_min, N].
[[nodiscard]] std::size_t adaptive_k(double f, std::size_t n, std::size_t k_min = 16);

/// Indices of the k smallest values (ties: lower index first), returned in
/// increasing index order.
[[nodiscard]] std::vector<std::size_t> lowest_influence_indices(std::span<const double> influence,
                                                                std::size_t k);

/// The k least influential points, original relative order preserved.
[[nodiscard]] PointCloud select_lowest(const PointCloud& cloud, const InfluenceMap& influence,
                                       std::size_t k);

/// What refocus_infer needs from a classifier: a forward pass that exposes
/// the pre-pooling features and logits, and the head on a global feature.
struct ModelView {
  std::function<ForwardTrace(const PointCloud&)> forward;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> head;

  [[nodiscard]] static ModelView of(const EncoderParams& params);
};

struct RefocusDiagnostics {
  double focus = 0.0;        // from the first pass, drives K
  double focus_after = 0.0;  // recomputed on the retained points
  std::size_t k = 0;         // retained point count
  std::vector<std::size_t> retained;
  /// Influence had no mass; uniform influence was used instead.
  bool degenerate_influence = false;
  /// Feature-space variant would have excluded every point; unmasked feature used.
  bool unmasked_fallback = false;
};

struct RefocusResult {
  Prediction prediction;
  RefocusDiagnostics diagnostics;
};

/// Dual-pass refocused inference: argmax-count influence and focus from the
/// first pass pick K, the K least influential points are classified by a
/// second pass. The feature-space variant instead re-pools the first pass
/// without the most influential points.
[[nodiscard]] RefocusResult refocus_infer(const ModelView& model, const PointCloud& cloud,
                                          const RefocusConfig& config = {});
[[nodiscard]] RefocusResult refocus_infer(const EncoderParams& params, const PointCloud& cloud,
                                          const RefocusConfig& config = {});
/// Same as refocus_infer with the first pass already computed, so several
/// configurations can share it.
[[nodiscard]] RefocusResult refocus_from_first_pass(const ModelView& model, const PointCloud& cloud,
                                                    const ForwardTrace& first,
                                                    const RefocusConfig& config = {});

struct MaskedFeature {
  Eigen::VectorXd global_feature;
  std::vector<std::size_t> excluded;  // increasing index order
  bool unmasked_fallback = false;
};

/// Recomputes every global-feature column without the ceil(f*N) most
/// influential points (argmax-count influence of `trace`).
[[nodiscard]] MaskedFeature feature_space_filter(const ForwardTrace& trace, double f);

/// Training crop: K uniform in [min_points, min(max_points, N)] lowest-influence
/// points under the current parameters. Clouds with N < min_points are
/// returned unchanged.
[[nodiscard]] PointCloud refocus_train_sample(const EncoderParams& params, const PointCloud& cloud,
                                              Rng& rng, std::size_t min_points = 256,
                                              std::size_t max_points = 1024);

[[nodiscard]] Sampler make_refocus_sampler(std::size_t min_points = 256,
                                           std::size_t max_points = 1024);

/// Validation classifier matching refocus_infer.
[[nodiscard]] Classifier make_refocus_classifier(const RefocusConfig& config = {});

[[nodiscard]] std::string_view variant_name(RefocusVariant variant) noexcept;

}  // namespace refocus
