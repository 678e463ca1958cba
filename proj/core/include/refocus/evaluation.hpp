#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "refocus/corruptions.hpp"
#include "refocus/focus.hpp"
#include "refocus/network.hpp"
#include "refocus/refocusing.hpp"

namespace refocus {

enum class Defense { none, refocus, refocus_feature, srs, sor };

/// "none", "refocus", "refocus-feature", "srs", "sor"
[[nodiscard]] std::string_view defense_name(Defense defense) noexcept;
[[nodiscard]] Defense parse_defense(std::string_view name);

struct DefenseConfig {
  Defense defense = Defense::none;
  /// Used by the refocus defenses; the variant follows `defense`.
  RefocusConfig refocus{};
  double srs_drop = 0.3;
  std::size_t sor_k = 2;
  double sor_sigma = 1.1;
  /// Seeds the SRS draws (mixed with the sample index and stream).
  std::uint64_t seed = 0;
};

struct SampleOutcome {
  std::size_t label = 0;
  std::size_t predicted = 0;
  bool correct = false;
  std::size_t num_points = 0;
  /// Focus of the pipeline's first forward pass: the raw input for none and
  /// the refocus defenses, the filtered cloud for srs and sor.
  double focus = 0.0;
  /// Focus of the pass that produced the prediction (equals `focus` for none).
  double focus_after = 0.0;
  /// Points seen by the classifying pass.
  std::size_t k = 0;
};

/// Classifies one cloud under a defense. `stream` decorrelates SRS draws.
[[nodiscard]] SampleOutcome evaluate_sample(const EncoderParams& params, const LabeledCloud& sample,
                                            const DefenseConfig& defense, std::uint64_t stream = 0);

/// Per-sample outcomes in dataset order. `workers` threads share the
/// read-only parameters; results do not depend on the worker count.
[[nodiscard]] std::vector<SampleOutcome> evaluate(const EncoderParams& params, const Dataset& dataset,
                                                  const DefenseConfig& defense,
                                                  std::uint64_t stream = 0, std::size_t workers = 1);

[[nodiscard]] double overall_accuracy(std::span<const SampleOutcome> outcomes);
[[nodiscard]] double overall_accuracy(const EncoderParams& params, const Dataset& dataset,
                                      const DefenseConfig& defense = {}, std::size_t workers = 1);

enum class CeAggregation { sum_ratio, mean_ratio };

[[nodiscard]] std::string_view ce_aggregation_name(CeAggregation a) noexcept;
[[nodiscard]] CeAggregation parse_ce_aggregation(std::string_view name);

/// sum_ratio: sum_s (1 - acc_model) / sum_s (1 - acc_pivot).
/// mean_ratio: mean_s of (1 - acc_model) / (1 - acc_pivot).
/// Throws UndefinedCorruptionError naming the family when a pivot error
/// in the denominator is zero.
[[nodiscard]] double corruption_error(std::span<const double> model_accuracy,
                                      std::span<const double> pivot_accuracy, CorruptionFamily family,
                                      CeAggregation aggregation = CeAggregation::sum_ratio);

/// Unweighted mean over the given family CEs.
[[nodiscard]] double mean_corruption_error(const std::map<CorruptionFamily, double>& ce);

struct SuccessBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
  std::size_t correct = 0;
  /// correct / count; 0 for empty bins.
  double success_rate = 0.0;
  bool empty = true;
};

/// Success rate per focus bin (first-pass focus).
[[nodiscard]] std::vector<SuccessBin> focus_success_curve(std::span<const SampleOutcome> outcomes,
                                                          std::size_t bins = 50);

[[nodiscard]] std::vector<double> focus_values(std::span<const SampleOutcome> outcomes);

struct ExperimentConfig {
  DefenseConfig defense{};
  std::uint64_t corruption_seed = 0;
  SeveritySchedule schedule{};
  CeAggregation ce_aggregation = CeAggregation::sum_ratio;
  std::size_t bins = 50;
  std::size_t workers = 1;
  /// Echoed into the report only.
  std::string model_path;
  std::string pivot_path;
  std::string data_path;
};

struct CorruptionAccuracy {
  CorruptionFamily family{};
  int severity = 0;
  double accuracy = 0.0;
  double pivot_accuracy = 0.0;
  std::vector<SampleOutcome> outcomes;
};

struct EvalReport {
  ExperimentConfig config;
  std::vector<std::string> sample_ids;
  double clean_accuracy = 0.0;
  std::vector<SampleOutcome> clean_outcomes;
  /// 35 entries, families in declaration order, severities ascending.
  std::vector<CorruptionAccuracy> corruptions;
  /// Missing entries are families whose CE is undefined (pivot error zero).
  std::map<CorruptionFamily, double> ce;
  std::optional<double> mce;
  std::vector<std::string> undefined_ce;
  /// "clean" and one entry per family pooled over severities.
  std::map<std::string, std::vector<HistogramBin>> focus_histograms;
  /// "clean" and "corrupted" (all 35 sets pooled).
  std::map<std::string, std::vector<SuccessBin>> focus_success;
};

/// Evaluates `model` under the configured defense on the clean set and the
/// full 35-set corruption suite. CE uses `pivot` undefended; without a pivot
/// the model itself, undefended, is the pivot.
[[nodiscard]] EvalReport run_experiment(const EncoderParams& model, const EncoderParams* pivot,
                                        const Dataset& clean_test, const ExperimentConfig& config);

/// Mean wall-clock latency in milliseconds of one batch-of-1 inference under
/// the defense, over `iterations` runs cycling through the dataset.
[[nodiscard]] double mean_latency_ms(const EncoderParams& params, const Dataset& dataset,
                                     const DefenseConfig& defense, std::size_t iterations = 100);

}  // namespace refocus
