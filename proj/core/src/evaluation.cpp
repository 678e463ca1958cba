#include "refocus/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "refocus/baselines.hpp"
#include "refocus/error.hpp"
#include "refocus/influence.hpp"
#include "refocus/random.hpp"

namespace refocus {

std::string_view defense_name(Defense defense) noexcept {
  switch (defense) {
    case Defense::none: return "none";
    case Defense::refocus: return "refocus";
    case Defense::refocus_feature: return "refocus-feature";
    case Defense::srs: return "srs";
    case Defense::sor: return "sor";
  }
  return "unknown";
}

Defense parse_defense(std::string_view name) {
  for (auto d : {Defense::none, Defense::refocus, Defense::refocus_feature, Defense::srs, Defense::sor}) {
    if (defense_name(d) == name) return d;
  }
  throw InvalidArgument("unknown defense '" + std::string(name) + "'");
}

std::string_view ce_aggregation_name(CeAggregation a) noexcept {
  return a == CeAggregation::sum_ratio ? "sum" : "mean";
}

CeAggregation parse_ce_aggregation(std::string_view name) {
  if (name == "sum") return CeAggregation::sum_ratio;
  if (name == "mean") return CeAggregation::mean_ratio;
  throw InvalidArgument("unknown CE aggregation '" + std::string(name) + "' (expected sum or mean)");
}

namespace {

// Focus of a trace's argmax-count influence; a map without mass counts as uniform.
double trace_focus(const ForwardTrace& trace) {
  try {
    return focus(normalize(argmax_count_influence(trace)).values);
  } catch (const DegenerateInfluence&) {
    return 0.0;
  }
}

SampleOutcome single_pass(const EncoderParams& params, const PointCloud& cloud) {
  const ForwardTrace trace = forward(params, cloud);
  SampleOutcome out;
  out.predicted = argmax(trace.logits);
  out.focus = out.focus_after = trace_focus(trace);
  out.k = cloud.size();
  return out;
}

}  // namespace

SampleOutcome evaluate_sample(const EncoderParams& params, const LabeledCloud& sample,
                              const DefenseConfig& defense, std::uint64_t stream) {
  const PointCloud& cloud = sample.cloud;
  SampleOutcome out;
  switch (defense.defense) {
    case Defense::none:
      out = single_pass(params, cloud);
      break;
    case Defense::refocus:
    case Defense::refocus_feature: {
      RefocusConfig cfg = defense.refocus;
      cfg.variant = defense.defense == Defense::refocus ? RefocusVariant::euclidean
                                                        : RefocusVariant::feature_space;
      const RefocusResult r = refocus_infer(params, cloud, cfg);
      out.predicted = r.prediction.label;
      out.focus = r.diagnostics.focus;
      out.focus_after = r.diagnostics.focus_after;
      out.k = r.diagnostics.k;
      break;
    }
    case Defense::srs:
      out = single_pass(params, srs(cloud, defense.srs_drop, mix_seed(defense.seed, {stream})).cloud);
      break;
    case Defense::sor:
      out = single_pass(params, sor(cloud, defense.sor_k, defense.sor_sigma).cloud);
      break;
  }
  out.label = sample.label;
  out.correct = out.predicted == sample.label;
  out.num_points = cloud.size();
  return out;
}

std::vector<SampleOutcome> evaluate(const EncoderParams& params, const Dataset& dataset,
                                    const DefenseConfig& defense, std::uint64_t stream,
                                    std::size_t workers) {
  const std::size_t n = dataset.size();
  std::vector<SampleOutcome> outcomes(n);
  auto run_one = [&](std::size_t i) {
    outcomes[i] = evaluate_sample(params, dataset.samples[i], defense, mix_seed(stream, {i}));
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
    return outcomes;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return outcomes;
}

double overall_accuracy(std::span<const SampleOutcome> outcomes) {
  if (outcomes.empty()) throw InvalidArgument("accuracy of an empty dataset is undefined");
  const auto correct = std::count_if(outcomes.begin(), outcomes.end(),
                                     [](const SampleOutcome& o) { return o.correct; });
  return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

double overall_accuracy(const EncoderParams& params, const Dataset& dataset, const DefenseConfig& defense,
                        std::size_t workers) {
  return overall_accuracy(evaluate(params, dataset, defense, 0, workers));
}

double corruption_error(std::span<const double> model_accuracy, std::span<const double> pivot_accuracy,
                        CorruptionFamily family, CeAggregation aggregation) {
  if (model_accuracy.empty() || model_accuracy.size() != pivot_accuracy.size()) {
    throw InvalidArgument("CE needs matching, non-empty model and pivot severity lists");
  }
  for (auto list : {model_accuracy, pivot_accuracy}) {
    for (double a : list) {
      if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("accuracies must lie in [0, 1]");
    }
  }
  const std::string undefined =
      "corruption error undefined for family " + std::string(family_name(family)) + ": pivot error is zero";
  if (aggregation == CeAggregation::sum_ratio) {
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < model_accuracy.size(); ++s) {
      num += 1.0 - model_accuracy[s];
      den += 1.0 - pivot_accuracy[s];
    }
    if (den == 0.0) throw UndefinedCorruptionError(undefined);
    return num / den;
  }
  double sum = 0.0;
  for (std::size_t s = 0; s < model_accuracy.size(); ++s) {
    const double den = 1.0 - pivot_accuracy[s];
    if (den == 0.0) throw UndefinedCorruptionError(undefined);
    sum += (1.0 - model_accuracy[s]) / den;
  }
  return sum / static_cast<double>(model_accuracy.size());
}

double mean_corruption_error(const std::map<CorruptionFamily, double>& ce) {
  if (ce.empty()) throw InvalidArgument("mCE needs at least one family");
  double sum = 0.0;
  for (const auto& [family, value] : ce) sum += value;
  return sum / static_cast<double>(ce.size());
}

std::vector<double> focus_values(std::span<const SampleOutcome> outcomes) {
  std::vector<double> values;
  values.reserve(outcomes.size());
  for (const auto& o : outcomes) values.push_back(o.focus);
  return values;
}

std::vector<SuccessBin> focus_success_curve(std::span<const SampleOutcome> outcomes, std::size_t bins) {
  if (bins == 0) throw InvalidArgument("bins must be positive");
  std::vector<SuccessBin> curve(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    curve[b].left = static_cast<double>(b) / static_cast<double>(bins);
    curve[b].right = static_cast<double>(b + 1) / static_cast<double>(bins);
  }
  for (const auto& o : outcomes) {
    auto& bin = curve[focus_bin(o.focus, bins)];
    ++bin.count;
    if (o.correct) ++bin.correct;
  }
  for (auto& bin : curve) {
    bin.empty = bin.count == 0;
    bin.success_rate = bin.empty ? 0.0 : static_cast<double>(bin.correct) / static_cast<double>(bin.count);
  }
  return curve;
}

EvalReport run_experiment(const EncoderParams& model, const EncoderParams* pivot, const Dataset& clean_test,
                          const ExperimentConfig& config) {
  if (clean_test.samples.empty()) throw InvalidArgument("evaluation dataset is empty");
  if (clean_test.num_classes() > model.num_classes()) {
    throw InvalidArgument("dataset has " + std::to_string(clean_test.num_classes()) +
                          " classes but the model predicts " + std::to_string(model.num_classes()));
  }
  if (pivot != nullptr && pivot->num_classes() != model.num_classes()) {
    throw InvalidArgument("pivot and model disagree on the number of classes");
  }
  config.defense.refocus.validate();

  EvalReport report;
  report.config = config;
  for (const auto& s : clean_test.samples) report.sample_ids.push_back(s.id);

  const DefenseConfig undefended{};
  const EncoderParams& pivot_params = pivot != nullptr ? *pivot : model;
  const bool pivot_is_model = pivot == nullptr && config.defense.defense == Defense::none;

  report.clean_outcomes = evaluate(model, clean_test, config.defense, mix_seed(0, {0xC1EA}), config.workers);
  report.clean_accuracy = overall_accuracy(report.clean_outcomes);

  for (auto family : kAllFamilies) {
    for (int s = 1; s <= kNumSeverities; ++s) {
      const CorruptedDataset corrupted =
          corrupt_dataset(clean_test, family, s, config.corruption_seed, config.schedule);
      const std::uint64_t stream = mix_seed(1, {static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(s)});
      CorruptionAccuracy entry;
      entry.family = family;
      entry.severity = s;
      entry.outcomes = evaluate(model, corrupted.data, config.defense, stream, config.workers);
      entry.accuracy = overall_accuracy(entry.outcomes);
      entry.pivot_accuracy =
          pivot_is_model ? entry.accuracy
                         : overall_accuracy(evaluate(pivot_params, corrupted.data, undefended, stream, config.workers));
      report.corruptions.push_back(std::move(entry));
    }
  }

  for (auto family : kAllFamilies) {
    std::vector<double> model_acc, pivot_acc;
    std::vector<double> pooled_focus;
    for (const auto& c : report.corruptions) {
      if (c.family != family) continue;
      model_acc.push_back(c.accuracy);
      pivot_acc.push_back(c.pivot_accuracy);
      for (const auto& o : c.outcomes) pooled_focus.push_back(o.focus);
    }
    try {
      report.ce[family] = corruption_error(model_acc, pivot_acc, family, config.ce_aggregation);
    } catch (const UndefinedCorruptionError&) {
      report.undefined_ce.emplace_back(family_name(family));
    }
    report.focus_histograms[std::string(family_name(family))] = focus_histogram(pooled_focus, config.bins);
  }
  if (report.undefined_ce.empty()) report.mce = mean_corruption_error(report.ce);

  report.focus_histograms["clean"] = focus_histogram(focus_values(report.clean_outcomes), config.bins);
  report.focus_success["clean"] = focus_success_curve(report.clean_outcomes, config.bins);
  std::vector<SampleOutcome> pooled;
  for (const auto& c : report.corruptions) pooled.insert(pooled.end(), c.outcomes.begin(), c.outcomes.end());
  report.focus_success["corrupted"] = focus_success_curve(pooled, config.bins);
  return report;
}

double mean_latency_ms(const EncoderParams& params, const Dataset& dataset, const DefenseConfig& defense,
                       std::size_t iterations) {
  if (dataset.samples.empty()) throw InvalidArgument("timing needs a non-empty dataset");
  if (iterations == 0) throw InvalidArgument("timing needs at least one iteration");
  std::size_t sink = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < iterations; ++i) {
    sink += evaluate_sample(params, dataset.samples[i % dataset.size()], defense, i).predicted;
  }
  const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
  static_cast<void>(sink);
  return elapsed.count() / static_cast<double>(iterations);
}

}  // namespace refocus
