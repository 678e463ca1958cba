// refocus: command-line driver for data generation, training, corruption,
// evaluation and the influence/focus/outlier analyses.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "refocus/baselines.hpp"
#include "refocus/corruptions.hpp"
#include "refocus/error.hpp"
#include "refocus/evaluation.hpp"
#include "refocus/focus.hpp"
#include "refocus/geometry.hpp"
#include "refocus/influence.hpp"
#include "refocus/io.hpp"
#include "refocus/network.hpp"
#include "refocus/refocusing.hpp"
#include "refocus/report.hpp"

namespace fs = std::filesystem;
using namespace refocus;

namespace {

// Semantic flag problems found after parsing; reported like parse errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A dataset path is either a dataset directory or a root holding train/ and test/.
fs::path resolve_dataset(const fs::path& path, Split split) {
  if (fs::exists(path / "manifest.csv")) return path;
  const fs::path sub = path / split_name(split);
  if (fs::exists(sub / "manifest.csv")) return sub;
  throw Error("no dataset at " + path.string() + " (expected manifest.csv or " +
              std::string(split_name(split)) + "/manifest.csv)");
}

PointCloud load_cloud(const fs::path& path) {
  return path.extension() == ".rfpc" ? load_binary(path) : load_xyz(path);
}

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
  std::string out;
  std::size_t per_class = 200;
  std::optional<std::size_t> test_per_class;
  std::size_t points = 1024;
  std::uint64_t seed = 1;
};

void add_gen_data(CLI::App& app, GenDataArgs& a) {
  auto* cmd = app.add_subcommand("gen-data", "Generate the 8-class synthetic shape dataset (train/ and test/)");
  cmd->add_option("--out", a.out, "Output root directory")->required();
  cmd->add_option("--per-class", a.per_class, "Training clouds per class")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--test-per-class", a.test_per_class, "Test clouds per class [default: per-class / 4]")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--points", a.points, "Points per cloud")->capture_default_str()->check(CLI::Range(64, 1 << 20));
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
}

int run_gen_data(const GenDataArgs& a) {
  const std::size_t test_per_class = a.test_per_class.value_or(std::max<std::size_t>(1, a.per_class / 4));
  const fs::path out(a.out);
  const Dataset train = make_synthetic_dataset(a.per_class, a.points, a.seed, Split::train);
  const Dataset test = make_synthetic_dataset(test_per_class, a.points, a.seed, Split::test);
  save_dataset(out / "train", train);
  save_dataset(out / "test", test);
  std::cout << "wrote " << train.size() << " train and " << test.size() << " test clouds to " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string out;
  std::size_t epochs = 60;
  std::size_t batch_size = 32;
  double lr = 5e-4;
  std::string optimizer = "adam";
  std::uint64_t seed = 1;
  bool refocus = false;
  std::size_t k_min = 16;
  bool augment_scale = false;
  bool augment_translate = false;
  double validation_fraction = 0.1;
  bool quiet = false;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* cmd = app.add_subcommand("train", "Train the point-cloud classifier; writes model.rfnn and train_log.csv");
  cmd->add_option("--data", a.data, "Training dataset directory (or a root containing train/)")->required();
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--epochs", a.epochs, "Training epochs")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--batch-size", a.batch_size, "Mini-batch size")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--lr", a.lr, "Peak learning rate (cosine-annealed to zero)")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--optimizer", a.optimizer, "Optimizer")->capture_default_str()->check(CLI::IsMember({"adam", "sgd"}));
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_flag("--refocus", a.refocus, "Crop each sample to its least influential points (refocus training)");
  cmd->add_option("--k-min", a.k_min, "k_min of the refocus validator")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_flag("--augment-scale", a.augment_scale, "Random per-axis scaling in [2/3, 3/2]");
  cmd->add_flag("--augment-translate", a.augment_translate, "Random translation in [-0.2, 0.2]");
  cmd->add_option("--validation-fraction", a.validation_fraction, "Per-class holdout used to pick the best epoch")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.9));
  cmd->add_flag("--quiet", a.quiet, "Do not print per-epoch progress");
}

int run_train(const TrainArgs& a) {
  const Dataset data = load_dataset(resolve_dataset(a.data, Split::train), Split::train);
  TrainConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch_size;
  cfg.optimizer = a.optimizer == "sgd" ? Optimizer::sgd : Optimizer::adam;
  cfg.seed = a.seed;
  cfg.augment_scale = a.augment_scale;
  cfg.augment_translate = a.augment_translate;
  cfg.validation_fraction = a.validation_fraction;
  TrainOptions opts;
  if (a.refocus) {
    RefocusConfig rc;
    rc.k_min = a.k_min;
    opts.sampler = make_refocus_sampler();
    opts.validator = make_refocus_classifier(rc);
  }
  if (!a.quiet) {
    opts.on_epoch = [](const EpochLog& e) {
      std::cout << "epoch " << e.epoch << " lr " << fixed6(e.learning_rate) << " loss " << fixed6(e.train_loss)
                << " train_acc " << fixed6(e.train_accuracy) << " val_acc " << fixed6(e.validation_accuracy) << std::endl;
    };
  }
  const TrainResult result = train(data, cfg, opts);
  const fs::path out(a.out);
  fs::create_directories(out);
  save_checkpoint(out / "model.rfnn", result.params);
  std::string log = "epoch,learning_rate,train_loss,train_accuracy,validation_accuracy\n";
  for (const auto& e : result.history) {
    log += std::to_string(e.epoch) + "," + fixed6(e.learning_rate) + "," + fixed6(e.train_loss) + "," +
           fixed6(e.train_accuracy) + "," + fixed6(e.validation_accuracy) + "\n";
  }
  write_text(out / "train_log.csv", log);
  std::cout << "best epoch " << result.best_epoch << " validation accuracy " << fixed6(result.best_validation_accuracy)
            << "\n";
  return 0;
}

// ---------------------------------------------------------------- corrupt

struct CorruptArgs {
  std::string data;
  std::string out;
  std::uint64_t seed = 1;
  std::vector<std::string> families;
  std::vector<int> severities;
};

std::vector<std::string> family_names() {
  std::vector<std::string> names;
  for (auto f : kAllFamilies) names.emplace_back(family_name(f));
  return names;
}

void add_corrupt(CLI::App& app, CorruptArgs& a) {
  auto* cmd = app.add_subcommand("corrupt", "Write corrupted copies of a dataset as <family>_s<severity>/ with flags.csv");
  cmd->add_option("--data", a.data, "Clean dataset directory (or a root containing test/)")->required();
  cmd->add_option("--out", a.out, "Output root directory")->required();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--family", a.families, "Corruption families [default: all seven]")
      ->check(CLI::IsMember(family_names()));
  cmd->add_option("--severity", a.severities, "Severities [default: 1-5]")->check(CLI::Range(1, kNumSeverities));
}

int run_corrupt(const CorruptArgs& a) {
  const Dataset clean = load_dataset(resolve_dataset(a.data, Split::test));
  std::vector<CorruptionFamily> families;
  for (const auto& name : a.families) families.push_back(parse_family(name));
  if (families.empty()) families.assign(kAllFamilies.begin(), kAllFamilies.end());
  std::vector<int> severities = a.severities;
  if (severities.empty()) severities = {1, 2, 3, 4, 5};
  for (auto family : families) {
    for (int s : severities) {
      const CorruptedDataset c = corrupt_dataset(clean, family, s, a.seed);
      const fs::path dir = fs::path(a.out) / (std::string(family_name(family)) + "_s" + std::to_string(s));
      save_dataset(dir, c.data);
      save_flags(dir, c.data, c.flags);
    }
  }
  std::cout << "wrote " << families.size() * severities.size() << " corrupted datasets to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string defense = "none";
  std::optional<std::size_t> fixed_k;
  std::size_t k_min = 16;
  std::string pivot;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out;
  bool timing = false;
  std::size_t timing_iterations = 100;
  std::size_t bins = 50;
  std::string ce_aggregation = "sum";
  double srs_drop = 0.3;
  std::size_t sor_k = 2;
  double sor_sigma = 1.1;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* cmd = app.add_subcommand(
      "eval", "Evaluate a checkpoint on the clean set and the 35-set corruption suite; writes report.json and CSVs");
  cmd->add_option("--checkpoint", a.checkpoint, "Model checkpoint (.rfnn)")->required();
  cmd->add_option("--data", a.data, "Clean test dataset directory (or a root containing test/)")->required();
  cmd->add_option("--defense", a.defense, "Inference path")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "refocus", "refocus-feature", "srs", "sor"}));
  cmd->add_option("--fixed-k", a.fixed_k, "Keep exactly K points instead of the adaptive rule (refocus only)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--k-min", a.k_min, "Lower clamp on the adaptive K")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--pivot", a.pivot, "Pivot checkpoint for CE [default: the model itself, undefended]");
  cmd->add_option("--seed", a.seed, "Seed for corruptions and SRS")->capture_default_str();
  cmd->add_option("--workers", a.workers, "Evaluation threads; results do not depend on it")
      ->capture_default_str()
      ->check(CLI::Range(1, 256));
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_flag("--timing", a.timing, "Also write timing.json with the mean batch-1 latency");
  cmd->add_option("--timing-iterations", a.timing_iterations, "Iterations for --timing")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--bins", a.bins, "Focus histogram bins")->capture_default_str()->check(CLI::Range(1, 10000));
  cmd->add_option("--ce-aggregation", a.ce_aggregation, "CE over severities: sum of errors ratio or mean of ratios")
      ->capture_default_str()
      ->check(CLI::IsMember({"sum", "mean"}));
  cmd->add_option("--srs-drop", a.srs_drop, "Fraction of points SRS drops")->capture_default_str()->check(CLI::Range(0.0, 0.99));
  cmd->add_option("--sor-k", a.sor_k, "SOR neighbour count")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--sor-sigma", a.sor_sigma, "SOR standard-deviation multiplier")->capture_default_str()->check(CLI::NonNegativeNumber);
}

int run_eval(const EvalArgs& a) {
  const Defense defense = parse_defense(a.defense);
  if (a.fixed_k && defense != Defense::refocus) throw UsageError("--fixed-k requires --defense refocus");
  if (a.fixed_k && *a.fixed_k < a.k_min) throw UsageError("--fixed-k must be >= --k-min");

  ExperimentConfig cfg;
  cfg.defense.defense = defense;
  cfg.defense.refocus.k_min = a.k_min;
  cfg.defense.refocus.fixed_k = a.fixed_k;
  cfg.defense.srs_drop = a.srs_drop;
  cfg.defense.sor_k = a.sor_k;
  cfg.defense.sor_sigma = a.sor_sigma;
  cfg.defense.seed = a.seed;
  cfg.corruption_seed = a.seed;
  cfg.ce_aggregation = parse_ce_aggregation(a.ce_aggregation);
  cfg.bins = a.bins;
  cfg.workers = a.workers;
  cfg.model_path = a.checkpoint;
  cfg.pivot_path = a.pivot;
  cfg.data_path = a.data;

  const EncoderParams model = load_checkpoint(a.checkpoint);
  std::optional<EncoderParams> pivot;
  if (!a.pivot.empty()) pivot = load_checkpoint(a.pivot);
  const Dataset clean = load_dataset(resolve_dataset(a.data, Split::test));

  const EvalReport report = run_experiment(model, pivot ? &*pivot : nullptr, clean, cfg);
  write_report(a.out, report);
  std::cout << "clean OA " << fixed6(report.clean_accuracy) << ", mCE "
            << (report.mce ? fixed6(*report.mce) : std::string("undefined")) << "\n";
  for (const auto& name : report.undefined_ce) {
    std::cerr << "warning: CE undefined for " << name << " (pivot made no errors)\n";
  }
  if (a.timing) {
    const double ms = mean_latency_ms(model, clean, cfg.defense, a.timing_iterations);
    write_text(fs::path(a.out) / "timing.json", "{\n  \"defense\": \"" + a.defense + "\",\n  \"iterations\": " +
                                                    std::to_string(a.timing_iterations) +
                                                    ",\n  \"mean_latency_ms\": " + fixed6(ms) + "\n}\n");
    std::cout << "mean latency " << fixed6(ms) << " ms over " << a.timing_iterations << " batch-1 iterations\n";
  }
  return 0;
}

// ---------------------------------------------------------------- focus-stats

struct FocusStatsArgs {
  std::string checkpoint;
  std::string data;
  std::string reference;
  std::string out;
  double alpha = 1.0;
  double beta = 1.0;
  std::size_t bins = 50;
  std::size_t workers = 1;
};

void add_focus_stats(CLI::App& app, FocusStatsArgs& a) {
  auto* cmd = app.add_subcommand("focus-stats", "Per-sample focus, over/under-focus bands and a focus histogram");
  cmd->add_option("--checkpoint", a.checkpoint, "Model checkpoint (.rfnn)")->required();
  cmd->add_option("--data", a.data, "Dataset to score (directory, or a root containing test/)")->required();
  cmd->add_option("--reference", a.reference,
                  "Dataset giving mu and sigma [default: train/ next to --data when --data is a root]");
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--alpha", a.alpha, "Over-focus edge: mu + alpha*sigma")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--beta", a.beta, "Under-focus edge: mu - beta*sigma")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--bins", a.bins, "Histogram bins")->capture_default_str()->check(CLI::Range(1, 10000));
  cmd->add_option("--workers", a.workers, "Evaluation threads")->capture_default_str()->check(CLI::Range(1, 256));
}

int run_focus_stats(const FocusStatsArgs& a) {
  fs::path reference_dir;
  if (!a.reference.empty()) {
    reference_dir = resolve_dataset(a.reference, Split::train);
  } else if (fs::exists(fs::path(a.data) / "train" / "manifest.csv")) {
    reference_dir = fs::path(a.data) / "train";
  } else {
    throw UsageError("--reference is required when --data is not a root containing train/");
  }
  const EncoderParams params = load_checkpoint(a.checkpoint);
  const Dataset data = load_dataset(resolve_dataset(a.data, Split::test));
  const Dataset reference = load_dataset(reference_dir, Split::train);

  const auto ref_focus = focus_values(evaluate(params, reference, {}, 0, a.workers));
  const FocusStats stats = focus_stats(ref_focus, a.alpha, a.beta);
  const auto values = focus_values(evaluate(params, data, {}, 0, a.workers));

  std::string csv = "file,focus,band\n";
  std::size_t counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const FocusBand band = classify_focus(values[i], stats);
    ++counts[static_cast<int>(band)];
    csv += data.samples[i].id + "," + fixed6(values[i]) + "," + std::string(band_name(band)) + "\n";
  }
  const fs::path out(a.out);
  write_text(out / "focus.csv", csv);
  std::string hist = "left,right,count\n";
  for (const auto& b : focus_histogram(values, a.bins)) {
    hist += fixed6(b.left) + "," + fixed6(b.right) + "," + std::to_string(b.count) + "\n";
  }
  write_text(out / "histogram.csv", hist);
  write_text(out / "stats.json", "{\n  \"reference\": \"" + reference_dir.generic_string() + "\",\n  \"mu\": " +
                                     fixed6(stats.mu) + ",\n  \"sigma\": " + fixed6(stats.sigma) +
                                     ",\n  \"alpha\": " + fixed6(stats.alpha) + ",\n  \"beta\": " + fixed6(stats.beta) +
                                     ",\n  \"under\": " + std::to_string(counts[0]) +
                                     ",\n  \"in\": " + std::to_string(counts[1]) +
                                     ",\n  \"over\": " + std::to_string(counts[2]) + "\n}\n");
  std::cout << "mu " << fixed6(stats.mu) << " sigma " << fixed6(stats.sigma) << "; under " << counts[0] << ", in "
            << counts[1] << ", over " << counts[2] << "\n";
  return 0;
}

// ---------------------------------------------------------------- influence

struct InfluenceArgs {
  std::string checkpoint;
  std::string cloud;
  std::string variant = "argmax";
  bool normalized = false;
  std::string out;
};

void add_influence(CLI::App& app, InfluenceArgs& a) {
  auto* cmd = app.add_subcommand("influence", "Per-point influence map of one cloud; writes influence.csv");
  cmd->add_option("--checkpoint", a.checkpoint, "Model checkpoint (.rfnn)")->required();
  cmd->add_option("--cloud", a.cloud, "Point cloud (.xyz, or .rfpc binary)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--variant", a.variant, "argmax: column-win counts; l1: sum of |feature| per point")
      ->capture_default_str()
      ->check(CLI::IsMember({"argmax", "l1"}));
  cmd->add_flag("--normalize", a.normalized, "Scale the map to unit sum");
  cmd->add_option("--out", a.out, "Output directory")->required();
}

int run_influence(const InfluenceArgs& a) {
  const EncoderParams params = load_checkpoint(a.checkpoint);
  const PointCloud cloud = load_cloud(a.cloud);
  const ForwardTrace trace = forward(params, cloud);
  InfluenceMap map = a.variant == "l1" ? l1_feature_influence(trace) : argmax_count_influence(trace);
  const InfluenceMap unit = normalize(map);
  if (a.normalized) map = unit;
  const bool integral = a.variant == "argmax" && !a.normalized;
  std::string csv = "point_index,value\n";
  for (std::size_t i = 0; i < map.size(); ++i) {
    csv += std::to_string(i) + "," +
           (integral ? std::to_string(static_cast<long long>(map.values[i])) : fixed6(map.values[i])) + "\n";
  }
  write_text(fs::path(a.out) / "influence.csv", csv);
  std::cout << "N " << cloud.size() << ", focus " << fixed6(focus(unit.values)) << "\n";
  return 0;
}

// ---------------------------------------------------------------- outliers

struct OutliersArgs {
  std::string checkpoint;
  std::string data;
  std::string out;
  int severity = 3;
  std::uint64_t seed = 1;
  std::size_t sor_k = 2;
};

void add_outliers(CLI::App& app, OutliersArgs& a) {
  auto* cmd = app.add_subcommand(
      "outliers", "Precision/recall of influence-based outlier removal and an SOR sigma sweep against add_* flags");
  cmd->add_option("--checkpoint", a.checkpoint, "Model checkpoint (.rfnn)")->required();
  cmd->add_option("--data", a.data,
                  "Corrupted dataset with flags.csv, or a clean dataset (or root) to corrupt with add_local")
      ->required();
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--severity", a.severity, "add_local severity used when --data has no flags.csv")
      ->capture_default_str()
      ->check(CLI::Range(1, kNumSeverities));
  cmd->add_option("--seed", a.seed, "Corruption seed used when --data has no flags.csv")->capture_default_str();
  cmd->add_option("--sor-k", a.sor_k, "SOR neighbour count")->capture_default_str()->check(CLI::PositiveNumber);
}

int run_outliers(const OutliersArgs& a) {
  const EncoderParams params = load_checkpoint(a.checkpoint);
  const fs::path dir = resolve_dataset(a.data, Split::test);
  Dataset data = load_dataset(dir);
  std::vector<std::vector<bool>> flags;
  if (fs::exists(dir / "flags.csv")) {
    flags = load_flags(dir, data);
  } else {
    CorruptedDataset c = corrupt_dataset(data, CorruptionFamily::add_local, a.severity, a.seed);
    data = std::move(c.data);
    flags = std::move(c.flags);
  }

  std::vector<double> sigmas;
  for (int i = 0; i <= 10; ++i) sigmas.push_back(0.5 + 0.25 * i);
  std::vector<std::string> methods{"influence"};
  for (double s : sigmas) methods.push_back("sor_" + fixed6(s).substr(0, 4));
  std::vector<double> sum_p(methods.size(), 0.0), sum_r(methods.size(), 0.0);

  std::string csv = "file,method,precision,recall\n";
  auto row = [&](std::size_t sample, std::size_t method, const std::vector<std::size_t>& removed) {
    const PrecisionRecall pr = precision_recall(removed, flags[sample]);
    sum_p[method] += pr.precision;
    sum_r[method] += pr.recall;
    csv += data.samples[sample].id + "," + methods[method] + "," + fixed6(pr.precision) + "," + fixed6(pr.recall) + "\n";
  };
  for (std::size_t i = 0; i < data.size(); ++i) {
    const PointCloud& cloud = data.samples[i].cloud;
    row(i, 0, influence_outlier_removal(params, cloud).removed);
    const auto d = sor_mean_distances(cloud, a.sor_k);
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
      const auto keep = sor_keep_mask(d, sigmas[s]);
      std::vector<std::size_t> removed;
      for (std::size_t j = 0; j < keep.size(); ++j) {
        if (!keep[j]) removed.push_back(j);
      }
      row(i, s + 1, removed);
    }
  }
  const fs::path out(a.out);
  write_text(out / "outliers.csv", csv);
  std::string summary = "method,mean_precision,mean_recall\n";
  const auto n = static_cast<double>(data.size());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    summary += methods[m] + "," + fixed6(sum_p[m] / n) + "," + fixed6(sum_r[m] / n) + "\n";
  }
  write_text(out / "summary.csv", summary);
  std::cout << summary;
  return 0;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::string report;
  std::string out;
};

void add_report(CLI::App& app, ReportArgs& a) {
  auto* cmd = app.add_subcommand("report", "Render an eval report.json as a Markdown summary (report.md)");
  cmd->add_option("--report", a.report, "report.json, or the eval output directory holding it")->required();
  cmd->add_option("--out", a.out, "Output directory")->required();
}

int run_report(const ReportArgs& a) {
  fs::path path(a.report);
  if (fs::is_directory(path)) path /= "report.json";
  const std::string md = render_report(read_text(path), path.string());
  write_text(fs::path(a.out) / "report.md", md);
  std::cout << md;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"refocus: focus-based refocused inference for point-cloud classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "refocus 0.1.0");

  GenDataArgs gen;
  TrainArgs tr;
  CorruptArgs cor;
  EvalArgs ev;
  FocusStatsArgs fst;
  InfluenceArgs inf;
  OutliersArgs outl;
  ReportArgs rep;
  add_gen_data(app, gen);
  add_train(app, tr);
  add_corrupt(app, cor);
  add_eval(app, ev);
  add_focus_stats(app, fst);
  add_influence(app, inf);
  add_outliers(app, outl);
  add_report(app, rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "gen-data") return run_gen_data(gen);
    if (name == "train") return run_train(tr);
    if (name == "corrupt") return run_corrupt(cor);
    if (name == "eval") return run_eval(ev);
    if (name == "focus-stats") return run_focus_stats(fst);
    if (name == "influence") return run_influence(inf);
    if (name == "outliers") return run_outliers(outl);
    if (name == "report") return run_report(rep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
