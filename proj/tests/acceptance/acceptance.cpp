// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   refocus_acceptance [--workdir DIR] [--reuse] [--epochs N]
//
// --reuse loads vanilla.rfnn / refocus.rfnn from a previous run in DIR instead
// of training; the training criterion then reports the cached model and is
// marked as not timed. ctest never passes --reuse.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "refocus/baselines.hpp"
#include "refocus/corruptions.hpp"
#include "refocus/evaluation.hpp"
#include "refocus/focus.hpp"
#include "refocus/geometry.hpp"
#include "refocus/influence.hpp"
#include "refocus/io.hpp"
#include "refocus/network.hpp"
#include "refocus/refocusing.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace refocus;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Line {
  std::string id;
  std::string title;
  Outcome outcome;
};

std::vector<Line> g_lines;

void report(const std::string& id, const std::string& title, Outcome o) {
  std::printf("[%s] %s %s: %s\n", o.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(), o.detail.c_str());
  std::fflush(stdout);
  g_lines.push_back({id, title, std::move(o)});
}

void note(const std::string& text) {
  std::printf("       %s\n", text.c_str());
  std::fflush(stdout);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_sd(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

// ------------------------------------------------------------------ 1

Outcome focus_law_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> small_n(2, 64), large_n(65, 4096);
  std::uniform_int_distribution<int> shape(0, 4);
  std::size_t bad_range = 0, bad_uniform = 0, bad_onehot = 0;
  double worst_uniform = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = (t % 4 == 0) ? large_n(rng) : small_n(rng);
    std::vector<double> p;
    const int kind = shape(rng);
    if (kind == 0) {
      p.assign(n, 1.0 / static_cast<double>(n));
    } else if (kind == 1) {
      p.assign(n, 0.0);
      p[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1.0;
    } else {
      p = testing::random_distribution(n, rng, kind == 2 ? 0.0 : (kind == 3 ? 0.5 : 0.95));
    }
    const double f = focus(p);
    if (!(f >= 0.0 && f <= 1.0)) ++bad_range;
    if (kind == 0) {
      worst_uniform = std::max(worst_uniform, std::abs(f));
      if (std::abs(f) > 1e-12) ++bad_uniform;
    }
    if (kind == 1 && f != 1.0) ++bad_onehot;
  }
  std::size_t bad_size = 0;
  for (std::size_t n : {2u, 256u, 4096u}) {
    const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
    std::vector<double> onehot(n, 0.0);
    onehot[n / 2] = 1.0;
    if (std::abs(focus(uniform)) > 1e-12) ++bad_size;
    if (focus(onehot) != 1.0) ++bad_size;
  }
  const double secs = seconds_since(t0);
  const bool pass = bad_range == 0 && bad_uniform == 0 && bad_onehot == 0 && bad_size == 0 && secs < 5.0;
  return {pass, "10000 distributions; out-of-range " + std::to_string(bad_range) + ", uniform>1e-12 " +
                    std::to_string(bad_uniform) + " (worst " + fmt("%.1e", worst_uniform) + "), one-hot!=1 " +
                    std::to_string(bad_onehot) + ", size-extreme failures " + std::to_string(bad_size) + "; " +
                    fmt("%.2f s", secs) + " (< 5 s)"};
}

// ------------------------------------------------------------------ 2

Outcome arithmetic_anchors() {
  const std::vector<double> p{0.7, 0.1, 0.1, 0.1};
  // Oracle: long-double entropy from the closed form, independent of the library.
  const long double h_oracle = -(0.7L * std::log(0.7L) + 3.0L * 0.1L * std::log(0.1L));
  const long double f_oracle = 1.0L - h_oracle / std::log(4.0L);
  const double h = entropy(p);
  const double f = focus(p);
  const std::size_t k = adaptive_k(0.1, 1024);
  const bool ok_h = std::abs(h - static_cast<double>(h_oracle)) <= 1e-6;
  const bool ok_f = std::abs(f - static_cast<double>(f_oracle)) <= 1e-6;
  // The quoted focus anchor 0.321643 does not follow from H = 0.940448 and
  // ln 4; the exact value is 0.321610. Show both, judge against the oracle.
  const double quoted_f = 0.321643;
  return {ok_h && ok_f && k == 921,
          "entropy " + fmt("%.9f", h) + " (oracle " + fmt("%.9f", static_cast<double>(h_oracle)) +
              ", quoted 0.940448), focus " + fmt("%.9f", f) + " (oracle " +
              fmt("%.9f", static_cast<double>(f_oracle)) + ", quoted 0.321643 off by " +
              fmt("%.1e", std::abs(quoted_f - f)) + "), adaptive_k(0.1,1024)=" + std::to_string(k)};
}

// ------------------------------------------------------------------ 3

Outcome gradient_check() {
  const auto t0 = Clock::now();
  Architecture arch;  // full default widths
  arch.num_classes = 8;
  EncoderParams params = EncoderParams::initialize(arch, 17);
  // Central differences are only meaningful where the loss is smooth on
  // [theta-h, theta+h]. These clouds keep every ReLU and max-pool selection
  // away from a switch at h = 1e-5 (seeds 101/202 put a few layer-1 weights
  // within h of a kink, where the one-sided differences disagree).
  const std::vector<LabeledCloud> batch{{testing::random_cloud(6, 1101), 3, "a"},
                                        {testing::random_cloud(5, 1202), 6, "b"}};
  const LossAndGrads analytic = loss_and_grads(params, batch);
  const double h = 1e-5;
  // Relative 1e-4; below 1e-6 the central difference is dominated by roundoff
  // (~eps*|L|/h = 2e-11, i.e. 1e-4 relative at 2e-7), so compare absolutely there.
  const double floor = 1e-6;
  auto p = params.tensors();
  auto g = analytic.grads.tensors();
  std::size_t checked = 0, failed = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    for (std::size_t j = 0; j < p[t].size(); ++j) {
      const double orig = p[t][j];
      p[t][j] = orig + h;
      const double up = batch_loss(params, batch);
      p[t][j] = orig - h;
      const double down = batch_loss(params, batch);
      p[t][j] = orig;
      const double fd = (up - down) / (2.0 * h);
      const double a = g[t][j];
      const double scale = std::max({std::abs(a), std::abs(fd), floor});
      const double rel = std::abs(a - fd) / scale;
      worst = std::max(worst, rel);
      if (rel > 1e-4) ++failed;
      ++checked;
    }
  }
  const double secs = seconds_since(t0);
  return {failed == 0 && secs < 60.0, std::to_string(checked) + " parameters, " + std::to_string(failed) +
                                           " outside relative 1e-4 (worst " + fmt("%.2e", worst) + "); " +
                                           fmt("%.1f s", secs) + " (< 60 s)"};
}

// ------------------------------------------------------------------ shared models

struct Models {
  EncoderParams vanilla;
  EncoderParams refocused;
  double vanilla_train_seconds = 0.0;
  bool reused = false;
};

// ------------------------------------------------------------------ 8 & 9 sweep

struct SuiteAccuracies {
  // per family, per severity
  std::map<CorruptionFamily, std::vector<double>> pivot, adaptive;
  std::map<std::size_t, std::map<CorruptionFamily, std::vector<double>>> fixed;
};

const std::vector<std::size_t> kFixedKs{256, 400, 600, 800, 1000};

SuiteAccuracies suite_sweep(const Models& m, const Dataset& test) {
  SuiteAccuracies acc;
  const ModelView view = ModelView::of(m.refocused);
  for (auto family : kAllFamilies) {
    for (int s = 1; s <= kNumSeverities; ++s) {
      const CorruptedDataset cd = corrupt_dataset(test, family, s, 1);
      std::size_t pivot_ok = 0, adaptive_ok = 0;
      std::map<std::size_t, std::size_t> fixed_ok;
      for (const auto& sample : cd.data.samples) {
        pivot_ok += predict(m.vanilla, sample.cloud).label == sample.label;
        const ForwardTrace first = view.forward(sample.cloud);
        adaptive_ok += refocus_from_first_pass(view, sample.cloud, first).prediction.label == sample.label;
        for (std::size_t k : kFixedKs) {
          RefocusConfig cfg;
          cfg.fixed_k = k;
          fixed_ok[k] += refocus_from_first_pass(view, sample.cloud, first, cfg).prediction.label == sample.label;
        }
      }
      const auto n = static_cast<double>(cd.data.size());
      acc.pivot[family].push_back(static_cast<double>(pivot_ok) / n);
      acc.adaptive[family].push_back(static_cast<double>(adaptive_ok) / n);
      for (std::size_t k : kFixedKs) acc.fixed[k][family].push_back(static_cast<double>(fixed_ok[k]) / n);
    }
  }
  return acc;
}

double suite_mce(const std::map<CorruptionFamily, std::vector<double>>& model,
                 const std::map<CorruptionFamily, std::vector<double>>& pivot) {
  std::map<CorruptionFamily, double> ce;
  for (auto family : kAllFamilies) ce[family] = corruption_error(model.at(family), pivot.at(family), family);
  return mean_corruption_error(ce);
}

// ------------------------------------------------------------------ 11

int run_cli(const std::string& args) {
  const std::string cmd = std::string(REFOCUS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

// Every regular file under a, keyed by relative path, must match b byte for byte.
bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::map<std::string, std::string> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) fa[fs::relative(e.path(), a).generic_string()] = testing::slurp(e.path());
  }
  for (const auto& e : fs::recursive_directory_iterator(b)) {
    if (e.is_regular_file()) fb[fs::relative(e.path(), b).generic_string()] = testing::slurp(e.path());
  }
  if (fa.size() != fb.size()) {
    why = "file sets differ under " + a.string();
    return false;
  }
  for (const auto& [name, bytes] : fa) {
    const auto it = fb.find(name);
    if (it == fb.end() || it->second != bytes) {
      why = name + " differs";
      return false;
    }
  }
  return true;
}

Outcome cli_determinism(const fs::path& root) {
  fs::remove_all(root);
  fs::create_directories(root);
  struct Step {
    std::string name;
    std::function<std::string(const fs::path& out)> args;
  };
  const fs::path data = root / "data";
  const fs::path model = root / "model";
  if (run_cli("gen-data --out " + data.string() + " --per-class 3 --points 128 --seed 5") != 0 ||
      run_cli("train --data " + data.string() + " --out " + model.string() + " --epochs 2 --batch-size 4 --seed 5 --quiet") != 0) {
    return {false, "could not prepare inputs via the CLI"};
  }
  const std::string ckpt = (model / "model.rfnn").string();
  const std::string cloud = (data / "test" / "sphere_00000.xyz").string();
  const std::vector<Step> steps{
      {"gen-data", [](const fs::path& o) { return "gen-data --out " + o.string() + " --per-class 3 --points 128 --seed 5"; }},
      {"train", [&](const fs::path& o) { return "train --data " + data.string() + " --out " + o.string() + " --epochs 2 --batch-size 4 --seed 5 --quiet"; }},
      {"train --refocus", [&](const fs::path& o) { return "train --data " + data.string() + " --out " + o.string() + " --epochs 2 --batch-size 4 --seed 5 --refocus --quiet"; }},
      {"corrupt", [&](const fs::path& o) { return "corrupt --data " + data.string() + " --out " + o.string() + " --seed 5 --family add_global --family drop_local"; }},
      {"eval none", [&](const fs::path& o) { return "eval --checkpoint " + ckpt + " --data " + data.string() + " --out " + o.string() + " --seed 5"; }},
      {"eval refocus", [&](const fs::path& o) { return "eval --checkpoint " + ckpt + " --data " + data.string() + " --out " + o.string() + " --seed 5 --defense refocus --k-min 8"; }},
      {"eval srs", [&](const fs::path& o) { return "eval --checkpoint " + ckpt + " --data " + data.string() + " --out " + o.string() + " --seed 5 --defense srs --pivot " + ckpt; }},
      {"focus-stats", [&](const fs::path& o) { return "focus-stats --checkpoint " + ckpt + " --data " + data.string() + " --out " + o.string(); }},
      {"influence", [&](const fs::path& o) { return "influence --checkpoint " + ckpt + " --cloud " + cloud + " --out " + o.string(); }},
      {"outliers", [&](const fs::path& o) { return "outliers --checkpoint " + ckpt + " --data " + data.string() + " --out " + o.string() + " --seed 5"; }},
  };
  std::size_t i = 0;
  for (const auto& step : steps) {
    const fs::path a = root / ("run_a_" + std::to_string(i));
    const fs::path b = root / ("run_b_" + std::to_string(i));
    ++i;
    if (run_cli(step.args(a)) != 0 || run_cli(step.args(b)) != 0) return {false, step.name + " failed to run"};
    std::string why;
    if (!same_tree(a, b, why)) return {false, step.name + ": " + why};
  }
  // Worker count must not change the report either.
  const fs::path w1 = root / "workers_1", w3 = root / "workers_3";
  const std::string base = "eval --checkpoint " + ckpt + " --data " + data.string() + " --seed 5 --defense refocus --k-min 8";
  if (run_cli(base + " --out " + w1.string() + " --workers 1") != 0 ||
      run_cli(base + " --out " + w3.string() + " --workers 3") != 0) {
    return {false, "eval with --workers failed to run"};
  }
  std::string why;
  if (!same_tree(w1, w3, why)) return {false, "--workers 1 vs 3: " + why};
  return {true, std::to_string(steps.size()) + " invocations repeated byte-identically (reports, CSVs, checkpoints); "
                "--workers 1 and 3 identical"};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path workdir = fs::temp_directory_path() / "refocus_acceptance";
  bool reuse = false;
  std::size_t epochs = 60;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--workdir" && i + 1 < argc) {
      workdir = argv[++i];
    } else if (a == "--reuse") {
      reuse = true;
    } else if (a == "--epochs" && i + 1 < argc) {
      epochs = static_cast<std::size_t>(std::stoul(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--workdir DIR] [--reuse] [--epochs N]\n", argv[0]);
      return 2;
    }
  }
  fs::create_directories(workdir);
  const auto t_all = Clock::now();

  report("C1", "focus-law suite", focus_law_suite());
  report("C2", "arithmetic anchors", arithmetic_anchors());
  report("C3", "gradient correctness", gradient_check());

  // Desk-scale data: 8 classes, 200 train / 50 test per class, N = 1024.
  const Dataset train_set = make_synthetic_dataset(200, 1024, 1, Split::train);
  const Dataset test_set = make_synthetic_dataset(50, 1024, 1, Split::test);

  Models m;
  const fs::path vanilla_path = workdir / "vanilla.rfnn", refocus_path = workdir / "refocus.rfnn";
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.seed = 1;
  if (reuse && fs::exists(vanilla_path) && fs::exists(refocus_path)) {
    m.vanilla = load_checkpoint(vanilla_path);
    m.refocused = load_checkpoint(refocus_path);
    m.reused = true;
  } else {
    auto t0 = Clock::now();
    m.vanilla = train(train_set, cfg).params;
    m.vanilla_train_seconds = seconds_since(t0);
    save_checkpoint(vanilla_path, m.vanilla);
    TrainOptions opts;
    opts.sampler = make_refocus_sampler();
    opts.validator = make_refocus_classifier();
    t0 = Clock::now();
    m.refocused = train(train_set, cfg, opts).params;
    note("refocus training took " + fmt("%.0f s", seconds_since(t0)));
    save_checkpoint(refocus_path, m.refocused);
  }

  const DefenseConfig none{};
  DefenseConfig refocus_defense;
  refocus_defense.defense = Defense::refocus;

  const auto clean_vanilla = evaluate(m.vanilla, test_set, none);
  const double clean_oa = overall_accuracy(clean_vanilla);
  report("C4", "desk-scale training",
         {clean_oa >= 0.85 && (m.reused || m.vanilla_train_seconds < 600.0),
          "clean test OA " + fmt("%.4f", clean_oa) + " (>= 0.85) after " + std::to_string(epochs) + " epochs; " +
              (m.reused ? std::string("checkpoint reused, wall clock not measured")
                        : fmt("%.0f s", m.vanilla_train_seconds) + " wall clock (< 600 s)")});

  // 5: vanilla-trained predict vs refocus-trained refocus_infer.
  const Dataset ag5 = corrupt_dataset(test_set, CorruptionFamily::add_global, 5, 1).data;
  const double ag5_vanilla = overall_accuracy(m.vanilla, ag5, none);
  const double ag5_refocus = overall_accuracy(m.refocused, ag5, refocus_defense);
  const auto clean_refocus = evaluate(m.refocused, test_set, refocus_defense);
  const double clean_refocus_oa = overall_accuracy(clean_refocus);
  const double gain = ag5_refocus - ag5_vanilla;
  const double clean_drop = clean_oa - clean_refocus_oa;
  report("C5", "add_global s5 refocus gain",
         {gain >= 0.10 && clean_drop <= 0.03,
          "add_global s5: refocus " + fmt("%.4f", ag5_refocus) + " vs vanilla " + fmt("%.4f", ag5_vanilla) + " (+" +
              fmt("%.1f", 100 * gain) + " pts, need >= 10); clean " + fmt("%.4f", clean_refocus_oa) + " vs " +
              fmt("%.4f", clean_oa) + " (drop " + fmt("%.1f", 100 * clean_drop) + " pts, need <= 3)"});
  note("same vanilla model, refocus_infer on add_global s5: " +
       fmt("%.4f", overall_accuracy(m.vanilla, ag5, refocus_defense)));

  // 6: focus shift direction under the vanilla model.
  const auto clean_focus = focus_values(clean_vanilla);
  const double mu = mean_of(clean_focus), sd = population_sd(clean_focus);
  const Dataset dg5 = corrupt_dataset(test_set, CorruptionFamily::drop_global, 5, 1).data;
  const double ag5_mu = mean_of(focus_values(evaluate(m.vanilla, ag5, none)));
  const double dg5_mu = mean_of(focus_values(evaluate(m.vanilla, dg5, none)));
  report("C6", "focus shift under corruption",
         {ag5_mu - mu >= 0.5 * sd && mu - dg5_mu >= 0.5 * sd,
          "clean " + fmt("%.4f", mu) + " (sd " + fmt("%.4f", sd) + "); add_global s5 " + fmt("%.4f", ag5_mu) + " (" +
              fmt("%+.2f", (ag5_mu - mu) / sd) + " sd); drop_global s5 " + fmt("%.4f", dg5_mu) + " (" +
              fmt("%+.2f", (dg5_mu - mu) / sd) + " sd); need +/-0.5 sd"});

  // 7: alignment of the focus distribution after one refocus step.
  {
    const double pre_clean = mean_of(focus_values(clean_refocus));
    std::vector<double> post;
    for (const auto& o : clean_refocus) post.push_back(o.focus_after);
    const double post_clean = mean_of(post);
    bool all = true;
    std::string detail;
    for (auto family : {CorruptionFamily::add_global, CorruptionFamily::drop_global}) {
      for (int s = 3; s <= 5; ++s) {
        const auto out = evaluate(m.refocused, corrupt_dataset(test_set, family, s, 1).data, refocus_defense);
        std::vector<double> pre_v, post_v;
        for (const auto& o : out) {
          pre_v.push_back(o.focus);
          post_v.push_back(o.focus_after);
        }
        const double before = std::abs(mean_of(pre_v) - pre_clean);
        const double after = std::abs(mean_of(post_v) - post_clean);
        const bool ok = after < before;
        all &= ok;
        detail += std::string(family_name(family)) + " s" + std::to_string(s) + " " + fmt("%.4f", before) + "->" +
                  fmt("%.4f", after) + (ok ? "" : " (not smaller)") + "; ";
      }
    }
    report("C7", "refocus aligns focus", {all, "|gap| before->after: " + detail});
  }

  // 8 & 9: mCE machinery and adaptive vs fixed thresholds.
  {
    const auto t0 = Clock::now();
    ExperimentConfig ecfg;
    ecfg.corruption_seed = 1;
    const EvalReport self = run_experiment(m.vanilla, nullptr, test_set, ecfg);
    const SuiteAccuracies acc = suite_sweep(m, test_set);
    const double adaptive_mce = suite_mce(acc.adaptive, acc.pivot);
    const bool self_exact = self.mce.has_value() && *self.mce == 1.0;
    report("C8", "mCE machinery",
           {self_exact && adaptive_mce < 1.0,
            "pivot vs itself mCE " + (self.mce ? fmt("%.6f", *self.mce) : std::string("undefined")) +
                " (exactly 1 required); refocused mCE " + fmt("%.6f", adaptive_mce) + " (< 1 required)"});
    double best_fixed = 1e300;
    std::string fixed_detail;
    for (std::size_t k : kFixedKs) {
      const double v = suite_mce(acc.fixed.at(k), acc.pivot);
      best_fixed = std::min(best_fixed, v);
      fixed_detail += "K=" + std::to_string(k) + " " + fmt("%.4f", v) + ", ";
    }
    report("C9", "adaptive vs fixed threshold",
           {adaptive_mce <= best_fixed + 0.05, "adaptive mCE " + fmt("%.4f", adaptive_mce) + " vs fixed " +
                                                   fixed_detail + "best " + fmt("%.4f", best_fixed) + " (+0.05 allowed)"});
    note("suite evaluation took " + fmt("%.0f s", seconds_since(t0)));
  }

  // 10: influence outlier removal vs the SOR sweep on add_local s3.
  {
    const CorruptedDataset al3 = corrupt_dataset(test_set, CorruptionFamily::add_local, 3, 1);
    const std::size_t n = al3.data.size();
    double inf_p = 0.0, inf_r = 0.0;
    std::vector<double> sigmas;
    for (int i = 0; i <= 10; ++i) sigmas.push_back(0.5 + 0.25 * i);
    std::vector<double> sor_p(sigmas.size(), 0.0), sor_r(sigmas.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const PointCloud& cloud = al3.data.samples[i].cloud;
      const auto pr = precision_recall(influence_outlier_removal(m.vanilla, cloud).removed, al3.flags[i]);
      inf_p += pr.precision;
      inf_r += pr.recall;
      const auto d = sor_mean_distances(cloud, 2);
      for (std::size_t s = 0; s < sigmas.size(); ++s) {
        const auto keep = sor_keep_mask(d, sigmas[s]);
        std::vector<std::size_t> removed;
        for (std::size_t j = 0; j < keep.size(); ++j) {
          if (!keep[j]) removed.push_back(j);
        }
        const auto q = precision_recall(removed, al3.flags[i]);
        sor_p[s] += q.precision;
        sor_r[s] += q.recall;
      }
    }
    inf_p /= static_cast<double>(n);
    inf_r /= static_cast<double>(n);
    // SOR reference: best precision among sweep points reaching the influence
    // recall; if none does, the sweep point with the highest recall.
    std::size_t ref = 0;
    bool matched = false;
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
      sor_p[s] /= static_cast<double>(n);
      sor_r[s] /= static_cast<double>(n);
    }
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
      if (sor_r[s] >= inf_r && (!matched || sor_p[s] > sor_p[ref])) {
        ref = s;
        matched = true;
      }
    }
    if (!matched) {
      for (std::size_t s = 0; s < sigmas.size(); ++s) {
        if (sor_r[s] > sor_r[ref]) ref = s;
      }
    }
    const double base_rate = 30.0 / (1024.0 + 30.0);
    report("C10", "influence outlier removal vs SOR",
           {inf_p >= sor_p[ref],
            std::to_string(n) + " samples; influence P " + fmt("%.4f", inf_p) + " R " + fmt("%.4f", inf_r) +
                "; SOR reference sigma " + fmt("%.2f", sigmas[ref]) + " P " + fmt("%.4f", sor_p[ref]) + " R " +
                fmt("%.4f", sor_r[ref]) + (matched ? " (recall matched)" : " (no sweep point reaches the recall)") +
                "; flagged base rate " + fmt("%.4f", base_rate)});
  }

  report("C11", "CLI determinism", cli_determinism(workdir / "cli"));

  // Supplementary invariants checked on the trained models (not numbered criteria).
  {
    const CorruptedDataset ag5c = corrupt_dataset(test_set, CorruptionFamily::add_global, 5, 1);
    std::size_t removed = 0, removed_flagged = 0, total = 0, flagged = 0;
    for (std::size_t i = 0; i < ag5c.data.size(); ++i) {
      const auto& cloud = ag5c.data.samples[i].cloud;
      const auto r = refocus_infer(m.refocused, cloud);
      std::vector<bool> kept(cloud.size(), false);
      for (std::size_t j : r.diagnostics.retained) kept[j] = true;
      for (std::size_t j = 0; j < cloud.size(); ++j) {
        total += 1;
        flagged += ag5c.flags[i][j];
        if (!kept[j]) {
          ++removed;
          removed_flagged += ag5c.flags[i][j];
        }
      }
    }
    const double rate_removed = static_cast<double>(removed_flagged) / static_cast<double>(removed);
    const double base = static_cast<double>(flagged) / static_cast<double>(total);
    report("I1", "refocus removes outliers preferentially",
           {rate_removed > base, "flagged fraction among removed " + fmt("%.4f", rate_removed) + " vs base rate " +
                                     fmt("%.4f", base)});
  }

  std::size_t failed = 0;
  for (const auto& l : g_lines) failed += !l.outcome.pass;
  std::printf("\n%zu/%zu checks passed in %.0f s\n", g_lines.size() - failed, g_lines.size(), seconds_since(t_all));
  for (const auto& l : g_lines) {
    if (!l.outcome.pass) std::printf("FAILED: %s %s\n", l.id.c_str(), l.title.c_str());
  }
  return failed == 0 ? 0 : 1;
}
