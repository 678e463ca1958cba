#include "refocus/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "refocus/error.hpp"

namespace refocus {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view layer_name(std::size_t layer) noexcept {
  static constexpr std::array<std::string_view, EncoderParams::kNumLayers> names = {
      "encoder.0", "encoder.1", "encoder.2", "head.0", "head.1"};
  return layer < names.size() ? names[layer] : "unknown";
}

namespace {

std::array<std::pair<std::size_t, std::size_t>, EncoderParams::kNumLayers> layer_shapes(
    const Architecture& a) {
  return {{{a.hidden1, 3},
           {a.hidden2, a.hidden1},
           {a.feature_dim, a.hidden2},
           {a.head_hidden, a.feature_dim},
           {a.num_classes, a.head_hidden}}};
}

}  // namespace

EncoderParams EncoderParams::zeros(const Architecture& arch) {
  EncoderParams p;
  const auto shapes = layer_shapes(arch);
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    const auto [out, in] = shapes[l];
    p.layers[l].weight = MatrixXd::Zero(static_cast<Index>(out), static_cast<Index>(in));
    p.layers[l].bias = VectorXd::Zero(static_cast<Index>(out));
  }
  return p;
}

EncoderParams EncoderParams::initialize(const Architecture& arch, std::uint64_t seed,
                                        bool zero_output_layer) {
  if (arch.hidden1 == 0 || arch.hidden2 == 0 || arch.feature_dim == 0 || arch.head_hidden == 0 ||
      arch.num_classes < 2) {
    throw InvalidArgument("architecture needs non-zero widths and at least two classes");
  }
  EncoderParams p = zeros(arch);
  Rng rng(mix_seed(seed, {0x1417}));
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    if (zero_output_layer && l + 1 == kNumLayers) break;
    auto& layer = p.layers[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Index r = 0; r < layer.weight.rows(); ++r) {
      for (Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = u(rng);
    }
    for (Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = u(rng);
  }
  return p;
}

Architecture EncoderParams::architecture() const {
  return {static_cast<std::size_t>(layers[0].weight.rows()),
          static_cast<std::size_t>(layers[1].weight.rows()),
          static_cast<std::size_t>(layers[2].weight.rows()),
          static_cast<std::size_t>(layers[3].weight.rows()),
          static_cast<std::size_t>(layers[4].weight.rows())};
}

std::size_t EncoderParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool EncoderParams::all_finite() const {
  return std::all_of(layers.begin(), layers.end(), [](const DenseLayer& l) {
    return l.weight.allFinite() && l.bias.allFinite();
  });
}

std::vector<std::span<double>> EncoderParams::tensors() {
  std::vector<std::span<double>> out;
  for (auto& l : layers) {
    out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
    out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  }
  return out;
}

std::vector<std::span<const double>> EncoderParams::tensors() const {
  std::vector<std::span<const double>> out;
  for (const auto& l : layers) {
    out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
    out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  }
  return out;
}

MaxPool max_pool(const FeatureMatrix& features, const std::vector<bool>& excluded) {
  const MatrixXd& h = features.by_point();
  const Index k = h.rows();
  const Index n = h.cols();
  if (!excluded.empty() && excluded.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("exclusion mask size does not match the number of points");
  }
  MaxPool pool;
  pool.values = VectorXd::Constant(k, -std::numeric_limits<double>::infinity());
  pool.argmax.assign(static_cast<std::size_t>(k), 0);
  bool any = false;
  for (Index p = 0; p < n; ++p) {
    if (!excluded.empty() && excluded[static_cast<std::size_t>(p)]) continue;
    const double* col = h.col(p).data();
    if (!any) {
      for (Index f = 0; f < k; ++f) pool.values[f] = col[f];
      std::fill(pool.argmax.begin(), pool.argmax.end(), static_cast<std::size_t>(p));
      any = true;
      continue;
    }
    // Strict comparison keeps the lowest index on ties.
    for (Index f = 0; f < k; ++f) {
      if (col[f] > pool.values[f]) {
        pool.values[f] = col[f];
        pool.argmax[static_cast<std::size_t>(f)] = static_cast<std::size_t>(p);
      }
    }
  }
  if (!any) throw InvalidArgument("max_pool needs at least one included point");
  return pool;
}

namespace {

struct ForwardCache {
  MatrixXd input;  // 3 x N
  MatrixXd h1;     // hidden1 x N
  MatrixXd h2;     // hidden2 x N
  VectorXd head_hidden;
  ForwardTrace trace;
};

void dense_relu(const DenseLayer& layer, const MatrixXd& in, MatrixXd& out, std::size_t index) {
  out.resize(layer.weight.rows(), in.cols());
  out.noalias() = layer.weight * in;
  out.colwise() += layer.bias;
  out = out.cwiseMax(0.0);
  if (!out.allFinite()) {
    throw NumericOverflow("non-finite activation in layer " + std::string(layer_name(index)));
  }
}

VectorXd head_logits(const EncoderParams& params, const VectorXd& global, VectorXd* hidden_out) {
  VectorXd hidden = (params.layers[3].weight * global + params.layers[3].bias).cwiseMax(0.0);
  if (!hidden.allFinite()) throw NumericOverflow("non-finite activation in layer head.0");
  VectorXd logits = params.layers[4].weight * hidden + params.layers[4].bias;
  if (!logits.allFinite()) throw NumericOverflow("non-finite activation in layer head.1");
  if (hidden_out != nullptr) *hidden_out = std::move(hidden);
  return logits;
}

ForwardCache forward_cached(const EncoderParams& params, const PointCloud& cloud) {
  ForwardCache c;
  const auto n = static_cast<Index>(cloud.size());
  c.input.resize(3, n);
  for (Index i = 0; i < n; ++i) {
    const Point& p = cloud[static_cast<std::size_t>(i)];
    c.input(0, i) = p.x;
    c.input(1, i) = p.y;
    c.input(2, i) = p.z;
  }
  dense_relu(params.layers[0], c.input, c.h1, 0);
  dense_relu(params.layers[1], c.h1, c.h2, 1);
  MatrixXd h3;
  dense_relu(params.layers[2], c.h2, h3, 2);
  c.trace.per_point_features = FeatureMatrix(std::move(h3));
  MaxPool pool = max_pool(c.trace.per_point_features);
  c.trace.global_feature = std::move(pool.values);
  c.trace.argmax_indices = std::move(pool.argmax);
  c.trace.logits = head_logits(params, c.trace.global_feature, &c.head_hidden);
  return c;
}

// Accumulates `weight` * d(cross-entropy)/d(params) into `grads`; returns the
// unweighted loss. Only critical points (column argmaxes) receive gradient
// through the max-pool, so the encoder backward runs on those columns alone.
double backward(const EncoderParams& params, const ForwardCache& c, std::size_t label,
                double weight, Gradients& grads) {
  const VectorXd& logits = c.trace.logits;
  const Index classes = logits.size();
  if (label >= static_cast<std::size_t>(classes)) throw InvalidArgument("label out of range");

  const double max_logit = logits.maxCoeff();
  const double log_z = max_logit + std::log((logits.array() - max_logit).exp().sum());
  const double loss = log_z - logits[static_cast<Index>(label)];

  VectorXd d_logits = (logits.array() - log_z).exp().matrix();
  d_logits[static_cast<Index>(label)] -= 1.0;
  d_logits *= weight;

  grads.layers[4].weight.noalias() += d_logits * c.head_hidden.transpose();
  grads.layers[4].bias += d_logits;
  VectorXd d_hidden = params.layers[4].weight.transpose() * d_logits;
  d_hidden = (c.head_hidden.array() > 0.0).select(d_hidden, 0.0);
  grads.layers[3].weight.noalias() += d_hidden * c.trace.global_feature.transpose();
  grads.layers[3].bias += d_hidden;
  const VectorXd d_global = params.layers[3].weight.transpose() * d_hidden;

  // Compact the critical points.
  const auto& argmax = c.trace.argmax_indices;
  std::map<std::size_t, Index> column_of;
  for (std::size_t p : argmax) column_of.emplace(p, 0);
  Index next = 0;
  for (auto& [p, col] : column_of) col = next++;
  const Index r = next;
  std::vector<Index> points;
  points.reserve(static_cast<std::size_t>(r));
  for (const auto& [p, col] : column_of) points.push_back(static_cast<Index>(p));

  const MatrixXd& h3 = c.trace.per_point_features.by_point();
  const Index k = h3.rows();
  MatrixXd d_z3 = MatrixXd::Zero(k, r);
  for (Index f = 0; f < k; ++f) {
    const std::size_t p = argmax[static_cast<std::size_t>(f)];
    if (h3(f, static_cast<Index>(p)) > 0.0) d_z3(f, column_of[p]) = d_global[f];
  }

  MatrixXd h2_r(c.h2.rows(), r), h1_r(c.h1.rows(), r), x_r(3, r);
  for (Index j = 0; j < r; ++j) {
    h2_r.col(j) = c.h2.col(points[static_cast<std::size_t>(j)]);
    h1_r.col(j) = c.h1.col(points[static_cast<std::size_t>(j)]);
    x_r.col(j) = c.input.col(points[static_cast<std::size_t>(j)]);
  }

  grads.layers[2].weight.noalias() += d_z3 * h2_r.transpose();
  grads.layers[2].bias += d_z3.rowwise().sum();
  MatrixXd d_z2 = params.layers[2].weight.transpose() * d_z3;
  d_z2 = (h2_r.array() > 0.0).select(d_z2, 0.0);
  grads.layers[1].weight.noalias() += d_z2 * h1_r.transpose();
  grads.layers[1].bias += d_z2.rowwise().sum();
  MatrixXd d_z1 = params.layers[1].weight.transpose() * d_z2;
  d_z1 = (h1_r.array() > 0.0).select(d_z1, 0.0);
  grads.layers[0].weight.noalias() += d_z1 * x_r.transpose();
  grads.layers[0].bias += d_z1.rowwise().sum();
  return loss;
}

}  // namespace

ForwardTrace forward(const EncoderParams& params, const PointCloud& cloud) {
  return std::move(forward_cached(params, cloud).trace);
}

VectorXd classify_global(const EncoderParams& params, const VectorXd& global_feature) {
  if (global_feature.size() != static_cast<Index>(params.feature_dim())) {
    throw InvalidArgument("global feature has the wrong length");
  }
  return head_logits(params, global_feature, nullptr);
}

VectorXd softmax(const VectorXd& logits) {
  const double m = logits.maxCoeff();
  VectorXd e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

std::size_t argmax(const VectorXd& v) {
  std::size_t best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<Index>(best)]) best = static_cast<std::size_t>(i);
  }
  return best;
}

Prediction prediction_from_logits(const VectorXd& logits) {
  Prediction p;
  p.probabilities = softmax(logits);
  p.label = argmax(p.probabilities);
  return p;
}

Prediction predict(const EncoderParams& params, const PointCloud& cloud) {
  return prediction_from_logits(forward(params, cloud).logits);
}

LossAndGrads loss_and_grads(const EncoderParams& params, std::span<const LabeledCloud> batch) {
  if (batch.empty()) throw InvalidArgument("loss_and_grads needs a non-empty batch");
  LossAndGrads out{0.0, Gradients::zeros(params.architecture())};
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const auto& sample : batch) {
    out.loss += w * backward(params, forward_cached(params, sample.cloud), sample.label, w, out.grads);
  }
  return out;
}

double batch_loss(const EncoderParams& params, std::span<const LabeledCloud> batch) {
  if (batch.empty()) throw InvalidArgument("batch_loss needs a non-empty batch");
  double total = 0.0;
  for (const auto& sample : batch) {
    const VectorXd logits = forward(params, sample.cloud).logits;
    const double m = logits.maxCoeff();
    const double log_z = m + std::log((logits.array() - m).exp().sum());
    total += log_z - logits[static_cast<Index>(sample.label)];
  }
  return total / static_cast<double>(batch.size());
}

namespace {

class OptimizerState {
 public:
  OptimizerState(Optimizer kind, const EncoderParams& params)
      : kind_(kind), first_(Gradients::zeros(params.architecture())),
        second_(Gradients::zeros(params.architecture())) {}

  void step(EncoderParams& params, const Gradients& grads, double lr) {
    ++t_;
    auto p = params.tensors();
    auto g = grads.tensors();
    if (kind_ == Optimizer::sgd) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p[i].size(); ++j) p[i][j] -= lr * g[i][j];
      }
      return;
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    auto m = first_.tensors();
    auto v = second_.tensors();
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = 0; j < p[i].size(); ++j) {
        m[i][j] = beta1 * m[i][j] + (1.0 - beta1) * g[i][j];
        v[i][j] = beta2 * v[i][j] + (1.0 - beta2) * g[i][j] * g[i][j];
        p[i][j] -= lr * (m[i][j] / c1) / (std::sqrt(v[i][j] / c2) + eps);
      }
    }
  }

 private:
  Optimizer kind_;
  Gradients first_;
  Gradients second_;
  std::uint64_t t_ = 0;
};

PointCloud augment(const PointCloud& cloud, const TrainConfig& config, Rng& rng) {
  if (!config.augment_scale && !config.augment_translate) return cloud;
  std::uniform_real_distribution<double> scale(2.0 / 3.0, 1.5);
  std::uniform_real_distribution<double> shift(-0.2, 0.2);
  std::array<double, 3> s{1.0, 1.0, 1.0}, t{0.0, 0.0, 0.0};
  if (config.augment_scale) s = {scale(rng), scale(rng), scale(rng)};
  if (config.augment_translate) t = {shift(rng), shift(rng), shift(rng)};
  std::vector<Point> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) {
    out.push_back({static_cast<float>(p.x * s[0] + t[0]), static_cast<float>(p.y * s[1] + t[1]),
                   static_cast<float>(p.z * s[2] + t[2])});
  }
  return PointCloud(std::move(out));
}

// Stratified split: the last ceil(fraction * count) samples of each class
// (after a seeded shuffle) go to validation.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(const Dataset& ds,
                                                                            double fraction,
                                                                            std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(ds.num_classes());
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.samples[i].label].push_back(i);
  Rng rng(mix_seed(seed, {0x5A11}));
  std::vector<std::size_t> train_idx, val_idx;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    auto n_val = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(members.size())));
    if (n_val >= members.size()) n_val = members.size() > 1 ? members.size() - 1 : 0;
    for (std::size_t j = 0; j < members.size(); ++j) {
      (j + n_val >= members.size() ? val_idx : train_idx).push_back(members[j]);
    }
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  return {train_idx, val_idx};
}

}  // namespace

TrainResult train(const Dataset& dataset, const TrainConfig& config, const TrainOptions& options) {
  if (config.learning_rate <= 0.0 || config.epochs == 0 || config.batch_size == 0) {
    throw InvalidArgument("learning rate, epochs and batch size must be positive");
  }
  if (dataset.num_classes() < 2) throw InvalidArgument("training needs at least two classes");
  dataset.validate();

  Architecture arch = config.architecture;
  arch.num_classes = dataset.num_classes();

  std::vector<std::size_t> train_idx, val_idx;
  std::vector<const LabeledCloud*> validation;
  if (options.validation != nullptr) {
    train_idx.resize(dataset.size());
    std::iota(train_idx.begin(), train_idx.end(), std::size_t{0});
    for (const auto& s : options.validation->samples) validation.push_back(&s);
  } else if (config.validation_fraction > 0.0) {
    std::tie(train_idx, val_idx) = holdout_split(dataset, config.validation_fraction, config.seed);
    for (std::size_t i : val_idx) validation.push_back(&dataset.samples[i]);
  } else {
    train_idx.resize(dataset.size());
    std::iota(train_idx.begin(), train_idx.end(), std::size_t{0});
  }

  const Classifier validator = options.validator
                                   ? options.validator
                                   : Classifier([](const EncoderParams& p, const PointCloud& c) {
                                       return predict(p, c).label;
                                     });

  TrainResult result;
  EncoderParams params = EncoderParams::initialize(arch, config.seed, config.zero_output_layer);
  OptimizerState optimizer(config.optimizer, params);
  Rng rng(mix_seed(config.seed, {0x7EA1}));
  bool have_best = false;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr =
        config.cosine_annealing
            ? 0.5 * config.learning_rate *
                  (1.0 + std::cos(std::numbers::pi * static_cast<double>(epoch) /
                                  static_cast<double>(config.epochs)))
            : config.learning_rate;
    std::shuffle(train_idx.begin(), train_idx.end(), rng);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < train_idx.size(); start += config.batch_size) {
      const std::size_t end = std::min(train_idx.size(), start + config.batch_size);
      Gradients grads = Gradients::zeros(arch);
      const double w = 1.0 / static_cast<double>(end - start);
      for (std::size_t b = start; b < end; ++b) {
        const LabeledCloud& sample = dataset.samples[train_idx[b]];
        PointCloud cloud = augment(sample.cloud, config, rng);
        if (options.sampler) cloud = options.sampler(params, cloud, rng);
        const ForwardCache cache = forward_cached(params, cloud);
        if (argmax(cache.trace.logits) == sample.label) ++correct;
        loss_sum += backward(params, cache, sample.label, w, grads);
      }
      optimizer.step(params, grads, lr);
      if (!params.all_finite()) throw NumericOverflow("parameters became non-finite during training");
    }

    EpochLog log;
    log.epoch = epoch;
    log.learning_rate = lr;
    log.train_loss = loss_sum / static_cast<double>(train_idx.size());
    log.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_idx.size());
    if (!validation.empty()) {
      std::size_t ok = 0;
      for (const auto* s : validation) ok += validator(params, s->cloud) == s->label ? 1 : 0;
      log.validation_accuracy = static_cast<double>(ok) / static_cast<double>(validation.size());
    } else {
      log.validation_accuracy = log.train_accuracy;
    }
    result.history.push_back(log);
    if (options.on_epoch) options.on_epoch(log);

    const bool keep_last = validation.empty();
    if (!have_best || keep_last || log.validation_accuracy > result.best_validation_accuracy) {
      result.params = params;
      result.best_epoch = epoch;
      result.best_validation_accuracy = log.validation_accuracy;
      have_best = true;
    }
  }
  return result;
}

namespace {

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFFu));
}

template <typename U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

}  // namespace

std::string serialize_checkpoint(const EncoderParams& params) {
  std::string out = "RFNN";
  out.push_back(1);
  put_le(out, static_cast<std::uint32_t>(EncoderParams::kNumLayers));
  for (const auto& l : params.layers) {
    put_le(out, static_cast<std::uint32_t>(l.weight.rows()));
    put_le(out, static_cast<std::uint32_t>(l.weight.cols()));
  }
  for (const auto& l : params.layers) {
    for (Index r = 0; r < l.weight.rows(); ++r) {
      for (Index c = 0; c < l.weight.cols(); ++c) put_le(out, std::bit_cast<std::uint64_t>(l.weight(r, c)));
    }
    for (Index r = 0; r < l.bias.size(); ++r) put_le(out, std::bit_cast<std::uint64_t>(l.bias[r]));
  }
  return out;
}

EncoderParams parse_checkpoint(std::string_view bytes, const std::string& origin) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const auto fail = [&](const std::string& what) { throw ParseError(origin + ": " + what); };
  if (bytes.size() < 9 || std::memcmp(p, "RFNN", 4) != 0) fail("missing RFNN magic");
  if (p[4] != 1) fail("unsupported checkpoint version " + std::to_string(p[4]));
  const auto count = get_le<std::uint32_t>(p + 5);
  if (count != EncoderParams::kNumLayers) fail("expected 5 layers, found " + std::to_string(count));
  std::size_t offset = 9;
  if (bytes.size() < offset + 8 * count) fail("truncated layer table");
  EncoderParams params;
  std::size_t payload = 0;
  for (std::uint32_t l = 0; l < count; ++l) {
    const auto out = get_le<std::uint32_t>(p + offset);
    const auto in = get_le<std::uint32_t>(p + offset + 4);
    offset += 8;
    params.layers[l].weight.resize(out, in);
    params.layers[l].bias.resize(out);
    payload += (std::size_t{out} * in + out) * 8;
  }
  if (params.layers[0].weight.cols() != 3) fail("first layer must take 3 inputs");
  for (std::size_t l = 1; l < count; ++l) {
    if (params.layers[l].weight.cols() != params.layers[l - 1].weight.rows()) {
      fail("layer shapes do not chain at " + std::string(layer_name(l)));
    }
  }
  if (bytes.size() != offset + payload) fail("payload size does not match layer table");
  for (auto& l : params.layers) {
    for (Index r = 0; r < l.weight.rows(); ++r) {
      for (Index c = 0; c < l.weight.cols(); ++c) {
        l.weight(r, c) = std::bit_cast<double>(get_le<std::uint64_t>(p + offset));
        offset += 8;
      }
    }
    for (Index r = 0; r < l.bias.size(); ++r) {
      l.bias[r] = std::bit_cast<double>(get_le<std::uint64_t>(p + offset));
      offset += 8;
    }
  }
  if (!params.all_finite()) fail("checkpoint contains non-finite parameters");
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const EncoderParams& params) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::string bytes = serialize_checkpoint(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(path.string() + ": write failed");
}

EncoderParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open checkpoint");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str(), path.string());
}

}  // namespace refocus
