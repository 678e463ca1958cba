#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "refocus/geometry.hpp"
#include "refocus/random.hpp"

namespace refocus {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Layer widths of the classifier: a shared per-point MLP
/// 3 -> hidden1 -> hidden2 -> feature_dim (ReLU after each), a max-pool over
/// points, and a head feature_dim -> head_hidden (ReLU) -> num_classes.
struct Architecture {
  std::size_t hidden1 = 64;
  std::size_t hidden2 = 128;
  std::size_t feature_dim = 256;
  std::size_t head_hidden = 128;
  std::size_t num_classes = 8;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct EncoderParams {
  static constexpr std::size_t kNumLayers = 5;
  static constexpr std::size_t kNumEncoderLayers = 3;

  /// encoder.0, encoder.1, encoder.2, head.0, head.1
  std::array<DenseLayer, kNumLayers> layers;

  /// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  /// With `zero_output_layer` the final layer starts at zero (uniform logits).
  [[nodiscard]] static EncoderParams initialize(const Architecture& arch, std::uint64_t seed,
                                                bool zero_output_layer = false);
  [[nodiscard]] static EncoderParams zeros(const Architecture& arch);

  [[nodiscard]] Architecture architecture() const;
  [[nodiscard]] std::size_t feature_dim() const { return layers[2].weight.rows(); }
  [[nodiscard]] std::size_t num_classes() const { return layers[4].weight.rows(); }
  [[nodiscard]] std::size_t parameter_count() const;
  [[nodiscard]] bool all_finite() const;

  /// Flat views over every tensor (weight then bias, layer by layer).
  [[nodiscard]] std::vector<std::span<double>> tensors();
  [[nodiscard]] std::vector<std::span<const double>> tensors() const;
};

/// Gradient record with the same shapes as the parameters.
using Gradients = EncoderParams;

[[nodiscard]] std::string_view layer_name(std::size_t layer) noexcept;

/// Per-point activations of the last encoder layer (post-ReLU, pre-pooling).
/// Logically N x K; stored column-per-point (K x N) for the matrix products.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(Eigen::MatrixXd by_point) : values_(std::move(by_point)) {}

  [[nodiscard]] std::size_t num_points() const noexcept { return values_.cols(); }
  [[nodiscard]] std::size_t num_features() const noexcept { return values_.rows(); }
  [[nodiscard]] double operator()(std::size_t point, std::size_t feature) const {
    return values_(static_cast<Eigen::Index>(feature), static_cast<Eigen::Index>(point));
  }
  /// K x N storage; column n holds point n's feature row.
  [[nodiscard]] const Eigen::MatrixXd& by_point() const noexcept { return values_; }

 private:
  Eigen::MatrixXd values_;
};

struct MaxPool {
  Eigen::VectorXd values;             // length K
  std::vector<std::size_t> argmax;    // length K, lowest point index on ties
};

/// Column-wise max over points. Points with `excluded[n] == true` are skipped;
/// an empty mask pools over all points.
[[nodiscard]] MaxPool max_pool(const FeatureMatrix& features, const std::vector<bool>& excluded = {});

struct ForwardTrace {
  FeatureMatrix per_point_features;
  Eigen::VectorXd global_feature;
  std::vector<std::size_t> argmax_indices;
  Eigen::VectorXd logits;
};

/// Full forward pass. Throws NumericOverflow naming the first layer that
/// produced a non-finite value.
[[nodiscard]] ForwardTrace forward(const EncoderParams& params, const PointCloud& cloud);

/// Classification head applied to a (possibly masked) global feature.
[[nodiscard]] Eigen::VectorXd classify_global(const EncoderParams& params,
                                              const Eigen::VectorXd& global_feature);

[[nodiscard]] Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
/// Index of the largest entry, lowest index on ties.
[[nodiscard]] std::size_t argmax(const Eigen::VectorXd& v);

struct Prediction {
  std::size_t label = 0;
  Eigen::VectorXd probabilities;
};

[[nodiscard]] Prediction prediction_from_logits(const Eigen::VectorXd& logits);
[[nodiscard]] Prediction predict(const EncoderParams& params, const PointCloud& cloud);

struct LossAndGrads {
  double loss = 0.0;
  Gradients grads;
};

/// Mean cross-entropy over the batch and its exact gradient.
[[nodiscard]] LossAndGrads loss_and_grads(const EncoderParams& params,
                                          std::span<const LabeledCloud> batch);
[[nodiscard]] double batch_loss(const EncoderParams& params, std::span<const LabeledCloud> batch);

enum class Optimizer { sgd, adam };

struct TrainConfig {
  double learning_rate = 5e-4;
  std::size_t epochs = 60;
  std::size_t batch_size = 32;
  bool cosine_annealing = true;
  Optimizer optimizer = Optimizer::adam;
  std::uint64_t seed = 0;
  /// Per-axis scale in [2/3, 3/2] before sampling.
  bool augment_scale = false;
  /// Per-axis translation in [-0.2, 0.2] before sampling.
  bool augment_translate = false;
  /// Stratified hold-out used to pick the best epoch when no explicit
  /// validation set is given. Zero keeps the last epoch.
  double validation_fraction = 0.1;
  bool zero_output_layer = false;
  Architecture architecture{};
};

/// Training-time subsampling hook; called with the current parameters.
using Sampler = std::function<PointCloud(const EncoderParams&, const PointCloud&, Rng&)>;
/// Inference path used for validation accuracy.
using Classifier = std::function<std::size_t(const EncoderParams&, const PointCloud&)>;

struct EpochLog {
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;
};

struct TrainResult {
  EncoderParams params;
  std::vector<EpochLog> history;
  std::size_t best_epoch = 0;
  double best_validation_accuracy = 0.0;
};

struct TrainOptions {
  Sampler sampler;
  Classifier validator;
  const Dataset* validation = nullptr;
  std::function<void(const EpochLog&)> on_epoch;
};

/// Mini-batch training with cosine-annealed learning rate. Returns the
/// parameters of the best validation epoch (earliest on ties). Deterministic
/// for a given config.
[[nodiscard]] TrainResult train(const Dataset& dataset, const TrainConfig& config,
                                const TrainOptions& options = {});

/// Checkpoint: magic "RFNN", version byte 1, uint32 layer count, (uint32 out,
/// uint32 in) per layer, then every layer's row-major weights followed by its
/// bias as little-endian float64.
[[nodiscard]] std::string serialize_checkpoint(const EncoderParams& params);
[[nodiscard]] EncoderParams parse_checkpoint(std::string_view bytes, const std::string& origin = "<memory>");
void save_checkpoint(const std::filesystem::path& path, const EncoderParams& params);
[[nodiscard]] EncoderParams load_checkpoint(const std::filesystem::path& path);

}  // namespace refocus
