// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "futurefoul/features.hpp"
#include "futurefoul/nn/layers.hpp"
#include "futurefoul/nn/tensor.hpp"
#include "futurefoul/rng.hpp"

namespace futurefoul {

struct ModelConfig {
  bool use_video = true;
  bool use_bbox = true;
  bool use_pose = true;
  bool use_bboximg = true;
  bool use_rnn = true;
  int hidden = 256;
  int rnn_layers = 2;
  std::array<int, 3> cnn_channels{16, 32, 64};
  std::vector<int> mlp_hidden{512, 128};
  double dropout_p = 0.3;

  /// Throws ConfigError. Without the recurrent module only the video branch
  /// may be enabled.
  void validate() const;

  /// The five model rows of the ablation table, best first.
  static ModelConfig full();
  static ModelConfig video_bbox_pose();
  static ModelConfig video_bbox();
  static ModelConfig video_gru();
  static ModelConfig cnn_video();

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class Mode { Train, Eval };

/// Model inputs as dense tensors. Tensors of disabled branches stay empty.
template <class T>
struct Batch {
  int size = 0;
  nn::Tensor<T> video;  // (B, n, 3, S, S)
  nn::Tensor<T> feet;   // (B, n, 10)
  nn::Tensor<T> poses;  // (B, n, 170)
  nn::Tensor<T> crops;  // (B, n, 5, 3, C, C)
  std::vector<int> labels;
};

template <class T>
Batch<T> make_batch(std::span<const Sample* const> samples, const ModelConfig& config);

/// conv-bn-relu x3 (3x3, stride 2, padding 1), one adaptive max pool onto at
/// most a 4x4 grid, dropout, flatten.
template <class T>
class CnnEncoder {
 public:
  CnnEncoder(const std::string& name, const std::array<int, 3>& channels, double dropout_p, Rng& rng);

  /// x: (M, 3, H, W) -> (M, feature_dim(H, W)). Throws ShapeError when H or W < 8.
  nn::Tensor<T> forward(const nn::Tensor<T>& x, Mode mode, Rng& dropout_rng);
  void backward(const nn::Tensor<T>& dy);

  static int feature_dim(int height, int width, const std::array<int, 3>& channels);
  static constexpr int kMinInput = 8;
  static constexpr int kPoolGrid = 4;

  void collect(nn::ParameterList<T>& out);
  std::uint64_t pattern(std::uint64_t h) const;

 private:
  std::string name_;
  nn::Conv2d<T> conv1_, conv2_, conv3_;
  nn::BatchNorm2d<T> bn1_, bn2_, bn3_;
  nn::Relu<T> relu1_, relu2_, relu3_;
  nn::AdaptiveMaxPool2d<T> pool_;
  nn::Dropout<T> dropout_;
  std::vector<int> pooled_shape_;
};

/// Stacked GRU returning the top layer's last hidden state.
template <class T>
class GruEncoder {
 public:
  GruEncoder(const std::string& name, int input_size, int hidden, int layers, Rng& rng);

  /// x: (N, T, I) -> (N, H). Throws std::invalid_argument when T = 0.
  nn::Tensor<T> forward(const nn::Tensor<T>& x, Mode mode);
  /// Returns dx (N, T, I) when `need_input_grad`.
  nn::Tensor<T> backward(const nn::Tensor<T>& dlast, bool need_input_grad);

  void collect(nn::ParameterList<T>& out);

 private:
  std::vector<nn::GruLayer<T>> layers_;
  int steps_ = 0;
  int batch_ = 0;
};

inline constexpr std::array<const char*, 5> kParameterGroups{"video", "bbox", "pose", "bboximg", "mlp"};

/// The four-branch fusion classifier. Output logits are (B, 2) with class 1
/// = FOUL.
template <class T>
class FutureFoulNet {
 public:
  FutureFoulNet(const ModelConfig& model, const FeatureConfig& features, std::uint64_t seed);

  nn::Tensor<T> forward(const Batch<T>& batch, Mode mode);
  /// Accumulates parameter gradients; requires a preceding Train forward.
  void backward(const nn::Tensor<T>& dlogits);

  nn::ParameterList<T> parameters();
  /// Parameters of one group named in kParameterGroups (empty when disabled).
  nn::ParameterList<T> group(const std::string& name);

  const ModelConfig& model_config() const noexcept { return model_; }
  const FeatureConfig& feature_config() const noexcept { return features_; }
  int fused_dim() const noexcept { return fused_dim_; }

  /// Reseeds the dropout mask stream.
  void set_dropout_seed(std::uint64_t seed) { dropout_rng_ = Rng(seed); }

  std::size_t parameter_count();

  /// Hash of every ReLU state and max-pool winner of the last Train forward.
  std::uint64_t activation_pattern() const;

 private:
  void check_inputs(const Batch<T>& batch) const;

  ModelConfig model_;
  FeatureConfig features_;
  Rng dropout_rng_;

  std::unique_ptr<CnnEncoder<T>> video_cnn_;
  std::unique_ptr<GruEncoder<T>> video_rnn_;
  std::unique_ptr<GruEncoder<T>> bbox_rnn_;
  std::unique_ptr<GruEncoder<T>> pose_rnn_;
  std::unique_ptr<CnnEncoder<T>> crop_cnn_;
  std::unique_ptr<GruEncoder<T>> crop_rnn_;

  std::vector<nn::Linear<T>> mlp_;
  std::vector<nn::Relu<T>> mlp_relu_;
  std::vector<nn::Dropout<T>> mlp_dropout_;
  int fused_dim_ = 0;

  // Cached by the last Train forward.
  int batch_size_ = 0;
  std::vector<std::pair<int, int>> segments_;  // (offset, width) per enabled branch in the fused vector
};

/// Trainable parameter count as a closed-form function of the configs.
std::size_t parameter_count(const ModelConfig& model, const FeatureConfig& features);

/// Softmax probability of FOUL for each logits row.
template <class T>
std::vector<double> foul_probability(const nn::Tensor<T>& logits);

}  // namespace futurefoul
