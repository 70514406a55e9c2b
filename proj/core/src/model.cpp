// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "futurefoul/error.hpp"

namespace futurefoul {

namespace {

constexpr int kFeetPerFrame = static_cast<int>(kTrackedPlayers) * 2;
constexpr int kPosePerFrame = static_cast<int>(kTrackedPlayers) * kKeypointCount * 2;

int halve(int v) { return (v + 1) / 2; }

std::size_t cnn_params(const std::array<int, 3>& c) {
  std::size_t total = 0;
  int in = 3;
  for (int out : c) {
    total += static_cast<std::size_t>(out) * in * 9 + 2 * static_cast<std::size_t>(out);
    in = out;
  }
  return total;
}

std::size_t gru_params(int input, int hidden, int layers) {
  std::size_t total = 0;
  for (int l = 0; l < layers; ++l) {
    const std::size_t in = l == 0 ? static_cast<std::size_t>(input) : static_cast<std::size_t>(hidden);
    total += 3 * static_cast<std::size_t>(hidden) * (in + hidden) + 6 * static_cast<std::size_t>(hidden);
  }
  return total;
}

template <class T>
nn::Tensor<T> slice_columns(const nn::Tensor<T>& x, int offset, int width) {
  const int N = x.dim(0);
  const int D = x.dim(1);
  nn::Tensor<T> out({N, width});
  for (int n = 0; n < N; ++n) {
    std::copy_n(x.ptr() + static_cast<std::size_t>(n) * D + offset, width, out.ptr() + static_cast<std::size_t>(n) * width);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ModelConfig

void ModelConfig::validate() const {
  if (!use_video && !use_bbox && !use_pose && !use_bboximg) throw ConfigError("at least one branch must be enabled");
  if (!use_rnn && (use_bbox || use_pose || use_bboximg || !use_video)) {
    throw ConfigError("without the recurrent module only the video branch may be enabled");
  }
  if (hidden <= 0) throw ConfigError("hidden must be positive");
  if (rnn_layers <= 0) throw ConfigError("rnn_layers must be positive");
  for (int c : cnn_channels) {
    if (c <= 0) throw ConfigError("cnn channel counts must be positive");
  }
  for (int w : mlp_hidden) {
    if (w <= 0) throw ConfigError("mlp widths must be positive");
  }
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw ConfigError("dropout_p must be in [0, 1)");
}

ModelConfig ModelConfig::full() { return ModelConfig{}; }

ModelConfig ModelConfig::video_bbox_pose() {
  ModelConfig c;
  c.use_bboximg = false;
  return c;
}

ModelConfig ModelConfig::video_bbox() {
  ModelConfig c;
  c.use_pose = false;
  c.use_bboximg = false;
  return c;
}

ModelConfig ModelConfig::video_gru() {
  ModelConfig c;
  c.use_bbox = false;
  c.use_pose = false;
  c.use_bboximg = false;
  return c;
}

ModelConfig ModelConfig::cnn_video() {
  ModelConfig c = video_gru();
  c.use_rnn = false;
  return c;
}

// ---------------------------------------------------------------------------
// Batch

template <class T>
Batch<T> make_batch(std::span<const Sample* const> samples, const ModelConfig& config) {
  Batch<T> b;
  if (samples.empty()) throw std::invalid_argument("make_batch: no samples");
  const FeatureConfig& fc = samples.front()->config;
  const int B = static_cast<int>(samples.size());
  const int n = fc.n_frames;
  const int S = fc.global_size;
  const int C = fc.crop_size;
  constexpr int P = static_cast<int>(kTrackedPlayers);
  b.size = B;
  if (config.use_video) b.video = nn::Tensor<T>({B, n, 3, S, S});
  if (config.use_bbox) b.feet = nn::Tensor<T>({B, n, kFeetPerFrame});
  if (config.use_pose) b.poses = nn::Tensor<T>({B, n, kPosePerFrame});
  if (config.use_bboximg) b.crops = nn::Tensor<T>({B, n, P, 3, C, C});
  constexpr T inv255 = T(1) / T(255);
  for (int i = 0; i < B; ++i) {
    const Sample& s = *samples[static_cast<std::size_t>(i)];
    if (!(s.config == fc)) throw ShapeError("make_batch: samples built with different feature configs", "batch");
    b.labels.push_back(static_cast<int>(s.label));
    if (config.use_video) {
      T* dst = b.video.ptr() + static_cast<std::size_t>(i) * s.video.size();
      std::transform(s.video.begin(), s.video.end(), dst, [](std::uint8_t v) { return static_cast<T>(v) * inv255; });
    }
    if (config.use_bbox) {
      std::transform(s.feet.begin(), s.feet.end(), b.feet.ptr() + static_cast<std::size_t>(i) * s.feet.size(),
                     [](double v) { return static_cast<T>(v); });
    }
    if (config.use_pose) {
      std::transform(s.poses.begin(), s.poses.end(), b.poses.ptr() + static_cast<std::size_t>(i) * s.poses.size(),
                     [](double v) { return static_cast<T>(v); });
    }
    if (config.use_bboximg) {
      T* dst = b.crops.ptr() + static_cast<std::size_t>(i) * s.crops.size();
      std::transform(s.crops.begin(), s.crops.end(), dst, [](std::uint8_t v) { return static_cast<T>(v) * inv255; });
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// CnnEncoder

template <class T>
CnnEncoder<T>::CnnEncoder(const std::string& name, const std::array<int, 3>& channels, double dropout_p, Rng& rng)
    : name_(name),
      conv1_(name + ".conv1", 3, channels[0], 3, 2, 1, rng),
      conv2_(name + ".conv2", channels[0], channels[1], 3, 2, 1, rng),
      conv3_(name + ".conv3", channels[1], channels[2], 3, 2, 1, rng),
      bn1_(name + ".bn1", channels[0]),
      bn2_(name + ".bn2", channels[1]),
      bn3_(name + ".bn3", channels[2]),
      pool_(kPoolGrid),
      dropout_(dropout_p) {}

template <class T>
int CnnEncoder<T>::feature_dim(int height, int width, const std::array<int, 3>& channels) {
  const int h = halve(halve(halve(height)));
  const int w = halve(halve(halve(width)));
  return channels[2] * std::min(h, kPoolGrid) * std::min(w, kPoolGrid);
}

template <class T>
nn::Tensor<T> CnnEncoder<T>::forward(const nn::Tensor<T>& x, Mode mode, Rng& dropout_rng) {
  if (x.rank() != 4 || x.dim(1) != 3) {
    throw ShapeError(name_ + ": expected (M, 3, H, W), got " + nn::shape_string(x.shape), name_);
  }
  if (x.dim(2) < kMinInput || x.dim(3) < kMinInput) {
    throw ShapeError(name_ + ": input " + std::to_string(x.dim(2)) + "x" + std::to_string(x.dim(3)) +
                         " is smaller than the minimum " + std::to_string(kMinInput) + "x" +
                         std::to_string(kMinInput),
                     name_);
  }
  const bool train = mode == Mode::Train;
  auto h = relu1_.forward(bn1_.forward(conv1_.forward(x, train), train), train);
  h = relu2_.forward(bn2_.forward(conv2_.forward(h, train), train), train);
  h = relu3_.forward(bn3_.forward(conv3_.forward(h, train), train), train);
  h = pool_.forward(h, train);
  pooled_shape_ = h.shape;
  h = dropout_.forward(h, train, dropout_rng);
  const int M = h.dim(0);
  h.reshape({M, static_cast<int>(h.size() / static_cast<std::size_t>(M))});
  return h;
}

template <class T>
void CnnEncoder<T>::backward(const nn::Tensor<T>& dy) {
  auto g = dropout_.backward(dy);
  g.reshape(pooled_shape_);
  g = pool_.backward(g);
  g = conv3_.backward(bn3_.backward(relu3_.backward(g)), true);
  g = conv2_.backward(bn2_.backward(relu2_.backward(g)), true);
  conv1_.backward(bn1_.backward(relu1_.backward(g)), false);
}

template <class T>
void CnnEncoder<T>::collect(nn::ParameterList<T>& out) {
  conv1_.collect(out);
  bn1_.collect(out);
  conv2_.collect(out);
  bn2_.collect(out);
  conv3_.collect(out);
  bn3_.collect(out);
}

// ---------------------------------------------------------------------------
// GruEncoder

template <class T>
GruEncoder<T>::GruEncoder(const std::string& name, int input_size, int hidden, int layers, Rng& rng) {
  layers_.reserve(static_cast<std::size_t>(layers));
  for (int l = 0; l < layers; ++l) {
    layers_.emplace_back(name + ".gru" + std::to_string(l), l == 0 ? input_size : hidden, hidden, rng);
  }
}

template <class T>
nn::Tensor<T> GruEncoder<T>::forward(const nn::Tensor<T>& x, Mode mode) {
  if (x.rank() != 3 || x.dim(1) < 1) throw std::invalid_argument("GruEncoder: sequence length must be at least 1");
  const bool keep = mode == Mode::Train;
  nn::Tensor<T> h = x;
  for (auto& layer : layers_) h = layer.forward(h, keep);
  batch_ = h.dim(0);
  steps_ = h.dim(1);
  const int H = h.dim(2);
  nn::Tensor<T> last({batch_, H});
  for (int n = 0; n < batch_; ++n) {
    std::copy_n(h.ptr() + (static_cast<std::size_t>(n) * steps_ + steps_ - 1) * H, H,
                last.ptr() + static_cast<std::size_t>(n) * H);
  }
  return last;
}

template <class T>
nn::Tensor<T> GruEncoder<T>::backward(const nn::Tensor<T>& dlast, bool need_input_grad) {
  const int H = dlast.dim(1);
  nn::Tensor<T> g({batch_, steps_, H});
  for (int n = 0; n < batch_; ++n) {
    std::copy_n(dlast.ptr() + static_cast<std::size_t>(n) * H, H,
                g.ptr() + (static_cast<std::size_t>(n) * steps_ + steps_ - 1) * H);
  }
  for (std::size_t l = layers_.size(); l-- > 0;) {
    g = layers_[l].backward(g, l > 0 || need_input_grad);
  }
  return g;
}

template <class T>
void GruEncoder<T>::collect(nn::ParameterList<T>& out) {
  for (auto& layer : layers_) layer.collect(out);
}

// ---------------------------------------------------------------------------
// FutureFoulNet

template <class T>
FutureFoulNet<T>::FutureFoulNet(const ModelConfig& model, const FeatureConfig& features, std::uint64_t seed)
    : model_(model), features_(features), dropout_rng_(seed ^ 0x9e3779b97f4a7c15ULL) {
  model_.validate();
  features_.validate();
  Rng rng(seed);
  const auto& ch = model_.cnn_channels;
  if (model_.use_video) {
    if (features_.global_size < CnnEncoder<T>::kMinInput) {
      throw ConfigError("global_size must be at least " + std::to_string(CnnEncoder<T>::kMinInput));
    }
    video_cnn_ = std::make_unique<CnnEncoder<T>>("video.cnn", ch, model_.dropout_p, rng);
    const int F = CnnEncoder<T>::feature_dim(features_.global_size, features_.global_size, ch);
    if (model_.use_rnn) {
      video_rnn_ = std::make_unique<GruEncoder<T>>("video.rnn", F, model_.hidden, model_.rnn_layers, rng);
      segments_.emplace_back(fused_dim_, model_.hidden);
      fused_dim_ += model_.hidden;
    } else {
      segments_.emplace_back(fused_dim_, F);
      fused_dim_ += F;
    }
  }
  if (model_.use_bbox) {
    bbox_rnn_ = std::make_unique<GruEncoder<T>>("bbox.rnn", kFeetPerFrame, model_.hidden, model_.rnn_layers, rng);
    segments_.emplace_back(fused_dim_, model_.hidden);
    fused_dim_ += model_.hidden;
  }
  if (model_.use_pose) {
    pose_rnn_ = std::make_unique<GruEncoder<T>>("pose.rnn", kPosePerFrame, model_.hidden, model_.rnn_layers, rng);
    segments_.emplace_back(fused_dim_, model_.hidden);
    fused_dim_ += model_.hidden;
  }
  if (model_.use_bboximg) {
    if (features_.crop_size < CnnEncoder<T>::kMinInput) {
      throw ConfigError("crop_size must be at least " + std::to_string(CnnEncoder<T>::kMinInput));
    }
    crop_cnn_ = std::make_unique<CnnEncoder<T>>("bboximg.cnn", ch, model_.dropout_p, rng);
    const int F = CnnEncoder<T>::feature_dim(features_.crop_size, features_.crop_size, ch);
    crop_rnn_ = std::make_unique<GruEncoder<T>>("bboximg.rnn", static_cast<int>(kTrackedPlayers) * F, model_.hidden,
                                                model_.rnn_layers, rng);
    segments_.emplace_back(fused_dim_, model_.hidden);
    fused_dim_ += model_.hidden;
  }

  int in = fused_dim_;
  for (std::size_t i = 0; i < model_.mlp_hidden.size(); ++i) {
    mlp_.emplace_back("mlp.fc" + std::to_string(i), in, model_.mlp_hidden[i], rng);
    mlp_relu_.emplace_back();
    mlp_dropout_.emplace_back(model_.dropout_p);
    in = model_.mlp_hidden[i];
  }
  mlp_.emplace_back("mlp.out", in, 2, rng);
}

template <class T>
void FutureFoulNet<T>::check_inputs(const Batch<T>& batch) const {
  const int B = batch.size;
  const int n = features_.n_frames;
  const int S = features_.global_size;
  const int C = features_.crop_size;
  const int P = static_cast<int>(kTrackedPlayers);
  auto expect = [&](const nn::Tensor<T>& t, const std::vector<int>& shape, const char* branch) {
    if (t.shape != shape) {
      throw ShapeError(std::string(branch) + " branch: expected " + nn::shape_string(shape) + ", got " +
                           nn::shape_string(t.shape),
                       branch);
    }
  };
  if (B <= 0) throw ShapeError("empty batch", "batch");
  if (model_.use_video) expect(batch.video, {B, n, 3, S, S}, "video");
  if (model_.use_bbox) expect(batch.feet, {B, n, kFeetPerFrame}, "bbox");
  if (model_.use_pose) expect(batch.poses, {B, n, kPosePerFrame}, "pose");
  if (model_.use_bboximg) expect(batch.crops, {B, n, P, 3, C, C}, "bboximg");
}

template <class T>
nn::Tensor<T> FutureFoulNet<T>::forward(const Batch<T>& batch, Mode mode) {
  check_inputs(batch);
  const bool train = mode == Mode::Train;
  const int B = batch.size;
  const int n = features_.n_frames;
  const int P = static_cast<int>(kTrackedPlayers);
  std::vector<nn::Tensor<T>> outputs;

  if (model_.use_video) {
    nn::Tensor<T> frames = batch.video;
    frames.reshape({B * n, 3, features_.global_size, features_.global_size});
    nn::Tensor<T> feats = video_cnn_->forward(frames, mode, dropout_rng_);
    const int F = feats.dim(1);
    if (model_.use_rnn) {
      feats.reshape({B, n, F});
      outputs.push_back(video_rnn_->forward(feats, mode));
    } else {
      nn::Tensor<T> mean({B, F});
      for (int b = 0; b < B; ++b) {
        for (int t = 0; t < n; ++t) {
          const T* src = feats.ptr() + (static_cast<std::size_t>(b) * n + t) * F;
          T* dst = mean.ptr() + static_cast<std::size_t>(b) * F;
          for (int f = 0; f < F; ++f) dst[f] += src[f];
        }
      }
      for (auto& v : mean.data) v /= static_cast<T>(n);
      outputs.push_back(std::move(mean));
    }
  }
  if (model_.use_bbox) outputs.push_back(bbox_rnn_->forward(batch.feet, mode));
  if (model_.use_pose) outputs.push_back(pose_rnn_->forward(batch.poses, mode));
  if (model_.use_bboximg) {
    nn::Tensor<T> crops = batch.crops;
    crops.reshape({B * n * P, 3, features_.crop_size, features_.crop_size});
    nn::Tensor<T> feats = crop_cnn_->forward(crops, mode, dropout_rng_);
    const int F = feats.dim(1);
    feats.reshape({B, n, P * F});
    outputs.push_back(crop_rnn_->forward(feats, mode));
  }

  nn::Tensor<T> h({B, fused_dim_});
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    const auto [offset, width] = segments_[k];
    for (int b = 0; b < B; ++b) {
      std::copy_n(outputs[k].ptr() + static_cast<std::size_t>(b) * width, width,
                  h.ptr() + static_cast<std::size_t>(b) * fused_dim_ + offset);
    }
  }
  for (std::size_t i = 0; i + 1 < mlp_.size(); ++i) {
    h = mlp_[i].forward(h, train);
    h = mlp_relu_[i].forward(h, train);
    h = mlp_dropout_[i].forward(h, train, dropout_rng_);
  }
  h = mlp_.back().forward(h, train);
  batch_size_ = B;
  return h;
}

template <class T>
void FutureFoulNet<T>::backward(const nn::Tensor<T>& dlogits) {
  const int B = batch_size_;
  const int n = features_.n_frames;
  const int P = static_cast<int>(kTrackedPlayers);
  nn::Tensor<T> g = mlp_.back().backward(dlogits);
  for (std::size_t i = mlp_.size() - 1; i-- > 0;) {
    g = mlp_dropout_[i].backward(g);
    g = mlp_relu_[i].backward(g);
    g = mlp_[i].backward(g);
  }

  std::size_t k = 0;
  if (model_.use_video) {
    const auto [offset, width] = segments_[k++];
    nn::Tensor<T> d = slice_columns(g, offset, width);
    nn::Tensor<T> dfeat;
    if (model_.use_rnn) {
      dfeat = video_rnn_->backward(d, true);
      dfeat.reshape({B * n, dfeat.dim(2)});
    } else {
      const int F = width;
      dfeat = nn::Tensor<T>({B * n, F});
      const T scale = T(1) / static_cast<T>(n);
      for (int b = 0; b < B; ++b) {
        for (int t = 0; t < n; ++t) {
          T* dst = dfeat.ptr() + (static_cast<std::size_t>(b) * n + t) * F;
          const T* src = d.ptr() + static_cast<std::size_t>(b) * F;
          for (int f = 0; f < F; ++f) dst[f] = src[f] * scale;
        }
      }
    }
    video_cnn_->backward(dfeat);
  }
  if (model_.use_bbox) {
    const auto [offset, width] = segments_[k++];
    bbox_rnn_->backward(slice_columns(g, offset, width), false);
  }
  if (model_.use_pose) {
    const auto [offset, width] = segments_[k++];
    pose_rnn_->backward(slice_columns(g, offset, width), false);
  }
  if (model_.use_bboximg) {
    const auto [offset, width] = segments_[k++];
    nn::Tensor<T> dfeat = crop_rnn_->backward(slice_columns(g, offset, width), true);
    dfeat.reshape({B * n * P, dfeat.dim(2) / P});
    crop_cnn_->backward(dfeat);
  }
}

template <class T>
nn::ParameterList<T> FutureFoulNet<T>::group(const std::string& name) {
  nn::ParameterList<T> out;
  if (name == "video") {
    if (video_cnn_) video_cnn_->collect(out);
    if (video_rnn_) video_rnn_->collect(out);
  } else if (name == "bbox") {
    if (bbox_rnn_) bbox_rnn_->collect(out);
  } else if (name == "pose") {
    if (pose_rnn_) pose_rnn_->collect(out);
  } else if (name == "bboximg") {
    if (crop_cnn_) crop_cnn_->collect(out);
    if (crop_rnn_) crop_rnn_->collect(out);
  } else if (name == "mlp") {
    for (auto& layer : mlp_) layer.collect(out);
  } else {
    throw std::invalid_argument("unknown parameter group " + name);
  }
  return out;
}

template <class T>
nn::ParameterList<T> FutureFoulNet<T>::parameters() {
  nn::ParameterList<T> out;
  for (const char* name : kParameterGroups) {
    auto g = group(name);
    out.params.insert(out.params.end(), g.params.begin(), g.params.end());
    out.buffers.insert(out.buffers.end(), g.buffers.begin(), g.buffers.end());
  }
  return out;
}

template <class T>
std::uint64_t CnnEncoder<T>::pattern(std::uint64_t h) const {
  return pool_.pattern(relu3_.pattern(relu2_.pattern(relu1_.pattern(h))));
}

template <class T>
std::uint64_t FutureFoulNet<T>::activation_pattern() const {
  std::uint64_t h = 14695981039346656037ULL;
  if (video_cnn_) h = video_cnn_->pattern(h);
  if (crop_cnn_) h = crop_cnn_->pattern(h);
  for (const auto& r : mlp_relu_) h = r.pattern(h);
  return h;
}

template <class T>
std::size_t FutureFoulNet<T>::parameter_count() {
  std::size_t total = 0;
  for (const auto* p : parameters().params) total += p->value.size();
  return total;
}

std::size_t parameter_count(const ModelConfig& model, const FeatureConfig& features) {
  model.validate();
  std::size_t total = 0;
  int fused = 0;
  const auto& ch = model.cnn_channels;
  if (model.use_video) {
    total += cnn_params(ch);
    const int F = CnnEncoder<float>::feature_dim(features.global_size, features.global_size, ch);
    if (model.use_rnn) {
      total += gru_params(F, model.hidden, model.rnn_layers);
      fused += model.hidden;
    } else {
      fused += F;
    }
  }
  if (model.use_bbox) {
    total += gru_params(kFeetPerFrame, model.hidden, model.rnn_layers);
    fused += model.hidden;
  }
  if (model.use_pose) {
    total += gru_params(kPosePerFrame, model.hidden, model.rnn_layers);
    fused += model.hidden;
  }
  if (model.use_bboximg) {
    total += cnn_params(ch);
    const int F = CnnEncoder<float>::feature_dim(features.crop_size, features.crop_size, ch);
    total += gru_params(static_cast<int>(kTrackedPlayers) * F, model.hidden, model.rnn_layers);
    fused += model.hidden;
  }
  int in = fused;
  for (int w : model.mlp_hidden) {
    total += static_cast<std::size_t>(in) * w + w;
    in = w;
  }
  total += static_cast<std::size_t>(in) * 2 + 2;
  return total;
}

template <class T>
std::vector<double> foul_probability(const nn::Tensor<T>& logits) {
  std::vector<double> out;
  const int N = logits.dim(0);
  for (int i = 0; i < N; ++i) {
    const double a = logits.data[static_cast<std::size_t>(i) * 2];
    const double b = logits.data[static_cast<std::size_t>(i) * 2 + 1];
    out.push_back(1.0 / (1.0 + std::exp(a - b)));
  }
  return out;
}

template struct Batch<float>;
template struct Batch<double>;
template Batch<float> make_batch<float>(std::span<const Sample* const>, const ModelConfig&);
template Batch<double> make_batch<double>(std::span<const Sample* const>, const ModelConfig&);
template class CnnEncoder<float>;
template class CnnEncoder<double>;
template class GruEncoder<float>;
template class GruEncoder<double>;
template class FutureFoulNet<float>;
template class FutureFoulNet<double>;
template std::vector<double> foul_probability<float>(const nn::Tensor<float>&);
template std::vector<double> foul_probability<double>(const nn::Tensor<double>&);

}  // namespace futurefoul
