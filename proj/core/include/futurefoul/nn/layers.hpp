// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Layers with hand-written backward passes. Each layer caches what its
// backward pass needs when forward() runs with `train` (or `keep`) set; a
// backward() call must follow the matching forward(). Gradients accumulate
// into Parameter::grad.

#include <cstdint>
#include <string>
#include <vector>

#include "futurefoul/nn/tensor.hpp"
#include "futurefoul/rng.hpp"

namespace futurefoul::nn {

/// 2-D convolution without bias (each one feeds a batch norm).
template <class T>
class Conv2d {
 public:
  Conv2d(const std::string& name, int in_channels, int out_channels, int kernel, int stride, int padding,
         Rng& rng);

  /// x: (N, C, H, W) -> (N, O, Ho, Wo).
  Tensor<T> forward(const Tensor<T>& x, bool keep);
  /// Returns dx when `need_input_grad`, otherwise an empty tensor.
  Tensor<T> backward(const Tensor<T>& dy, bool need_input_grad);

  int output_size(int in) const noexcept { return (in + 2 * padding_ - kernel_) / stride_ + 1; }
  void collect(ParameterList<T>& out) { out.params.push_back(&weight_); }

 private:
  void im2col(const T* x, int images, int H, int W, T* col) const;
  void col2im(const T* col, int images, int H, int W, T* dx) const;

  int in_channels_;
  int out_channels_;
  int kernel_;
  int stride_;
  int padding_;
  Parameter<T> weight_;  // (O, C, k, k)
  Tensor<T> input_;
};

/// Per-channel batch normalization over (N, H, W).
template <class T>
class BatchNorm2d {
 public:
  BatchNorm2d(const std::string& name, int channels, double momentum = 0.1, double eps = 1e-5);

  Tensor<T> forward(const Tensor<T>& x, bool train);
  Tensor<T> backward(const Tensor<T>& dy);

  void collect(ParameterList<T>& out) {
    out.params.push_back(&gamma_);
    out.params.push_back(&beta_);
    out.buffers.push_back(&running_mean_);
    out.buffers.push_back(&running_var_);
  }

 private:
  int channels_;
  double momentum_;
  double eps_;
  Parameter<T> gamma_;
  Parameter<T> beta_;
  Buffer<T> running_mean_;
  Buffer<T> running_var_;
  bool cached_train_ = false;
  Tensor<T> xhat_;
  AlignedVector<T> inv_std_;
};

inline std::uint64_t pattern_mix(std::uint64_t h, std::uint64_t v) noexcept {
  return (h ^ v) * 1099511628211ULL;
}

template <class T>
class Relu {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool keep);
  Tensor<T> backward(const Tensor<T>& dy) const;

  /// Folds the on/off state of every kept unit into `h`.
  std::uint64_t pattern(std::uint64_t h) const {
    for (const T v : output_.data) h = pattern_mix(h, v > T(0) ? 1 : 0);
    return h;
  }

 private:
  Tensor<T> output_;
};

/// Max pooling onto a grid of at most `grid` x `grid` cells. Cell (i, j)
/// covers rows [floor(i*H/g), ceil((i+1)*H/g)) and the same for columns.
template <class T>
class AdaptiveMaxPool2d {
 public:
  explicit AdaptiveMaxPool2d(int grid) : grid_(grid) {}

  Tensor<T> forward(const Tensor<T>& x, bool keep);
  Tensor<T> backward(const Tensor<T>& dy) const;

  int output_size(int in) const noexcept { return in < grid_ ? in : grid_; }

  /// Folds the winning input index of every kept cell into `h`.
  std::uint64_t pattern(std::uint64_t h) const {
    for (const std::size_t i : argmax_) h = pattern_mix(h, i);
    return h;
  }

 private:
  int grid_;
  std::vector<int> input_shape_;
  std::vector<std::size_t> argmax_;
};

/// Inverted dropout; identity outside training.
template <class T>
class Dropout {
 public:
  explicit Dropout(double p) : p_(p) {}

  Tensor<T> forward(const Tensor<T>& x, bool train, Rng& rng);
  Tensor<T> backward(const Tensor<T>& dy) const;

 private:
  double p_;
  bool active_ = false;
  AlignedVector<T> mask_;
};

/// y = x W^T + b, x: (N, in).
template <class T>
class Linear {
 public:
  Linear(const std::string& name, int in_features, int out_features, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x, bool keep);
  Tensor<T> backward(const Tensor<T>& dy);

  void collect(ParameterList<T>& out) {
    out.params.push_back(&weight_);
    out.params.push_back(&bias_);
  }

 private:
  int in_;
  int out_;
  Parameter<T> weight_;  // (out, in)
  Parameter<T> bias_;    // (out)
  Tensor<T> input_;
};

/// One GRU layer with gate order (reset, update, new):
///   r = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
///   z = sigmoid(W_iz x + b_iz + W_hz h + b_hz)
///   n = tanh(W_in x + b_in + r * (W_hn h + b_hn))
///   h' = (1 - z) * n + z * h
/// The initial state is zero.
template <class T>
class GruLayer {
 public:
  GruLayer(const std::string& name, int input_size, int hidden_size, Rng& rng);

  /// x: (N, T, I) -> every hidden state (N, T, H).
  Tensor<T> forward(const Tensor<T>& x, bool keep);
  /// dh: gradient for every output state (N, T, H). Returns dx when asked.
  Tensor<T> backward(const Tensor<T>& dh, bool need_input_grad);

  int hidden_size() const noexcept { return hidden_; }
  void collect(ParameterList<T>& out) {
    out.params.push_back(&weight_ih_);
    out.params.push_back(&weight_hh_);
    out.params.push_back(&bias_ih_);
    out.params.push_back(&bias_hh_);
  }

 private:
  int input_size_;
  int hidden_;
  Parameter<T> weight_ih_;  // (3H, I)
  Parameter<T> weight_hh_;  // (3H, H)
  Parameter<T> bias_ih_;    // (3H)
  Parameter<T> bias_hh_;    // (3H)

  int batch_ = 0;
  int steps_ = 0;
  Tensor<T> input_;
  AlignedVector<T> states_;     // (T + 1) x N x H, states_[0] = 0
  AlignedVector<T> gates_;      // T x N x 3H: r, z, n after activation
  AlignedVector<T> hidden_n_;   // T x N x H: W_hn h + b_hn
};

/// Mean softmax cross-entropy over the batch. Writes d(loss)/d(logits).
template <class T>
double cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels, Tensor<T>* grad);

}  // namespace futurefoul::nn
