// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/nn/layers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "futurefoul/error.hpp"

namespace futurefoul::nn {

namespace {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using RowMap = Eigen::Map<RowMat<T>>;
template <class T>
using ConstRowMap = Eigen::Map<const RowMat<T>>;

// Upper bound on im2col buffer elements; larger batches are processed in
// chunks of images.
constexpr std::size_t kMaxColumnElements = std::size_t{1} << 22;

template <class T>
void init_uniform(Tensor<T>& t, double bound, Rng& rng) {
  for (auto& v : t.data) v = static_cast<T>(rng.uniform(-bound, bound));
}

}  // namespace

std::string shape_string(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// ---------------------------------------------------------------------------
// Conv2d

template <class T>
Conv2d<T>::Conv2d(const std::string& name, int in_channels, int out_channels, int kernel, int stride,
                  int padding, Rng& rng)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_(kernel),
      stride_(stride),
      padding_(padding),
      weight_(name + ".weight", {out_channels, in_channels, kernel, kernel}) {
  init_uniform(weight_.value, 1.0 / std::sqrt(static_cast<double>(in_channels * kernel * kernel)), rng);
}

template <class T>
void Conv2d<T>::im2col(const T* x, int images, int H, int W, T* col) const {
  const int Ho = output_size(H);
  const int Wo = output_size(W);
  const std::size_t P = static_cast<std::size_t>(Ho) * static_cast<std::size_t>(Wo);
  const std::size_t cols = static_cast<std::size_t>(images) * P;
  const std::size_t plane = static_cast<std::size_t>(H) * static_cast<std::size_t>(W);
  for (int c = 0; c < in_channels_; ++c) {
    for (int ky = 0; ky < kernel_; ++ky) {
      for (int kx = 0; kx < kernel_; ++kx) {
        T* dst = col + static_cast<std::size_t>((c * kernel_ + ky) * kernel_ + kx) * cols;
        for (int i = 0; i < images; ++i) {
          const T* src = x + (static_cast<std::size_t>(i) * in_channels_ + c) * plane;
          for (int oy = 0; oy < Ho; ++oy) {
            T* d = dst + static_cast<std::size_t>(i) * P + static_cast<std::size_t>(oy) * Wo;
            const int iy = oy * stride_ - padding_ + ky;
            if (iy < 0 || iy >= H) {
              std::fill_n(d, Wo, T(0));
              continue;
            }
            const T* row = src + static_cast<std::size_t>(iy) * W;
            for (int ox = 0; ox < Wo; ++ox) {
              const int ix = ox * stride_ - padding_ + kx;
              d[ox] = (ix >= 0 && ix < W) ? row[ix] : T(0);
            }
          }
        }
      }
    }
  }
}

template <class T>
void Conv2d<T>::col2im(const T* col, int images, int H, int W, T* dx) const {
  const int Ho = output_size(H);
  const int Wo = output_size(W);
  const std::size_t P = static_cast<std::size_t>(Ho) * static_cast<std::size_t>(Wo);
  const std::size_t cols = static_cast<std::size_t>(images) * P;
  const std::size_t plane = static_cast<std::size_t>(H) * static_cast<std::size_t>(W);
  for (int c = 0; c < in_channels_; ++c) {
    for (int ky = 0; ky < kernel_; ++ky) {
      for (int kx = 0; kx < kernel_; ++kx) {
        const T* src = col + static_cast<std::size_t>((c * kernel_ + ky) * kernel_ + kx) * cols;
        for (int i = 0; i < images; ++i) {
          T* dst = dx + (static_cast<std::size_t>(i) * in_channels_ + c) * plane;
          for (int oy = 0; oy < Ho; ++oy) {
            const int iy = oy * stride_ - padding_ + ky;
            if (iy < 0 || iy >= H) continue;
            const T* s = src + static_cast<std::size_t>(i) * P + static_cast<std::size_t>(oy) * Wo;
            T* row = dst + static_cast<std::size_t>(iy) * W;
            for (int ox = 0; ox < Wo; ++ox) {
              const int ix = ox * stride_ - padding_ + kx;
              if (ix >= 0 && ix < W) row[ix] += s[ox];
            }
          }
        }
      }
    }
  }
}

template <class T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x, bool keep) {
  if (x.rank() != 4 || x.dim(1) != in_channels_) {
    throw std::invalid_argument("Conv2d: expected (N, " + std::to_string(in_channels_) + ", H, W), got " +
                                shape_string(x.shape));
  }
  const int N = x.dim(0);
  const int H = x.dim(2);
  const int W = x.dim(3);
  const int Ho = output_size(H);
  const int Wo = output_size(W);
  const std::size_t P = static_cast<std::size_t>(Ho) * static_cast<std::size_t>(Wo);
  const std::size_t K = static_cast<std::size_t>(in_channels_) * kernel_ * kernel_;
  const std::size_t in_image = static_cast<std::size_t>(in_channels_) * H * W;
  const std::size_t out_image = static_cast<std::size_t>(out_channels_) * P;

  Tensor<T> y({N, out_channels_, Ho, Wo});
  const int chunk = static_cast<int>(std::max<std::size_t>(1, kMaxColumnElements / (K * P)));
  AlignedVector<T> col(K * P * static_cast<std::size_t>(std::min(chunk, N)));
  RowMat<T> out(out_channels_, static_cast<Eigen::Index>(P) * std::min(chunk, N));
  ConstRowMap<T> weights(weight_.value.ptr(), out_channels_, static_cast<Eigen::Index>(K));

  for (int n0 = 0; n0 < N; n0 += chunk) {
    const int m = std::min(chunk, N - n0);
    const auto cols = static_cast<Eigen::Index>(P) * m;
    im2col(x.ptr() + static_cast<std::size_t>(n0) * in_image, m, H, W, col.data());
    ConstRowMap<T> colm(col.data(), static_cast<Eigen::Index>(K), cols);
    out.leftCols(cols).noalias() = weights * colm;
    for (int i = 0; i < m; ++i) {
      T* dst = y.ptr() + static_cast<std::size_t>(n0 + i) * out_image;
      for (int o = 0; o < out_channels_; ++o) {
        std::memcpy(dst + static_cast<std::size_t>(o) * P, out.row(o).data() + static_cast<std::size_t>(i) * P,
                    P * sizeof(T));
      }
    }
  }
  if (keep) {
    input_ = x;
  } else {
    input_ = Tensor<T>();
  }
  return y;
}

template <class T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& dy, bool need_input_grad) {
  if (input_.size() == 0) throw std::logic_error("Conv2d::backward without cached forward");
  const int N = input_.dim(0);
  const int H = input_.dim(2);
  const int W = input_.dim(3);
  const int Ho = output_size(H);
  const int Wo = output_size(W);
  const std::size_t P = static_cast<std::size_t>(Ho) * static_cast<std::size_t>(Wo);
  const std::size_t K = static_cast<std::size_t>(in_channels_) * kernel_ * kernel_;
  const std::size_t in_image = static_cast<std::size_t>(in_channels_) * H * W;
  const std::size_t out_image = static_cast<std::size_t>(out_channels_) * P;

  Tensor<T> dx;
  if (need_input_grad) dx = Tensor<T>(input_.shape);
  const int chunk = static_cast<int>(std::max<std::size_t>(1, kMaxColumnElements / (K * P)));
  AlignedVector<T> col(K * P * static_cast<std::size_t>(std::min(chunk, N)));
  RowMat<T> grad_out(out_channels_, static_cast<Eigen::Index>(P) * std::min(chunk, N));
  RowMat<T> grad_col;
  ConstRowMap<T> weights(weight_.value.ptr(), out_channels_, static_cast<Eigen::Index>(K));
  RowMap<T> grad_weights(weight_.grad.ptr(), out_channels_, static_cast<Eigen::Index>(K));

  for (int n0 = 0; n0 < N; n0 += chunk) {
    const int m = std::min(chunk, N - n0);
    const auto cols = static_cast<Eigen::Index>(P) * m;
    for (int i = 0; i < m; ++i) {
      const T* src = dy.ptr() + static_cast<std::size_t>(n0 + i) * out_image;
      for (int o = 0; o < out_channels_; ++o) {
        std::memcpy(grad_out.row(o).data() + static_cast<std::size_t>(i) * P, src + static_cast<std::size_t>(o) * P,
                    P * sizeof(T));
      }
    }
    im2col(input_.ptr() + static_cast<std::size_t>(n0) * in_image, m, H, W, col.data());
    ConstRowMap<T> colm(col.data(), static_cast<Eigen::Index>(K), cols);
    grad_weights.noalias() += grad_out.leftCols(cols) * colm.transpose();
    if (need_input_grad) {
      grad_col.noalias() = weights.transpose() * grad_out.leftCols(cols);
      col2im(grad_col.data(), m, H, W, dx.ptr() + static_cast<std::size_t>(n0) * in_image);
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// BatchNorm2d

template <class T>
BatchNorm2d<T>::BatchNorm2d(const std::string& name, int channels, double momentum, double eps)
    : channels_(channels),
      momentum_(momentum),
      eps_(eps),
      gamma_(name + ".weight", {channels}),
      beta_(name + ".bias", {channels}),
      running_mean_{name + ".running_mean", Tensor<T>({channels}, T(0))},
      running_var_{name + ".running_var", Tensor<T>({channels}, T(1))} {
  gamma_.value.fill(T(1));
}

template <class T>
Tensor<T> BatchNorm2d<T>::forward(const Tensor<T>& x, bool train) {
  if (x.rank() != 4 || x.dim(1) != channels_) {
    throw std::invalid_argument("BatchNorm2d: bad input shape " + shape_string(x.shape));
  }
  const int N = x.dim(0);
  const std::size_t plane = static_cast<std::size_t>(x.dim(2)) * static_cast<std::size_t>(x.dim(3));
  const double M = static_cast<double>(N) * static_cast<double>(plane);
  Tensor<T> y(x.shape);
  if (train) {
    xhat_ = Tensor<T>(x.shape);
    inv_std_.assign(static_cast<std::size_t>(channels_), T(0));
  } else {
    xhat_ = Tensor<T>();
  }
  cached_train_ = train;

  for (int c = 0; c < channels_; ++c) {
    double mean = 0.0;
    double var = 0.0;
    if (train) {
      for (int n = 0; n < N; ++n) {
        const T* p = x.ptr() + (static_cast<std::size_t>(n) * channels_ + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) mean += p[i];
      }
      mean /= M;
      for (int n = 0; n < N; ++n) {
        const T* p = x.ptr() + (static_cast<std::size_t>(n) * channels_ + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) {
          const double d = p[i] - mean;
          var += d * d;
        }
      }
      var /= M;
      auto& rm = running_mean_.value.data[static_cast<std::size_t>(c)];
      auto& rv = running_var_.value.data[static_cast<std::size_t>(c)];
      rm = static_cast<T>((1.0 - momentum_) * rm + momentum_ * mean);
      const double unbiased = M > 1.0 ? var * M / (M - 1.0) : var;
      rv = static_cast<T>((1.0 - momentum_) * rv + momentum_ * unbiased);
    } else {
      mean = running_mean_.value.data[static_cast<std::size_t>(c)];
      var = running_var_.value.data[static_cast<std::size_t>(c)];
    }
    const T inv = static_cast<T>(1.0 / std::sqrt(var + eps_));
    const T g = gamma_.value.data[static_cast<std::size_t>(c)];
    const T b = beta_.value.data[static_cast<std::size_t>(c)];
    const T mu = static_cast<T>(mean);
    if (train) inv_std_[static_cast<std::size_t>(c)] = inv;
    for (int n = 0; n < N; ++n) {
      const std::size_t off = (static_cast<std::size_t>(n) * channels_ + c) * plane;
      const T* p = x.ptr() + off;
      T* q = y.ptr() + off;
      for (std::size_t i = 0; i < plane; ++i) {
        const T xh = (p[i] - mu) * inv;
        if (train) xhat_.data[off + i] = xh;
        q[i] = g * xh + b;
      }
    }
  }
  return y;
}

template <class T>
Tensor<T> BatchNorm2d<T>::backward(const Tensor<T>& dy) {
  if (!cached_train_ || xhat_.size() == 0) {
    throw std::logic_error("BatchNorm2d::backward requires a training-mode forward");
  }
  const int N = dy.dim(0);
  const std::size_t plane = static_cast<std::size_t>(dy.dim(2)) * static_cast<std::size_t>(dy.dim(3));
  const double M = static_cast<double>(N) * static_cast<double>(plane);
  Tensor<T> dx(dy.shape);
  for (int c = 0; c < channels_; ++c) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (int n = 0; n < N; ++n) {
      const std::size_t off = (static_cast<std::size_t>(n) * channels_ + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        sum_dy += dy.data[off + i];
        sum_dy_xhat += static_cast<double>(dy.data[off + i]) * xhat_.data[off + i];
      }
    }
    gamma_.grad.data[static_cast<std::size_t>(c)] += static_cast<T>(sum_dy_xhat);
    beta_.grad.data[static_cast<std::size_t>(c)] += static_cast<T>(sum_dy);
    const double g = gamma_.value.data[static_cast<std::size_t>(c)];
    const double scale = g * inv_std_[static_cast<std::size_t>(c)] / M;
    for (int n = 0; n < N; ++n) {
      const std::size_t off = (static_cast<std::size_t>(n) * channels_ + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        dx.data[off + i] =
            static_cast<T>(scale * (M * dy.data[off + i] - sum_dy - xhat_.data[off + i] * sum_dy_xhat));
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Relu, pooling, dropout

template <class T>
Tensor<T> Relu<T>::forward(const Tensor<T>& x, bool keep) {
  Tensor<T> y(x.shape);
  std::transform(x.data.begin(), x.data.end(), y.data.begin(), [](T v) { return v > T(0) ? v : T(0); });
  if (keep) {
    output_ = y;
  } else {
    output_ = Tensor<T>();
  }
  return y;
}

template <class T>
Tensor<T> Relu<T>::backward(const Tensor<T>& dy) const {
  Tensor<T> dx(dy.shape);
  for (std::size_t i = 0; i < dy.size(); ++i) dx.data[i] = output_.data[i] > T(0) ? dy.data[i] : T(0);
  return dx;
}

template <class T>
Tensor<T> AdaptiveMaxPool2d<T>::forward(const Tensor<T>& x, bool keep) {
  const int N = x.dim(0);
  const int C = x.dim(1);
  const int H = x.dim(2);
  const int W = x.dim(3);
  const int gh = output_size(H);
  const int gw = output_size(W);
  Tensor<T> y({N, C, gh, gw});
  std::vector<std::size_t> argmax(y.size());
  const std::size_t plane = static_cast<std::size_t>(H) * static_cast<std::size_t>(W);
  std::size_t out = 0;
  for (int nc = 0; nc < N * C; ++nc) {
    const std::size_t base = static_cast<std::size_t>(nc) * plane;
    for (int i = 0; i < gh; ++i) {
      const int r0 = (i * H) / gh;
      const int r1 = ((i + 1) * H + gh - 1) / gh;
      for (int j = 0; j < gw; ++j) {
        const int c0 = (j * W) / gw;
        const int c1 = ((j + 1) * W + gw - 1) / gw;
        std::size_t best = base + static_cast<std::size_t>(r0) * W + c0;
        for (int r = r0; r < r1; ++r) {
          for (int c = c0; c < c1; ++c) {
            const std::size_t idx = base + static_cast<std::size_t>(r) * W + c;
            if (x.data[idx] > x.data[best]) best = idx;
          }
        }
        y.data[out] = x.data[best];
        argmax[out] = best;
        ++out;
      }
    }
  }
  if (keep) {
    argmax_ = std::move(argmax);
    input_shape_ = x.shape;
  } else {
    argmax_.clear();
    input_shape_.clear();
  }
  return y;
}

template <class T>
Tensor<T> AdaptiveMaxPool2d<T>::backward(const Tensor<T>& dy) const {
  Tensor<T> dx(input_shape_);
  for (std::size_t i = 0; i < dy.size(); ++i) dx.data[argmax_[i]] += dy.data[i];
  return dx;
}

template <class T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& x, bool train, Rng& rng) {
  active_ = train && p_ > 0.0;
  if (!active_) return x;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p_));
  mask_.resize(x.size());
  Tensor<T> y(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask_[i] = rng.bernoulli(p_) ? T(0) : keep_scale;
    y.data[i] = x.data[i] * mask_[i];
  }
  return y;
}

template <class T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& dy) const {
  if (!active_) return dy;
  Tensor<T> dx(dy.shape);
  for (std::size_t i = 0; i < dy.size(); ++i) dx.data[i] = dy.data[i] * mask_[i];
  return dx;
}

// ---------------------------------------------------------------------------
// Linear

template <class T>
Linear<T>::Linear(const std::string& name, int in_features, int out_features, Rng& rng)
    : in_(in_features),
      out_(out_features),
      weight_(name + ".weight", {out_features, in_features}),
      bias_(name + ".bias", {out_features}) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_features));
  init_uniform(weight_.value, bound, rng);
  init_uniform(bias_.value, bound, rng);
}

template <class T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x, bool keep) {
  if (x.rank() != 2 || x.dim(1) != in_) {
    throw std::invalid_argument("Linear: expected (N, " + std::to_string(in_) + "), got " + shape_string(x.shape));
  }
  const int N = x.dim(0);
  Tensor<T> y({N, out_});
  ConstRowMap<T> xm(x.ptr(), N, in_);
  ConstRowMap<T> w(weight_.value.ptr(), out_, in_);
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> b(bias_.value.ptr(), out_);
  RowMap<T> ym(y.ptr(), N, out_);
  ym.noalias() = xm * w.transpose();
  ym.rowwise() += b;
  if (keep) {
    input_ = x;
  } else {
    input_ = Tensor<T>();
  }
  return y;
}

template <class T>
Tensor<T> Linear<T>::backward(const Tensor<T>& dy) {
  const int N = dy.dim(0);
  ConstRowMap<T> dym(dy.ptr(), N, out_);
  ConstRowMap<T> xm(input_.ptr(), N, in_);
  ConstRowMap<T> w(weight_.value.ptr(), out_, in_);
  RowMap<T> dw(weight_.grad.ptr(), out_, in_);
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> db(bias_.grad.ptr(), out_);
  dw.noalias() += dym.transpose() * xm;
  db += dym.colwise().sum();
  Tensor<T> dx({N, in_});
  RowMap<T>(dx.ptr(), N, in_).noalias() = dym * w;
  return dx;
}

// ---------------------------------------------------------------------------
// GRU

template <class T>
GruLayer<T>::GruLayer(const std::string& name, int input_size, int hidden_size, Rng& rng)
    : input_size_(input_size),
      hidden_(hidden_size),
      weight_ih_(name + ".weight_ih", {3 * hidden_size, input_size}),
      weight_hh_(name + ".weight_hh", {3 * hidden_size, hidden_size}),
      bias_ih_(name + ".bias_ih", {3 * hidden_size}),
      bias_hh_(name + ".bias_hh", {3 * hidden_size}) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  init_uniform(weight_ih_.value, bound, rng);
  init_uniform(weight_hh_.value, bound, rng);
  init_uniform(bias_ih_.value, bound, rng);
  init_uniform(bias_hh_.value, bound, rng);
}

namespace {

template <class T>
T sigmoid(T v) {
  return T(1) / (T(1) + std::exp(-v));
}

}  // namespace

template <class T>
Tensor<T> GruLayer<T>::forward(const Tensor<T>& x, bool keep) {
  if (x.rank() != 3 || x.dim(2) != input_size_) {
    throw std::invalid_argument("GruLayer: expected (N, T, " + std::to_string(input_size_) + "), got " +
                                shape_string(x.shape));
  }
  const int N = x.dim(0);
  const int steps = x.dim(1);
  if (steps < 1) throw std::invalid_argument("GruLayer: sequence length must be at least 1");
  const int H = hidden_;
  const int G = 3 * H;

  // Input projections for every (n, t), row n * steps + t.
  RowMat<T> xp(static_cast<Eigen::Index>(N) * steps, G);
  {
    ConstRowMap<T> xm(x.ptr(), static_cast<Eigen::Index>(N) * steps, input_size_);
    ConstRowMap<T> w(weight_ih_.value.ptr(), G, input_size_);
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> b(bias_ih_.value.ptr(), G);
    xp.noalias() = xm * w.transpose();
    xp.rowwise() += b;
  }
  ConstRowMap<T> whh(weight_hh_.value.ptr(), G, H);
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bhh(bias_hh_.value.ptr(), G);

  const std::size_t NH = static_cast<std::size_t>(N) * H;
  AlignedVector<T> states((static_cast<std::size_t>(steps) + 1) * NH, T(0));
  AlignedVector<T> gates(static_cast<std::size_t>(steps) * N * G);
  AlignedVector<T> hidden_n(static_cast<std::size_t>(steps) * NH);
  RowMat<T> hp(N, G);
  Tensor<T> out({N, steps, H});

  for (int t = 0; t < steps; ++t) {
    ConstRowMap<T> h_prev(states.data() + static_cast<std::size_t>(t) * NH, N, H);
    hp.noalias() = h_prev * whh.transpose();
    hp.rowwise() += bhh;
    T* h_next = states.data() + static_cast<std::size_t>(t + 1) * NH;
    for (int n = 0; n < N; ++n) {
      const T* xrow = xp.row(static_cast<Eigen::Index>(n) * steps + t).data();
      const T* hrow = hp.row(n).data();
      T* g = gates.data() + (static_cast<std::size_t>(t) * N + n) * G;
      T* hn = hidden_n.data() + static_cast<std::size_t>(t) * NH + static_cast<std::size_t>(n) * H;
      const T* hprev = h_prev.row(n).data();
      T* hnext = h_next + static_cast<std::size_t>(n) * H;
      T* o = out.ptr() + (static_cast<std::size_t>(n) * steps + t) * H;
      for (int j = 0; j < H; ++j) {
        const T r = sigmoid(xrow[j] + hrow[j]);
        const T z = sigmoid(xrow[H + j] + hrow[H + j]);
        const T nn = std::tanh(xrow[2 * H + j] + r * hrow[2 * H + j]);
        g[j] = r;
        g[H + j] = z;
        g[2 * H + j] = nn;
        hn[j] = hrow[2 * H + j];
        const T h = (T(1) - z) * nn + z * hprev[j];
        hnext[j] = h;
        o[j] = h;
      }
    }
  }

  batch_ = N;
  steps_ = steps;
  if (keep) {
    input_ = x;
    states_ = std::move(states);
    gates_ = std::move(gates);
    hidden_n_ = std::move(hidden_n);
  } else {
    input_ = Tensor<T>();
    states_.clear();
    gates_.clear();
    hidden_n_.clear();
  }
  return out;
}

template <class T>
Tensor<T> GruLayer<T>::backward(const Tensor<T>& dh, bool need_input_grad) {
  if (states_.empty()) throw std::logic_error("GruLayer::backward without cached forward");
  const int N = batch_;
  const int steps = steps_;
  const int H = hidden_;
  const int G = 3 * H;
  const std::size_t NH = static_cast<std::size_t>(N) * H;

  ConstRowMap<T> whh(weight_hh_.value.ptr(), G, H);
  RowMap<T> dwhh(weight_hh_.grad.ptr(), G, H);
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> dbhh(bias_hh_.grad.ptr(), G);

  RowMat<T> dxp(static_cast<Eigen::Index>(N) * steps, G);
  RowMat<T> dhp(N, G);
  RowMat<T> carry = RowMat<T>::Zero(N, H);  // gradient flowing into h_t from later steps
  RowMat<T> dh_prev(N, H);

  for (int t = steps - 1; t >= 0; --t) {
    ConstRowMap<T> h_prev(states_.data() + static_cast<std::size_t>(t) * NH, N, H);
    for (int n = 0; n < N; ++n) {
      const T* g = gates_.data() + (static_cast<std::size_t>(t) * N + n) * G;
      const T* hn = hidden_n_.data() + static_cast<std::size_t>(t) * NH + static_cast<std::size_t>(n) * H;
      const T* hprev = h_prev.row(n).data();
      const T* up = dh.ptr() + (static_cast<std::size_t>(n) * steps + t) * H;
      T* dx_row = dxp.row(static_cast<Eigen::Index>(n) * steps + t).data();
      T* dh_row = dhp.row(n).data();
      for (int j = 0; j < H; ++j) {
        const T r = g[j];
        const T z = g[H + j];
        const T nn = g[2 * H + j];
        const T d = up[j] + carry(n, j);
        const T dn = d * (T(1) - z);
        const T dz = d * (hprev[j] - nn);
        dh_prev(n, j) = d * z;
        const T dan = dn * (T(1) - nn * nn);
        const T dr = dan * hn[j];
        const T dar = dr * r * (T(1) - r);
        const T daz = dz * z * (T(1) - z);
        dx_row[j] = dar;
        dx_row[H + j] = daz;
        dx_row[2 * H + j] = dan;
        dh_row[j] = dar;
        dh_row[H + j] = daz;
        dh_row[2 * H + j] = dan * r;
      }
    }
    dwhh.noalias() += dhp.transpose() * h_prev;
    dbhh += dhp.colwise().sum();
    carry = dh_prev;
    carry.noalias() += dhp * whh;
  }

  ConstRowMap<T> xm(input_.ptr(), static_cast<Eigen::Index>(N) * steps, input_size_);
  RowMap<T> dwih(weight_ih_.grad.ptr(), G, input_size_);
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> dbih(bias_ih_.grad.ptr(), G);
  dwih.noalias() += dxp.transpose() * xm;
  dbih += dxp.colwise().sum();

  Tensor<T> dx;
  if (need_input_grad) {
    dx = Tensor<T>(input_.shape);
    ConstRowMap<T> wih(weight_ih_.value.ptr(), G, input_size_);
    RowMap<T>(dx.ptr(), static_cast<Eigen::Index>(N) * steps, input_size_).noalias() = dxp * wih;
  }
  return dx;
}

// ---------------------------------------------------------------------------

template <class T>
double cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels, Tensor<T>* grad) {
  const int N = logits.dim(0);
  const int K = logits.dim(1);
  if (static_cast<int>(labels.size()) != N) throw std::invalid_argument("cross_entropy: label count mismatch");
  if (grad != nullptr) *grad = Tensor<T>(logits.shape);
  double total = 0.0;
  for (int n = 0; n < N; ++n) {
    const T* row = logits.ptr() + static_cast<std::size_t>(n) * K;
    double mx = row[0];
    for (int k = 1; k < K; ++k) mx = std::max<double>(mx, row[k]);
    double sum = 0.0;
    for (int k = 0; k < K; ++k) sum += std::exp(row[k] - mx);
    const double log_sum = std::log(sum) + mx;
    total += log_sum - row[labels[static_cast<std::size_t>(n)]];
    if (grad != nullptr) {
      for (int k = 0; k < K; ++k) {
        const double p = std::exp(row[k] - log_sum);
        grad->data[static_cast<std::size_t>(n) * K + k] =
            static_cast<T>((p - (k == labels[static_cast<std::size_t>(n)] ? 1.0 : 0.0)) / N);
      }
    }
  }
  return total / N;
}

template class Conv2d<float>;
template class Conv2d<double>;
template class BatchNorm2d<float>;
template class BatchNorm2d<double>;
template class Relu<float>;
template class Relu<double>;
template class AdaptiveMaxPool2d<float>;
template class AdaptiveMaxPool2d<double>;
template class Dropout<float>;
template class Dropout<double>;
template class Linear<float>;
template class Linear<double>;
template class GruLayer<float>;
template class GruLayer<double>;
template double cross_entropy<float>(const Tensor<float>&, const std::vector<int>&, Tensor<float>*);
template double cross_entropy<double>(const Tensor<double>&, const std::vector<int>&, Tensor<double>*);

}  // namespace futurefoul::nn
