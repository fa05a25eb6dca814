#include "sarv/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "linalg.hpp"

namespace sarv::nn {

template <typename T>
Dense<T>::Dense(std::string name, std::size_t in, std::size_t out)
    : w_(name + ".W", {in, out}), b_(name + ".b", {out}) {}

template <typename T>
void Dense<T>::init_glorot(Rng& rng) {
  nn::init_glorot(w_, in_features(), out_features(), rng);
  b_.value.zero();
}

template <typename T>
Tensor<T> dense(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  if (x.rank() != 2 || w.rank() != 2 || b.rank() != 1 || x.dim(1) != w.dim(0) || b.dim(0) != w.dim(1)) {
    throw DimensionError("dense: x " + shape_to_string(x.shape()) + " incompatible with W " +
                         shape_to_string(w.shape()) + " and b " + shape_to_string(b.shape()));
  }
  const std::size_t rows = x.dim(0);
  const std::size_t in = w.dim(0);
  const std::size_t out = w.dim(1);
  Tensor<T> y({rows, out});
  for (std::size_t r = 0; r < rows; ++r) std::copy(b.data(), b.data() + out, y.data() + r * out);
  linalg::gemm_nn(x.data(), w.data(), y.data(), rows, in, out, true);
  check_finite(y, "dense");
  return y;
}

template <typename T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x) {
  auto y = dense(x, w_.value, b_.value);
  x_ = x;
  return y;
}

template <typename T>
Tensor<T> Dense<T>::backward(const Tensor<T>& dout) {
  const std::size_t rows = x_.dim(0);
  const std::size_t in = in_features();
  const std::size_t out = out_features();
  require_shape(dout.shape(), {rows, out}, "dense backward");
  linalg::gemm_tn_acc(x_.data(), dout.data(), w_.grad.data(), rows, in, out);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < out; ++j) b_.grad[j] += dout(r, j);
  }
  Tensor<T> dx({rows, in});
  linalg::gemm_nt(dout.data(), w_.value.data(), dx.data(), rows, out, in, false);
  return dx;
}

template <typename T>
T sigmoid(T x) {
  // Split by sign so exp never overflows.
  if (x >= T{0}) return T{1} / (T{1} + std::exp(-x));
  const T e = std::exp(x);
  return e / (T{1} + e);
}

template <typename T>
Tensor<T> Activation<T>::forward(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  if (kind_ == ActivationKind::sigmoid) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
    cache_ = y;
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T{0} ? x[i] : T{0};
    cache_ = x;
  }
  check_finite(y, kind_ == ActivationKind::sigmoid ? "sigmoid" : "relu");
  return y;
}

template <typename T>
Tensor<T> Activation<T>::backward(const Tensor<T>& dout) const {
  require_shape(dout.shape(), cache_.shape(), "activation backward");
  Tensor<T> dx(dout.shape());
  if (kind_ == ActivationKind::sigmoid) {
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = dout[i] * cache_[i] * (T{1} - cache_[i]);
  } else {
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = cache_[i] > T{0} ? dout[i] : T{0};
  }
  return dx;
}

template <typename T>
Dropout<T>::Dropout(double rate) : rate_(0.0) {
  set_rate(rate);
}

template <typename T>
void Dropout<T>::set_rate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ValidationError("dropout rate must be in [0, 1)");
  rate_ = rate;
}

template <typename T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& x, Mode mode, Rng& rng) {
  active_ = mode == Mode::train && rate_ > 0.0;
  if (!active_) return x;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate_));
  mask_.resize(x.size());
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask_[i] = uniform01(rng) < rate_ ? T{0} : keep_scale;
    y[i] = x[i] * mask_[i];
  }
  return y;
}

template <typename T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& dout) const {
  if (!active_) return dout;
  Tensor<T> dx(dout.shape());
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = dout[i] * mask_[i];
  return dx;
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  if (logits.rank() != 2) throw DimensionError("softmax expects [B x C], got " + shape_to_string(logits.shape()));
  const std::size_t rows = logits.dim(0);
  const std::size_t cols = logits.dim(1);
  Tensor<T> p(logits.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = logits.data() + r * cols;
    T* out = p.data() + r * cols;
    const T mx = *std::max_element(in, in + cols);
    T sum{0};
    for (std::size_t c = 0; c < cols; ++c) {
      out[c] = std::exp(in[c] - mx);
      sum += out[c];
    }
    for (std::size_t c = 0; c < cols; ++c) out[c] /= sum;
  }
  check_finite(p, "softmax");
  return p;
}

template <typename T>
void validate_one_hot(const Tensor<T>& targets) {
  if (targets.rank() != 2) throw DimensionError("targets must be [B x C]");
  const std::size_t cols = targets.dim(1);
  for (std::size_t r = 0; r < targets.dim(0); ++r) {
    std::size_t ones = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      const T v = targets(r, c);
      if (v == T{1}) {
        ++ones;
      } else if (v != T{0}) {
        ones = 2;
        break;
      }
    }
    if (ones != 1) throw ValidationError("target row " + std::to_string(r) + " is not one-hot");
  }
}

template <typename T>
Accum<T> cross_entropy(const Tensor<T>& probs, const Tensor<T>& targets) {
  using A = Accum<T>;
  require_shape(targets.shape(), probs.shape(), "cross_entropy targets");
  validate_one_hot(targets);
  const std::size_t rows = probs.dim(0);
  A loss = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (targets[i] != T{0}) loss -= static_cast<A>(targets[i]) * std::log(static_cast<A>(probs[i]) + A(kLogEpsilon));
  }
  loss /= static_cast<A>(rows);
  if (!std::isfinite(loss)) throw NumericError("cross_entropy: non-finite loss");
  return loss;
}

template <typename T>
Tensor<T> softmax_cross_entropy_backward(const Tensor<T>& probs, const Tensor<T>& targets) {
  require_shape(targets.shape(), probs.shape(), "softmax_cross_entropy_backward targets");
  const T inv_rows = T{1} / static_cast<T>(probs.dim(0));
  Tensor<T> d(probs.shape());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (probs[i] - targets[i]) * inv_rows;
  return d;
}

template <typename T>
Tensor<T> one_hot(const std::vector<int>& labels, std::size_t num_classes) {
  Tensor<T> t({labels.size(), num_classes});
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= num_classes) {
      throw ValidationError("label " + std::to_string(labels[r]) + " outside [0, " + std::to_string(num_classes) + ")");
    }
    t(r, static_cast<std::size_t>(labels[r])) = T{1};
  }
  return t;
}

template <typename T>
Embedding<T>::Embedding(std::string name, std::size_t vocab, std::size_t width) : table_(std::move(name), {vocab, width}) {}

template <typename T>
void Embedding<T>::init_glorot(Rng& rng) {
  nn::init_glorot(table_, table_.value.dim(0) + 1, width(), rng);
}

template <typename T>
Tensor<T> Embedding<T>::forward(const std::vector<std::int32_t>& ids) {
  const std::size_t w = width();
  const std::size_t vocab = table_.value.dim(0);
  Tensor<T> out({ids.size(), w});
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto id = ids[r];
    if (id < 0 || static_cast<std::size_t>(id) > vocab) {
      throw ValidationError("embedding id " + std::to_string(id) + " outside [0, " + std::to_string(vocab) + "]");
    }
    if (id == 0) continue;
    const T* src = table_.value.data() + static_cast<std::size_t>(id - 1) * w;
    std::copy(src, src + w, out.data() + r * w);
  }
  ids_ = ids;
  return out;
}

template <typename T>
void Embedding<T>::backward(const Tensor<T>& dout) {
  const std::size_t w = width();
  require_shape(dout.shape(), {ids_.size(), w}, "embedding backward");
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (ids_[r] == 0) continue;
    T* dst = table_.grad.data() + static_cast<std::size_t>(ids_[r] - 1) * w;
    for (std::size_t j = 0; j < w; ++j) dst[j] += dout(r, j);
  }
}

#define SARV_INSTANTIATE_LAYERS(T)                                                            \
  template class Dense<T>;                                                                    \
  template Tensor<T> dense(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);            \
  template class Activation<T>;                                                               \
  template T sigmoid(T);                                                                      \
  template class Dropout<T>;                                                                  \
  template Tensor<T> softmax(const Tensor<T>&);                                               \
  template void validate_one_hot(const Tensor<T>&);                                           \
  template Accum<T> cross_entropy(const Tensor<T>&, const Tensor<T>&);                        \
  template Tensor<T> softmax_cross_entropy_backward(const Tensor<T>&, const Tensor<T>&);      \
  template Tensor<T> one_hot(const std::vector<int>&, std::size_t);                           \
  template class Embedding<T>;

SARV_INSTANTIATE_LAYERS(float)
SARV_INSTANTIATE_LAYERS(double)
SARV_INSTANTIATE_LAYERS(long double)  // extended-precision oracle for gradient checks

}  // namespace sarv::nn
