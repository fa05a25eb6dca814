#pragma once

// Differentiable building blocks. Each layer caches what its backward pass
// needs from the most recent forward call; backward accumulates into
// Parameter::grad and returns the gradient with respect to the layer input.

#include <cstddef>
#include <string>
#include <vector>

#include "sarv/nn/tensor.hpp"

namespace sarv::nn {

/// out = x W + b, x: [B x I], W: [I x O], b: [O].
template <typename T>
class Dense {
 public:
  Dense() = default;
  Dense(std::string name, std::size_t in, std::size_t out);

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& dout);

  void init_glorot(Rng& rng);
  Parameter<T>& weight() noexcept { return w_; }
  Parameter<T>& bias() noexcept { return b_; }
  std::size_t in_features() const { return w_.value.dim(0); }
  std::size_t out_features() const { return w_.value.dim(1); }
  void collect(ParameterList<T>& out) {
    out.push_back(&w_);
    out.push_back(&b_);
  }

 private:
  Parameter<T> w_;
  Parameter<T> b_;
  Tensor<T> x_;
};

/// Stateless form of Dense::forward for explicit parameters.
template <typename T>
Tensor<T> dense(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

enum class ActivationKind { sigmoid, relu };

template <typename T>
class Activation {
 public:
  explicit Activation(ActivationKind kind = ActivationKind::sigmoid) : kind_(kind) {}

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& dout) const;
  ActivationKind kind() const noexcept { return kind_; }

 private:
  ActivationKind kind_;
  Tensor<T> cache_;  // sigmoid output, or relu input
};

template <typename T>
T sigmoid(T x);

/// Inverted dropout: survivors scaled by 1/(1-rate) in train mode; identity in eval mode.
template <typename T>
class Dropout {
 public:
  explicit Dropout(double rate = 0.0);

  Tensor<T> forward(const Tensor<T>& x, Mode mode, Rng& rng);
  Tensor<T> backward(const Tensor<T>& dout) const;
  double rate() const noexcept { return rate_; }
  void set_rate(double rate);
  /// Per-element scale from the last train-mode forward (0 or 1/(1-rate)).
  const std::vector<T>& mask() const noexcept { return mask_; }

 private:
  double rate_;
  bool active_ = false;
  std::vector<T> mask_;
};

/// Row-wise max-shifted softmax over [B x C].
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits);

inline constexpr double kLogEpsilon = 1e-12;

/// -(1/B) sum_b sum_c target * log(prob + eps). Targets must be one-hot rows.
template <typename T>
Accum<T> cross_entropy(const Tensor<T>& probs, const Tensor<T>& targets);

/// Gradient of cross_entropy(softmax(logits)) with respect to the logits: (probs - targets) / B.
template <typename T>
Tensor<T> softmax_cross_entropy_backward(const Tensor<T>& probs, const Tensor<T>& targets);

/// Throws ValidationError unless every row is one-hot.
template <typename T>
void validate_one_hot(const Tensor<T>& targets);

template <typename T>
Tensor<T> one_hot(const std::vector<int>& labels, std::size_t num_classes);

/// Learned vectors for ids 1..vocab; id 0 maps to zeros and has no parameters.
template <typename T>
class Embedding {
 public:
  Embedding() = default;
  Embedding(std::string name, std::size_t vocab, std::size_t width);

  /// ids -> [ids.size() x width]
  Tensor<T> forward(const std::vector<std::int32_t>& ids);
  void backward(const Tensor<T>& dout);

  void init_glorot(Rng& rng);
  std::size_t width() const { return table_.value.dim(1); }
  void collect(ParameterList<T>& out) { out.push_back(&table_); }

 private:
  Parameter<T> table_;
  std::vector<std::int32_t> ids_;
};

}  // namespace sarv::nn
