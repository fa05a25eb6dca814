#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "sarv/nn/tensor.hpp"

namespace sarv::nn {

/// Single-layer LSTM with last-real-step readout.
///
/// Gate weights are stored per gate as [input_size + hidden_size, hidden_size]
/// acting on the concatenation [x_t, h_{t-1}]:
///   i = sigmoid(z W_i + b_i)   f = sigmoid(z W_f + b_f)
///   g = tanh(z W_g + b_g)      o = sigmoid(z W_o + b_o)
///   c_t = f * c_{t-1} + i * g, h_t = o * tanh(c_t)
/// Row b of the output is h at step lengths[b] - 1.
template <typename T>
class Lstm {
 public:
  enum Gate : std::size_t { kInput = 0, kForget = 1, kCell = 2, kOutput = 3 };

  Lstm() = default;
  Lstm(std::string name, std::size_t input_size, std::size_t hidden_size);

  /// seq: [B x T x I]; every length in [1, T]. Steps past the longest row are skipped.
  Tensor<T> forward(const Tensor<T>& seq, const std::vector<std::size_t>& lengths);
  /// dout: [B x H]; returns d seq [B x T x I].
  Tensor<T> backward(const Tensor<T>& dout);

  /// Glorot weights, forget-gate bias 1, other biases 0.
  void init(Rng& rng);

  std::size_t input_size() const noexcept { return input_size_; }
  std::size_t hidden_size() const noexcept { return hidden_size_; }
  Parameter<T>& weight(Gate g) { return w_[g]; }
  Parameter<T>& bias(Gate g) { return b_[g]; }
  void collect(ParameterList<T>& out);

 private:
  struct Step {
    Tensor<T> z;                 // [B x (I+H)]
    std::array<Tensor<T>, 4> a;  // post-nonlinearity gate values, [B x H]
    Tensor<T> c;                 // [B x H]
    Tensor<T> tanh_c;            // [B x H]
  };

  std::size_t input_size_ = 0;
  std::size_t hidden_size_ = 0;
  std::array<Parameter<T>, 4> w_;
  std::array<Parameter<T>, 4> b_;

  std::size_t batch_ = 0;
  std::size_t time_ = 0;
  std::vector<std::size_t> lengths_;
  std::vector<Step> steps_;
};

}  // namespace sarv::nn
