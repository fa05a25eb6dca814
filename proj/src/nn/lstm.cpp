#include "sarv/nn/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "sarv/nn/layers.hpp"
#include "linalg.hpp"

namespace sarv::nn {
namespace {

constexpr std::array<const char*, 4> kGateNames = {"i", "f", "g", "o"};

}  // namespace

template <typename T>
Lstm<T>::Lstm(std::string name, std::size_t input_size, std::size_t hidden_size)
    : input_size_(input_size), hidden_size_(hidden_size) {
  if (input_size == 0 || hidden_size == 0) throw ValidationError("lstm sizes must be >= 1");
  for (std::size_t g = 0; g < 4; ++g) {
    w_[g] = Parameter<T>(name + ".W_" + kGateNames[g], {input_size + hidden_size, hidden_size});
    b_[g] = Parameter<T>(name + ".b_" + kGateNames[g], {hidden_size});
  }
}

template <typename T>
void Lstm<T>::init(Rng& rng) {
  for (std::size_t g = 0; g < 4; ++g) {
    init_glorot(w_[g], input_size_ + hidden_size_, hidden_size_, rng);
    b_[g].value.fill(g == kForget ? T{1} : T{0});
  }
}

template <typename T>
void Lstm<T>::collect(ParameterList<T>& out) {
  for (std::size_t g = 0; g < 4; ++g) {
    out.push_back(&w_[g]);
    out.push_back(&b_[g]);
  }
}

template <typename T>
Tensor<T> Lstm<T>::forward(const Tensor<T>& seq, const std::vector<std::size_t>& lengths) {
  if (seq.rank() != 3 || seq.dim(2) != input_size_) {
    throw DimensionError("lstm: input " + shape_to_string(seq.shape()) + " does not match input size " +
                         std::to_string(input_size_));
  }
  batch_ = seq.dim(0);
  time_ = seq.dim(1);
  if (lengths.size() != batch_) throw DimensionError("lstm: lengths size differs from batch size");
  for (std::size_t b = 0; b < batch_; ++b) {
    if (lengths[b] < 1 || lengths[b] > time_) {
      throw ValidationError("lstm: length " + std::to_string(lengths[b]) + " at row " + std::to_string(b) +
                            " outside [1, " + std::to_string(time_) + "]");
    }
  }
  lengths_ = lengths;
  const std::size_t steps = batch_ ? *std::max_element(lengths.begin(), lengths.end()) : 0;
  const std::size_t in = input_size_;
  const std::size_t hid = hidden_size_;
  const std::size_t zw = in + hid;

  steps_.assign(steps, {});
  Tensor<T> out({batch_, hid});
  Tensor<T> h_prev({batch_, hid});
  Tensor<T> c_prev({batch_, hid});
  for (std::size_t t = 0; t < steps; ++t) {
    Step& s = steps_[t];
    s.z = Tensor<T>({batch_, zw});
    for (std::size_t b = 0; b < batch_; ++b) {
      const T* x = seq.data() + (b * time_ + t) * in;
      std::copy(x, x + in, s.z.data() + b * zw);
      std::copy(h_prev.data() + b * hid, h_prev.data() + (b + 1) * hid, s.z.data() + b * zw + in);
    }
    for (std::size_t g = 0; g < 4; ++g) {
      Tensor<T>& a = s.a[g];
      a = Tensor<T>({batch_, hid});
      for (std::size_t b = 0; b < batch_; ++b) std::copy(b_[g].value.data(), b_[g].value.data() + hid, a.data() + b * hid);
      linalg::gemm_nn(s.z.data(), w_[g].value.data(), a.data(), batch_, zw, hid, true);
      if (g == kCell) {
        for (auto& v : a.values()) v = std::tanh(v);
      } else {
        for (auto& v : a.values()) v = sigmoid(v);
      }
    }
    s.c = Tensor<T>({batch_, hid});
    s.tanh_c = Tensor<T>({batch_, hid});
    Tensor<T> h({batch_, hid});
    for (std::size_t k = 0; k < batch_ * hid; ++k) {
      s.c[k] = s.a[kForget][k] * c_prev[k] + s.a[kInput][k] * s.a[kCell][k];
      s.tanh_c[k] = std::tanh(s.c[k]);
      h[k] = s.a[kOutput][k] * s.tanh_c[k];
    }
    for (std::size_t b = 0; b < batch_; ++b) {
      if (lengths[b] == t + 1) std::copy(h.data() + b * hid, h.data() + (b + 1) * hid, out.data() + b * hid);
    }
    c_prev = s.c;
    h_prev = std::move(h);
  }
  check_finite(out, "lstm");
  return out;
}

template <typename T>
Tensor<T> Lstm<T>::backward(const Tensor<T>& dout) {
  const std::size_t in = input_size_;
  const std::size_t hid = hidden_size_;
  const std::size_t zw = in + hid;
  require_shape(dout.shape(), {batch_, hid}, "lstm backward");

  Tensor<T> dseq({batch_, time_, in});
  Tensor<T> dh_next({batch_, hid});
  Tensor<T> dc_next({batch_, hid});
  Tensor<T> dh({batch_, hid});
  Tensor<T> dc({batch_, hid});
  std::array<Tensor<T>, 4> da;
  for (auto& d : da) d = Tensor<T>({batch_, hid});
  Tensor<T> dz({batch_, zw});

  for (std::size_t t = steps_.size(); t-- > 0;) {
    const Step& s = steps_[t];
    const Tensor<T>* c_prev = t > 0 ? &steps_[t - 1].c : nullptr;
    dh = dh_next;
    for (std::size_t b = 0; b < batch_; ++b) {
      if (lengths_[b] == t + 1) {
        for (std::size_t j = 0; j < hid; ++j) dh(b, j) += dout(b, j);
      }
    }
    for (std::size_t k = 0; k < batch_ * hid; ++k) {
      const T i = s.a[kInput][k];
      const T f = s.a[kForget][k];
      const T g = s.a[kCell][k];
      const T o = s.a[kOutput][k];
      const T tc = s.tanh_c[k];
      dc[k] = dc_next[k] + dh[k] * o * (T{1} - tc * tc);
      da[kOutput][k] = dh[k] * tc * o * (T{1} - o);
      da[kInput][k] = dc[k] * g * i * (T{1} - i);
      da[kCell][k] = dc[k] * i * (T{1} - g * g);
      da[kForget][k] = c_prev ? dc[k] * (*c_prev)[k] * f * (T{1} - f) : T{0};
      dc_next[k] = dc[k] * f;
    }
    for (std::size_t g = 0; g < 4; ++g) {
      linalg::gemm_tn_acc(s.z.data(), da[g].data(), w_[g].grad.data(), batch_, zw, hid);
      for (std::size_t b = 0; b < batch_; ++b) {
        for (std::size_t j = 0; j < hid; ++j) b_[g].grad[j] += da[g](b, j);
      }
      linalg::gemm_nt(da[g].data(), w_[g].value.data(), dz.data(), batch_, hid, zw, g != 0);
    }
    for (std::size_t b = 0; b < batch_; ++b) {
      const T* src = dz.data() + b * zw;
      std::copy(src, src + in, dseq.data() + (b * time_ + t) * in);
      std::copy(src + in, src + zw, dh_next.data() + b * hid);
    }
  }
  return dseq;
}

template class Lstm<float>;
template class Lstm<double>;
template class Lstm<long double>;

}  // namespace sarv::nn
