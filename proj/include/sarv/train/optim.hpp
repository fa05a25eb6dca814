#pragma once

#include <cstddef>
#include <vector>

#include "sarv/nn/tensor.hpp"

namespace sarv::train {

/// p <- p - lr * g. Throws NumericError naming the parameter if a gradient is not finite.
template <typename T>
void sgd_step(const nn::ParameterList<T>& params, double lr);

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates, one buffer per parameter, and the step count.
struct AdamState {
  std::size_t t = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/// Adam with bias correction: p <- p - lr * m_hat / (sqrt(v_hat) + eps).
template <typename T>
void adam_step(const nn::ParameterList<T>& params, double lr, AdamState& state, const AdamHyper& hyper = {});

}  // namespace sarv::train
