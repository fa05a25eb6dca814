#include "sarv/train/optim.hpp"

#include <cmath>

namespace sarv::train {
namespace {

template <typename T>
void require_finite_grads(const nn::ParameterList<T>& params) {
  for (const auto* p : params) {
    for (std::size_t i = 0; i < p->grad.size(); ++i) {
      if (!std::isfinite(p->grad[i])) {
        throw NumericError("non-finite gradient in " + p->name + " at index " + std::to_string(i));
      }
    }
  }
}

}  // namespace

template <typename T>
void sgd_step(const nn::ParameterList<T>& params, double lr) {
  require_finite_grads(params);
  for (auto* p : params) {
    for (std::size_t i = 0; i < p->size(); ++i) {
      p->value[i] = static_cast<T>(static_cast<double>(p->value[i]) - lr * static_cast<double>(p->grad[i]));
    }
  }
}

template <typename T>
void adam_step(const nn::ParameterList<T>& params, double lr, AdamState& state, const AdamHyper& hyper) {
  require_finite_grads(params);
  if (state.m.empty()) {
    for (const auto* p : params) {
      state.m.emplace_back(p->size(), 0.0);
      state.v.emplace_back(p->size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) throw DimensionError("adam state does not match the parameter list");
  ++state.t;
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto* p = params[k];
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double g = static_cast<double>(p->grad[i]);
      m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g;
      v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p->value[i] = static_cast<T>(static_cast<double>(p->value[i]) - lr * m_hat / (std::sqrt(v_hat) + hyper.epsilon));
    }
  }
}

template void sgd_step(const nn::ParameterList<float>&, double);
template void sgd_step(const nn::ParameterList<double>&, double);
template void adam_step(const nn::ParameterList<float>&, double, AdamState&, const AdamHyper&);
template void adam_step(const nn::ParameterList<double>&, double, AdamState&, const AdamHyper&);

}  // namespace sarv::train
