#pragma once

// Central finite-difference verification of analytic gradients.

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sarv/nn/tensor.hpp"

namespace sarv::nn {

/// One tensor to perturb, paired with the analytic gradient of the loss with respect to it.
struct GradTarget {
  std::string name;
  Tensor<double>* value = nullptr;
  const Tensor<double>* analytic = nullptr;
};

inline GradTarget target_of(Parameter<double>& p) { return {p.name, &p.value, &p.grad}; }

struct GradCheckOptions {
  double h = 1e-6;
  /// Coordinates checked per target; 0 checks all of them, otherwise a seeded sample.
  std::size_t max_coords_per_target = 0;
  std::uint64_t sample_seed = 0;
  double tolerance = 1e-5;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_target;
  std::size_t worst_index = 0;
  std::size_t coords_checked = 0;
  bool non_finite = false;  // the loss produced NaN/Inf at worst_target[worst_index]
  bool passed = true;
};

/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8)
double relative_error(double analytic, double numeric);

/// Perturbs each selected coordinate by +-h, re-evaluates `loss`, and compares
/// (f(x+h) - f(x-h)) / 2h with the analytic gradient. `loss` must be a pure function
/// of the targets' current values (reseed any dropout RNG inside it). The difference quotient
/// is formed in long double, so a loss evaluated in extended precision keeps its extra digits.
GradCheckResult grad_check(const std::function<long double()>& loss, const std::vector<GradTarget>& targets,
                           const GradCheckOptions& opts = {});

}  // namespace sarv::nn
