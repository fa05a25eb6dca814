#include "sarv/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sarv::nn {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult grad_check(const std::function<long double()>& loss, const std::vector<GradTarget>& targets,
                           const GradCheckOptions& opts) {
  GradCheckResult res;
  Rng rng(opts.sample_seed);
  for (const auto& t : targets) {
    require_shape(t.analytic->shape(), t.value->shape(), "grad_check " + t.name);
    std::vector<std::size_t> coords(t.value->size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (opts.max_coords_per_target != 0 && coords.size() > opts.max_coords_per_target) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(opts.max_coords_per_target);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t idx : coords) {
      double& x = (*t.value)[idx];
      const double saved = x;
      long double plus = 0.0L;
      long double minus = 0.0L;
      try {
        x = saved + opts.h;
        plus = loss();
        x = saved - opts.h;
        minus = loss();
      } catch (const NumericError&) {
        plus = std::numeric_limits<double>::quiet_NaN();
      }
      x = saved;
      ++res.coords_checked;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        res.non_finite = true;
        res.passed = false;
        res.worst_target = t.name;
        res.worst_index = idx;
        res.max_rel_error = std::numeric_limits<double>::infinity();
        return res;
      }
      const auto numeric = static_cast<double>((plus - minus) / (2.0L * static_cast<long double>(opts.h)));
      const double err = relative_error((*t.analytic)[idx], numeric);
      if (err > res.max_rel_error) {
        res.max_rel_error = err;
        res.worst_target = t.name;
        res.worst_index = idx;
      }
    }
  }
  res.passed = res.max_rel_error <= opts.tolerance;
  return res;
}

}  // namespace sarv::nn
