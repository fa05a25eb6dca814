#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sarv/errors.hpp"

namespace sarv::nn {

enum class Mode { train, eval };

enum class Precision { single, double_ };

using Rng = std::mt19937_64;

/// Uniform in [0, 1) from the top 53 bits; identical across standard libraries.
/// Accumulator type: double, or the wider type when T is wider.
template <typename T>
using Accum = std::conditional_t<(sizeof(T) > sizeof(double)), T, double>;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

using Shape = std::vector<std::size_t>;

inline std::string shape_to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

/// Dense row-major array of T with a shape.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{}) : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}
  Tensor(Shape shape, std::vector<T> values) : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != shape_size(shape_)) {
      throw DimensionError("tensor " + shape_to_string(shape_) + " given " + std::to_string(values_.size()) +
                           " values");
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }
  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T& operator()(std::size_t i, std::size_t j) { return values_[i * shape_[1] + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return values_[i * shape_[1] + j]; }
  T& operator()(std::size_t i, std::size_t j, std::size_t k) { return values_[(i * shape_[1] + j) * shape_[2] + k]; }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[(i * shape_[1] + j) * shape_[2] + k];
  }

  void fill(T v) { std::fill(values_.begin(), values_.end(), v); }
  void zero() { fill(T{}); }

  /// Same values, new shape of equal size.
  Tensor reshaped(Shape shape) const& { return Tensor(std::move(shape), values_); }
  Tensor reshaped(Shape shape) && { return Tensor(std::move(shape), std::move(values_)); }

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<T> values_;
};

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& t) {
  std::vector<To> v(t.values().begin(), t.values().end());
  return Tensor<To>(t.shape(), std::move(v));
}

template <typename T>
void check_finite(const Tensor<T>& t, std::string_view op) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) {
      throw NumericError(std::string(op) + ": non-finite value at index " + std::to_string(i));
    }
  }
}

inline void require_shape(const Shape& got, const Shape& want, std::string_view what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected " + shape_to_string(want) + ", got " + shape_to_string(got));
  }
}

/// A trainable tensor with its gradient buffer.
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  Parameter(std::string n, Shape shape) : name(std::move(n)), value(shape), grad(std::move(shape)) {}

  void zero_grad() { grad.zero(); }
  std::size_t size() const noexcept { return value.size(); }
};

template <typename T>
using ParameterList = std::vector<Parameter<T>*>;

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
template <typename T>
void init_glorot(Parameter<T>& p, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : p.value.values()) v = static_cast<T>((2.0 * uniform01(rng) - 1.0) * limit);
}

}  // namespace sarv::nn
