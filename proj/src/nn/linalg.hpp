#pragma once

// Row-major GEMM helpers over raw buffers, backed by Eigen.

#include <Eigen/Core>

#include <cstddef>

namespace sarv::nn::linalg {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Map = Eigen::Map<RowMat<T>>;
template <typename T>
using CMap = Eigen::Map<const RowMat<T>>;

using Index = Eigen::Index;

inline Index ix(std::size_t n) { return static_cast<Index>(n); }

/// c[m x n] (+)= a[m x k] * b[k x n]
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
  Map<T> C(c, ix(m), ix(n));
  if (accumulate) {
    C.noalias() += CMap<T>(a, ix(m), ix(k)) * CMap<T>(b, ix(k), ix(n));
  } else {
    C.noalias() = CMap<T>(a, ix(m), ix(k)) * CMap<T>(b, ix(k), ix(n));
  }
}

/// c[k x n] += a[m x k]^T * b[m x n]
template <typename T>
void gemm_tn_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  Map<T>(c, ix(k), ix(n)).noalias() += CMap<T>(a, ix(m), ix(k)).transpose() * CMap<T>(b, ix(m), ix(n));
}

/// c[m x k] (+)= a[m x n] * b[k x n]^T
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t n, std::size_t k, bool accumulate) {
  Map<T> C(c, ix(m), ix(k));
  if (accumulate) {
    C.noalias() += CMap<T>(a, ix(m), ix(n)) * CMap<T>(b, ix(k), ix(n)).transpose();
  } else {
    C.noalias() = CMap<T>(a, ix(m), ix(n)) * CMap<T>(b, ix(k), ix(n)).transpose();
  }
}

}  // namespace sarv::nn::linalg
