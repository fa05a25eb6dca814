#pragma once

// Seeded shuffling, train/test splitting and random under-sampling.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "sarv/errors.hpp"
#include "sarv/nn/tensor.hpp"

namespace sarv::train {

/// Fisher-Yates driven only by raw 64-bit draws, so results do not depend on
/// the standard library's distribution implementations.
template <typename It>
void seeded_shuffle(It first, It last, nn::Rng& rng) {
  const auto n = static_cast<std::size_t>(last - first);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1), first + static_cast<std::ptrdiff_t>(j));
  }
}

/// Train size is floor(fraction * N) after a seeded shuffle.
template <typename R>
std::pair<std::vector<R>, std::vector<R>> split_train_test(std::vector<R> corpus, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("split fraction must be in (0, 1)");
  if (corpus.empty()) throw ValidationError("cannot split an empty corpus");
  nn::Rng rng(seed);
  seeded_shuffle(corpus.begin(), corpus.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(corpus.size())));
  std::vector<R> test(std::make_move_iterator(corpus.begin() + static_cast<std::ptrdiff_t>(n_train)),
                      std::make_move_iterator(corpus.end()));
  corpus.resize(n_train);
  return {std::move(corpus), std::move(test)};
}

/// Indices kept by random under-sampling: every class in [0, num_classes) is cut
/// to the minority count without replacement, and the result is reshuffled.
/// Throws ValidationError if a class has no records.
std::vector<std::size_t> undersample_indices(const std::vector<int>& labels, std::size_t num_classes,
                                             std::uint64_t seed);

template <typename R, typename LabelFn>
std::vector<R> random_undersample(const std::vector<R>& dataset, std::size_t num_classes, std::uint64_t seed,
                                  LabelFn label_of) {
  std::vector<int> labels;
  labels.reserve(dataset.size());
  for (const auto& r : dataset) labels.push_back(label_of(r));
  std::vector<R> out;
  for (std::size_t i : undersample_indices(labels, num_classes, seed)) out.push_back(dataset[i]);
  return out;
}

}  // namespace sarv::train
