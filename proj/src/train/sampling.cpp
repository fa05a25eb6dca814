#include "sarv/train/sampling.hpp"

#include <algorithm>

namespace sarv::train {

std::vector<std::size_t> undersample_indices(const std::vector<int>& labels, std::size_t num_classes,
                                             std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
      throw ValidationError("label " + std::to_string(labels[i]) + " outside [0, " + std::to_string(num_classes) + ")");
    }
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  std::size_t minority = labels.size();
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (by_class[c].empty()) throw ValidationError("random under-sampling: class " + std::to_string(c) + " has no records");
    minority = std::min(minority, by_class[c].size());
  }
  nn::Rng rng(seed);
  std::vector<std::size_t> kept;
  kept.reserve(minority * num_classes);
  for (auto& idx : by_class) {
    seeded_shuffle(idx.begin(), idx.end(), rng);
    kept.insert(kept.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(minority));
  }
  seeded_shuffle(kept.begin(), kept.end(), rng);
  return kept;
}

}  // namespace sarv::train
