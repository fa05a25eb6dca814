#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "sarv/errors.hpp"
#include "sarv/train/sampling.hpp"

using namespace sarv;
using namespace sarv::train;

namespace {

std::vector<int> iota_vec(std::size_t n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_CASE("split sizes floor the training fraction") {
  const auto [tr, te] = split_train_test(iota_vec(100003), 0.8, 1);
  CHECK(tr.size() == 80002);
  CHECK(te.size() == 20001);
  const auto [a, b] = split_train_test(iota_vec(10), 0.8, 1);
  CHECK(a.size() == 8);
  CHECK(b.size() == 2);
}

TEST_CASE("split is a seeded partition") {
  const auto [tr, te] = split_train_test(iota_vec(1000), 0.7, 42);
  std::set<int> all(tr.begin(), tr.end());
  all.insert(te.begin(), te.end());
  CHECK(all.size() == 1000);
  const auto again = split_train_test(iota_vec(1000), 0.7, 42);
  CHECK(again.first == tr);
  CHECK(split_train_test(iota_vec(1000), 0.7, 43).first != tr);
}

TEST_CASE("split rejects bad input") {
  CHECK_THROWS_AS(split_train_test(iota_vec(10), 1.0, 1), ValidationError);
  CHECK_THROWS_AS(split_train_test(iota_vec(10), 0.0, 1), ValidationError);
  CHECK_THROWS_AS(split_train_test(std::vector<int>{}, 0.5, 1), ValidationError);
}

TEST_CASE("shuffle is a permutation") {
  auto v = iota_vec(500);
  nn::Rng rng(3);
  seeded_shuffle(v.begin(), v.end(), rng);
  CHECK(v != iota_vec(500));
  std::sort(v.begin(), v.end());
  CHECK(v == iota_vec(500));
}

TEST_CASE("under-sampling balances to the minority class") {
  std::vector<int> labels;
  labels.insert(labels.end(), 546, 0);
  labels.insert(labels.end(), 107, 1);
  labels.insert(labels.end(), 92, 2);
  const auto keep = undersample_indices(labels, 3, 5);
  CHECK(keep.size() == 276);
  std::vector<int> counts(3);
  for (auto i : keep) ++counts[static_cast<std::size_t>(labels[i])];
  CHECK(counts == std::vector<int>{92, 92, 92});
  CHECK(std::set<std::size_t>(keep.begin(), keep.end()).size() == keep.size());
  CHECK(undersample_indices(labels, 3, 5) == keep);
}

TEST_CASE("under-sampling edge cases") {
  const std::vector<int> balanced{0, 1, 0, 1};
  CHECK(undersample_indices(balanced, 2, 1).size() == 4);
  CHECK_THROWS_AS(undersample_indices({0, 0, 0}, 2, 1), ValidationError);
  struct R {
    int y;
  };
  const std::vector<R> ds{{0}, {0}, {0}, {1}};
  const auto out = random_undersample(ds, 2, 9, [](const R& r) { return r.y; });
  CHECK(out.size() == 2);
}
