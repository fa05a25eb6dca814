#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "sarv/embed.hpp"
#include "sarv/models.hpp"
#include "sarv/nn/lstm.hpp"
#include "sarv/nn/grad_check.hpp"
#include "sarv/nn/tensor.hpp"

namespace sarv::testing {

#ifndef SARV_TEST_DATA_DIR
#define SARV_TEST_DATA_DIR "tests/data"
#endif

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(SARV_TEST_DATA_DIR) / name; }

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "sarv") {
    static int counter = 0;
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path fixture_vectors() {
  return std::filesystem::path(SARV_TEST_DATA_DIR) / ".." / ".." / "data" / "fixture_vectors_fa.txt";
}

/// CSV review corpus over words present in the bundled fixture vectors; even rows positive.
inline std::string review_corpus(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> pos = {"عالی", "خوب", "عالیه", "راضیم", "بهترین"};
  static const std::vector<std::string> neg = {"بد", "خراب", "ضعیف", "نداره", "هیچ"};
  static const std::vector<std::string> filler = {"گوشی", "این", "قیمت", "محصول", "خرید", "ماشین", "باتری"};
  static const std::vector<std::string> cats = {"Mobile", "IT", "Player"};
  std::mt19937_64 rng(seed);
  std::string doc = "text,label,category\n";
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = i % 2 == 0;
    std::string s;
    const std::size_t len = 3 + rng() % 6;
    for (std::size_t k = 0; k < len; ++k) {
      if (!s.empty()) s += " ";
      s += rng() % 3 == 0 ? (positive ? pos : neg)[rng() % 5] : filler[rng() % filler.size()];
    }
    s += " " + (positive ? pos : neg)[rng() % 5] + ".";
    doc += "\"" + s + "\"," + (positive ? "positive" : "negative") + "," + cats[rng() % cats.size()] + "\n";
  }
  return doc;
}

template <typename T>
nn::Tensor<T> random_tensor(nn::Shape shape, nn::Rng& rng, double scale = 1.0) {
  nn::Tensor<T> t(std::move(shape));
  std::normal_distribution<double> dist(0.0, scale);
  for (auto& v : t.values()) v = static_cast<T>(dist(rng));
  return t;
}

/// Weighted sum of an output tensor; a generic scalar loss for checking single ops.
inline double weighted_sum(const nn::Tensor<double>& out, const nn::Tensor<double>& weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * weights[i];
  return s;
}

/// Vocabulary of `n` synthetic words "w0".."w{n-1}" with seeded Gaussian vectors.
inline embed::EmbeddingTable synthetic_table(std::size_t n, std::size_t dim, std::uint64_t seed) {
  embed::EmbeddingTable table(dim);
  nn::Rng rng(seed);
  std::normal_distribution<float> dist(0.0f, 1.0f);
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = dist(rng);
    table.set("w" + std::to_string(i), v);
  }
  return table;
}

/// Random encoded sentence over word ids [2, 2+vocab) and char ids [1, chars].
inline embed::EncodedSentence random_record(nn::Rng& rng, std::size_t vocab, std::size_t chars, std::size_t max_len,
                                            std::size_t max_word_chars, int label, std::size_t min_len = 1) {
  embed::EncodedSentence r;
  const std::size_t len = min_len + rng() % (max_len - min_len + 1);
  r.true_length = len;
  r.label = label;
  for (std::size_t i = 0; i < max_len; ++i) {
    if (i < len) {
      r.tokens.push_back(static_cast<embed::WordId>(2 + rng() % vocab));
      std::vector<embed::CharId> cs(1 + rng() % max_word_chars);
      for (auto& c : cs) c = chars ? static_cast<embed::CharId>(1 + rng() % chars) : 0;
      r.chars.push_back(chars ? cs : std::vector<embed::CharId>{});
    } else {
      r.tokens.push_back(embed::kPadId);
      r.chars.emplace_back();
    }
  }
  return r;
}

/// A small double-precision model spec for gradient checks.
inline models::ModelSpec micro_spec(models::Preset preset, int classes = 2) {
  auto s = models::ModelSpec::for_preset(preset, classes);
  s.embed_dim = 4;
  s.max_len = 5;
  s.max_word_chars = 4;
  s.hidden_sizes = {6, 5, 4, 3};
  s.word_lstm_size = 3;
  s.char_lstm_size = 3;
  s.char_embed_size = 3;
  s.char_vocab_size = models::uses_chars(preset) ? 6 : 0;
  return s;
}

/// Gradient check of a standalone LSTM under a random linear readout; the loss runs in a long double mirror.
inline nn::GradCheckResult check_lstm_gradients(std::uint64_t seed, std::size_t batch = 3, std::size_t steps = 4,
                                                std::size_t input = 3, std::size_t hidden = 4) {
  nn::Rng rng(seed);
  nn::Lstm<double> l("l", input, hidden);
  l.init(rng);
  auto seq = random_tensor<double>({batch, steps, input}, rng);
  std::vector<std::size_t> lengths(batch);
  for (auto& n : lengths) n = 1 + rng() % steps;
  lengths[0] = steps;
  const auto w = random_tensor<double>({batch, hidden}, rng);
  nn::ParameterList<double> ps;
  l.collect(ps);
  for (auto* p : ps) p->zero_grad();
  (void)l.forward(seq, lengths);
  const auto dseq = l.backward(w);

  nn::Lstm<long double> wide("l", input, hidden);
  nn::ParameterList<long double> wps;
  wide.collect(wps);
  const auto wide_w = nn::tensor_cast<long double>(w);
  auto loss = [&]() -> long double {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (std::size_t k = 0; k < ps[i]->value.size(); ++k) wps[i]->value[k] = ps[i]->value[k];
    }
    const auto out = wide.forward(nn::tensor_cast<long double>(seq), lengths);
    long double s = 0;
    for (std::size_t k = 0; k < out.size(); ++k) s += out[k] * wide_w[k];
    return s;
  };
  std::vector<nn::GradTarget> targets{{"seq", &seq, &dseq}};
  for (auto* p : ps) targets.push_back(nn::target_of(*p));
  return nn::grad_check(loss, targets);
}

/// Full-model gradient check on a B=2 batch: dropout masks are fixed by reseeding before every forward.
inline nn::GradCheckResult check_model_gradients(const models::ModelSpec& spec, std::uint64_t seed,
                                                 const nn::GradCheckOptions& opts = {}) {
  models::Model<double> model(spec, seed);
  {
    // move off the Glorot/zero-bias point so no ReLU input sits exactly on its kink
    nn::Rng prng(seed + 3);
    std::normal_distribution<double> dist(0.0, 0.1);
    for (auto* p : model.parameters()) {
      for (auto& v : p->value.values()) v += dist(prng);
    }
  }
  const auto table = synthetic_table(10, spec.embed_dim, seed + 1);
  nn::Rng rng(seed + 2);
  std::vector<embed::EncodedSentence> recs;
  for (int b = 0; b < 2; ++b) {
    recs.push_back(random_record(rng, 12, spec.char_vocab_size, spec.max_len, spec.max_word_chars,
                                 b % spec.num_classes));
  }
  const auto batch = models::make_batch<double>(recs, table, spec.max_len);
  const auto targets = nn::one_hot<double>(batch.labels, static_cast<std::size_t>(spec.num_classes));
  const std::uint64_t mask_seed = seed * 31 + 7;
  // the finite-difference side runs a long double mirror of the same parameters
  models::Model<long double> mirror(spec, seed);
  const auto wide_batch = models::make_batch<long double>(recs, table, spec.max_len);
  const auto wide_targets = nn::one_hot<long double>(wide_batch.labels, static_cast<std::size_t>(spec.num_classes));
  auto src = model.parameters();
  auto dst = mirror.parameters();
  auto loss = [&]() -> long double {
    for (std::size_t i = 0; i < src.size(); ++i) {
      for (std::size_t k = 0; k < src[i]->value.size(); ++k) dst[i]->value[k] = src[i]->value[k];
    }
    mirror.reseed_dropout(mask_seed);
    return nn::cross_entropy(mirror.forward(wide_batch, nn::Mode::train), wide_targets);
  };
  model.zero_grad();
  model.reseed_dropout(mask_seed);
  const auto probs = model.forward(batch, nn::Mode::train);
  model.backward(nn::softmax_cross_entropy_backward(probs, targets));
  std::vector<nn::GradTarget> t;
  for (auto* p : model.parameters()) t.push_back(nn::target_of(*p));
  return nn::grad_check(loss, t, opts);
}

}  // namespace sarv::testing
