#pragma once

// Review text normalization, tokenization and the fixed 15-slot sentence window.

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sarv::text {

inline constexpr std::size_t kMaxLen = 15;

/// Reserved padding symbol. It contains a space, so tokenize() can never emit it.
inline const std::string kPad = " <pad>";

struct NormConfig {
  bool strip_punctuation = true;
  bool strip_digits_and_foreign_letters = true;
  bool unicode_persian_fold = true;
  /// Extra code points stripped like punctuation (the character-class override file).
  std::u32string extra_strip_chars;
  /// Stored folded; use set_stopwords() so folding is applied.
  std::set<std::string> stopwords;

  void set_stopwords(const std::vector<std::string>& words);
  /// Canonical digest of every field; recorded in shard manifests.
  std::string hash() const;
};

struct TokenSeq {
  std::vector<std::string> tokens;
  std::string source_id;

  std::size_t size() const noexcept { return tokens.size(); }
};

struct FixedSentence {
  std::vector<std::string> tokens;  // exactly max_len slots
  std::size_t true_length = 0;
};

/// Arabic yeh/kaf to Persian forms, diacritics dropped, ZWNJ to space.
std::string persian_fold(std::string_view utf8);

/// Throws DecodeError (with byte offset) on invalid UTF-8.
std::string normalize(std::string_view raw, const NormConfig& cfg);

TokenSeq tokenize(std::string_view text, std::string source_id = {});

FixedSentence unify_length(const TokenSeq& seq, std::size_t max_len = kMaxLen);

/// Token-count histogram over pre-truncation lengths.
class LengthHistogram {
 public:
  void add(std::size_t length) {
    ++counts_[length];
    ++total_;
  }
  void add(const TokenSeq& seq) { add(seq.size()); }

  const std::map<std::size_t, std::size_t>& counts() const noexcept { return counts_; }
  std::size_t total() const noexcept { return total_; }
  /// Fraction of sentences with at most `length` tokens; 0 for an empty histogram.
  double cumulative(std::size_t length) const;
  /// Lines of `length<TAB>count<TAB>cumulative`.
  std::string to_tsv() const;

 private:
  std::map<std::size_t, std::size_t> counts_;
  std::size_t total_ = 0;
};

template <typename Range>
LengthHistogram length_histogram(const Range& corpus) {
  LengthHistogram h;
  for (const auto& seq : corpus) h.add(seq);
  return h;
}

/// Bundled Persian stopword list.
const std::vector<std::string>& default_stopwords();
/// One token per line, UTF-8; blank lines ignored.
std::vector<std::string> read_stopword_file(const std::filesystem::path& path);

}  // namespace sarv::text
