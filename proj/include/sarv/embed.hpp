#pragma once

// Pretrained word vectors (GloVe text format), character inventory, and sentence encoding.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sarv/textproc.hpp"

namespace sarv::embed {

using WordId = std::int32_t;
using CharId = std::int32_t;

inline constexpr WordId kPadId = 0;
inline constexpr WordId kUnknownId = 1;
inline constexpr std::size_t kDefaultDim = 50;
inline constexpr std::size_t kMaxWordChars = 20;

/// Frozen token -> vector map. Absent tokens (and PAD) read as the zero vector.
///
/// Entries get dense ids starting at 2 in first-appearance order; ids 0 and 1
/// are reserved for PAD and out-of-vocabulary tokens.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = kDefaultDim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return tokens_.size(); }

  /// Inserts or overwrites; throws DimensionError when the vector length differs from dim().
  void set(const std::string& token, std::span<const float> vec);

  WordId id(std::string_view token) const;
  std::span<const float> vector(WordId id) const;
  std::span<const float> lookup(std::string_view token) const { return vector(id(token)); }
  bool contains(std::string_view token) const;
  const std::string& token(WordId id) const;

  /// Digest over (token, values) in id order.
  std::string hash() const;

 private:
  std::size_t dim_;
  std::vector<std::string> tokens_;
  std::vector<float> values_;
  std::vector<float> zero_;
  std::unordered_map<std::string, WordId> index_;
};

struct EmbeddingLoadResult {
  EmbeddingTable table;
  std::size_t loaded = 0;   // well-formed lines, duplicates included
  std::size_t skipped = 0;  // wrong component count or unparsable numbers
};

/// GloVe text: `token SP float (SP float)*` per line. Throws DataError when unreadable.
EmbeddingLoadResult load_embeddings(const std::filesystem::path& path, std::size_t dim = kDefaultDim);
EmbeddingLoadResult load_embeddings(std::istream& in, std::size_t dim = kDefaultDim);

inline std::span<const float> lookup(const EmbeddingTable& table, std::string_view token) {
  return table.lookup(token);
}

/// Row-major [rows x cols] float matrix.
struct SentenceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  std::span<const float> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

SentenceMatrix vectorize_sentence(const text::FixedSentence& s, const EmbeddingTable& table);

class CharVocab {
 public:
  explicit CharVocab(std::size_t max_word_chars = kMaxWordChars) : max_word_chars_(max_word_chars) {}

  /// Characters in code point order get ids 1..n.
  static CharVocab build(const std::vector<std::u32string>& chars, std::size_t max_word_chars = kMaxWordChars);

  std::size_t size() const noexcept { return chars_.size(); }
  std::size_t max_word_chars() const noexcept { return max_word_chars_; }
  /// 0 when unknown.
  CharId id(char32_t c) const;
  const std::u32string& chars() const noexcept { return chars_; }

  /// `char TAB id` lines.
  void save(const std::filesystem::path& path) const;
  static CharVocab load(const std::filesystem::path& path, std::size_t max_word_chars = kMaxWordChars);
  std::string serialize() const;
  static CharVocab deserialize(std::string_view text, std::size_t max_word_chars = kMaxWordChars);

  bool operator==(const CharVocab&) const = default;

 private:
  std::u32string chars_;  // sorted
  std::size_t max_word_chars_;
};

std::u32string to_code_points(std::string_view utf8);

template <typename Range>
CharVocab build_char_vocab(const Range& corpus, std::size_t max_word_chars = kMaxWordChars) {
  std::vector<std::u32string> chars;
  for (const text::TokenSeq& seq : corpus) {
    for (const auto& tok : seq.tokens) chars.push_back(to_code_points(tok));
  }
  return CharVocab::build(chars, max_word_chars);
}

/// Fixed-length (max_word_chars) id sequence; unknown chars and padding are 0, PAD is all zero.
std::vector<CharId> encode_chars(std::string_view token, const CharVocab& vocab);
/// Same ids without right padding; empty for PAD.
std::vector<CharId> encode_chars_trimmed(std::string_view token, const CharVocab& vocab);

/// One model-ready record.
struct EncodedSentence {
  std::vector<WordId> tokens;              // max_len ids, PAD slots are kPadId
  std::vector<std::vector<CharId>> chars;  // per slot, <= max_word_chars ids, empty for PAD
  std::size_t true_length = 0;
  int label = 0;

  bool operator==(const EncodedSentence&) const = default;
};

EncodedSentence encode_sentence(const text::FixedSentence& s, const EmbeddingTable& table, const CharVocab& vocab,
                                int label);

}  // namespace sarv::embed
