#include "sarv/embed.hpp"

#include <unicode/utf8.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sarv/errors.hpp"
#include "sarv/hash.hpp"

namespace sarv::embed {

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim), zero_(dim, 0.0F) {
  if (dim == 0) throw ValidationError("embedding dim must be >= 1");
}

void EmbeddingTable::set(const std::string& token, std::span<const float> vec) {
  if (vec.size() != dim_) {
    throw DimensionError("embedding for '" + token + "' has " + std::to_string(vec.size()) + " components, expected " +
                         std::to_string(dim_));
  }
  if (token == text::kPad) throw ValidationError("the PAD symbol cannot carry an embedding");
  auto [it, inserted] = index_.try_emplace(token, static_cast<WordId>(tokens_.size() + 2));
  if (inserted) {
    tokens_.push_back(token);
    values_.insert(values_.end(), vec.begin(), vec.end());
  } else {
    std::copy(vec.begin(), vec.end(), values_.begin() + static_cast<std::ptrdiff_t>((it->second - 2) * dim_));
  }
}

WordId EmbeddingTable::id(std::string_view token) const {
  if (token == text::kPad) return kPadId;
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnknownId : it->second;
}

std::span<const float> EmbeddingTable::vector(WordId id) const {
  if (id < 2 || static_cast<std::size_t>(id - 2) >= tokens_.size()) return zero_;
  return {values_.data() + static_cast<std::size_t>(id - 2) * dim_, dim_};
}

bool EmbeddingTable::contains(std::string_view token) const { return index_.contains(std::string(token)); }

const std::string& EmbeddingTable::token(WordId id) const {
  static const std::string kUnknown = "<unk>";
  if (id == kPadId) return text::kPad;
  if (id < 2 || static_cast<std::size_t>(id - 2) >= tokens_.size()) return kUnknown;
  return tokens_[static_cast<std::size_t>(id - 2)];
}

std::string EmbeddingTable::hash() const {
  Sha256 h;
  const std::string header = "dim=" + std::to_string(dim_) + "\n";
  h.update(header);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    h.update(tokens_[i]);
    h.update(std::string_view("\0", 1));
    h.update(std::as_bytes(std::span<const float>(values_.data() + i * dim_, dim_)));
  }
  return h.hex_digest();
}

EmbeddingLoadResult load_embeddings(std::istream& in, std::size_t dim) {
  EmbeddingLoadResult out{EmbeddingTable(dim), 0, 0};
  std::string line;
  std::vector<float> vec;
  vec.reserve(dim);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    const char* tok_end = std::find(p, end, ' ');
    std::string token(p, tok_end);
    vec.clear();
    bool ok = !token.empty();
    p = tok_end;
    while (ok && p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      float v = 0.0F;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc{} || (next != end && *next != ' ') || !std::isfinite(v)) {
        ok = false;
        break;
      }
      vec.push_back(v);
      p = next;
    }
    if (!ok || vec.size() != dim) {
      ++out.skipped;
      continue;
    }
    out.table.set(token, vec);
    ++out.loaded;
  }
  return out;
}

EmbeddingLoadResult load_embeddings(const std::filesystem::path& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read embeddings file " + path.string());
  return load_embeddings(in, dim);
}

SentenceMatrix vectorize_sentence(const text::FixedSentence& s, const EmbeddingTable& table) {
  SentenceMatrix m{s.tokens.size(), table.dim(), {}};
  m.values.reserve(m.rows * m.cols);
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    auto v = i < s.true_length ? table.lookup(s.tokens[i]) : table.vector(kPadId);
    m.values.insert(m.values.end(), v.begin(), v.end());
  }
  return m;
}

std::u32string to_code_points(std::string_view utf8) {
  std::u32string out;
  const auto* p = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto len = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < len) {
    const int32_t start = i;
    UChar32 cp = 0;
    U8_NEXT(p, i, len, cp);
    if (cp < 0) throw DecodeError("invalid UTF-8", static_cast<std::size_t>(start));
    out.push_back(static_cast<char32_t>(cp));
  }
  return out;
}

namespace {

std::string to_utf8(char32_t c) {
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  U8_APPEND_UNSAFE(buf, n, static_cast<UChar32>(c));
  return {buf, static_cast<std::size_t>(n)};
}

}  // namespace

CharVocab CharVocab::build(const std::vector<std::u32string>& chars, std::size_t max_word_chars) {
  CharVocab v(max_word_chars);
  for (const auto& s : chars) v.chars_ += s;
  std::sort(v.chars_.begin(), v.chars_.end());
  v.chars_.erase(std::unique(v.chars_.begin(), v.chars_.end()), v.chars_.end());
  return v;
}

CharId CharVocab::id(char32_t c) const {
  auto it = std::lower_bound(chars_.begin(), chars_.end(), c);
  if (it == chars_.end() || *it != c) return 0;
  return static_cast<CharId>(it - chars_.begin()) + 1;
}

std::string CharVocab::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    out += to_utf8(chars_[i]);
    out += '\t';
    out += std::to_string(i + 1);
    out += '\n';
  }
  return out;
}

CharVocab CharVocab::deserialize(std::string_view text, std::size_t max_word_chars) {
  CharVocab v(max_word_chars);
  std::vector<std::pair<CharId, char32_t>> entries;
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string_view::npos) throw DataError("char vocab line " + std::to_string(lineno) + ": missing tab");
    const auto cps = to_code_points(line.substr(0, tab));
    CharId id = 0;
    const auto num = line.substr(tab + 1);
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), id);
    if (cps.size() != 1 || ec != std::errc{} || p != num.data() + num.size() || id < 1) {
      throw DataError("char vocab line " + std::to_string(lineno) + ": expected `char<TAB>id`");
    }
    entries.emplace_back(id, cps[0]);
  }
  std::sort(entries.begin(), entries.end());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first != static_cast<CharId>(i + 1) || (i > 0 && entries[i].second <= entries[i - 1].second)) {
      throw DataError("char vocab ids must be dense from 1 and follow code point order");
    }
    v.chars_.push_back(entries[i].second);
  }
  return v;
}

void CharVocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << serialize();
}

CharVocab CharVocab::load(const std::filesystem::path& path, std::size_t max_word_chars) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return deserialize(os.str(), max_word_chars);
}

std::vector<CharId> encode_chars_trimmed(std::string_view token, const CharVocab& vocab) {
  std::vector<CharId> ids;
  if (token == text::kPad) return ids;
  for (char32_t c : to_code_points(token)) {
    if (ids.size() == vocab.max_word_chars()) break;
    ids.push_back(vocab.id(c));
  }
  return ids;
}

std::vector<CharId> encode_chars(std::string_view token, const CharVocab& vocab) {
  auto ids = encode_chars_trimmed(token, vocab);
  ids.resize(vocab.max_word_chars(), 0);
  return ids;
}

EncodedSentence encode_sentence(const text::FixedSentence& s, const EmbeddingTable& table, const CharVocab& vocab,
                                int label) {
  EncodedSentence e;
  e.true_length = s.true_length;
  e.label = label;
  e.tokens.reserve(s.tokens.size());
  e.chars.reserve(s.tokens.size());
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (i < s.true_length) {
      e.tokens.push_back(table.id(s.tokens[i]));
      e.chars.push_back(encode_chars_trimmed(s.tokens[i], vocab));
    } else {
      e.tokens.push_back(kPadId);
      e.chars.emplace_back();
    }
  }
  return e;
}

}  // namespace sarv::embed
