#include "sarv/textproc.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <fstream>
#include <sstream>

#include "sarv/errors.hpp"
#include "sarv/hash.hpp"

namespace sarv::text {
namespace {

constexpr UChar32 kZwnj = 0x200C;

void append_utf8(std::string& out, UChar32 cp) {
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  U8_APPEND_UNSAFE(buf, n, cp);
  out.append(buf, static_cast<std::size_t>(n));
}

// Calls fn(code_point, byte_offset) for each code point.
template <typename Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto len = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < len) {
    const int32_t start = i;
    UChar32 cp = 0;
    U8_NEXT(p, i, len, cp);
    if (cp < 0) throw DecodeError("invalid UTF-8", static_cast<std::size_t>(start));
    fn(cp, static_cast<std::size_t>(start));
  }
}

bool is_arabic_diacritic(UChar32 cp) {
  return (cp >= 0x064B && cp <= 0x065F) || cp == 0x0670 || cp == 0x0640;
}

// Folds one code point; returns -1 when the code point is dropped.
UChar32 fold_code_point(UChar32 cp) {
  switch (cp) {
    case 0x064A:  // ARABIC LETTER YEH
    case 0x0649:  // ARABIC LETTER ALEF MAKSURA
      return 0x06CC;
    case 0x0643:  // ARABIC LETTER KAF
      return 0x06A9;
    case kZwnj:
      return U' ';
    default:
      return is_arabic_diacritic(cp) ? -1 : cp;
  }
}

bool is_ascii_letter(UChar32 cp) { return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'); }

bool is_space(UChar32 cp) { return u_isUWhiteSpace(cp) != 0; }

// Collapses whitespace runs to single ASCII spaces and trims.
std::string squeeze(std::u32string_view cps) {
  std::string out;
  bool pending_space = false;
  for (UChar32 cp : cps) {
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append_utf8(out, cp);
  }
  return out;
}

}  // namespace

std::string persian_fold(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for_each_code_point(utf8, [&](UChar32 cp, std::size_t) {
    const UChar32 folded = fold_code_point(cp);
    if (folded >= 0) append_utf8(out, folded);
  });
  return out;
}

void NormConfig::set_stopwords(const std::vector<std::string>& words) {
  stopwords.clear();
  for (const auto& w : words) {
    std::string key = unicode_persian_fold ? persian_fold(w) : w;
    // Folding can split a ZWNJ compound; such entries never match a single token.
    if (!key.empty() && key.find(' ') == std::string::npos) stopwords.insert(std::move(key));
  }
}

std::string NormConfig::hash() const {
  std::ostringstream os;
  os << "punct=" << strip_punctuation << ";digits_foreign=" << strip_digits_and_foreign_letters
     << ";fold=" << unicode_persian_fold << ";extra=";
  for (char32_t c : extra_strip_chars) os << static_cast<uint32_t>(c) << ',';
  os << ";stop=";
  for (const auto& w : stopwords) os << w << '\n';
  return sha256_hex(os.str());
}

std::string normalize(std::string_view raw, const NormConfig& cfg) {
  std::u32string cps;
  cps.reserve(raw.size());
  for_each_code_point(raw, [&](UChar32 cp, std::size_t) {
    if (cfg.unicode_persian_fold) {
      cp = fold_code_point(cp);
      if (cp < 0) return;
    }
    const bool strip =
        u_charType(cp) == U_CONTROL_CHAR ||
        (cfg.strip_punctuation && u_ispunct(cp)) ||
        (cfg.strip_digits_and_foreign_letters && (u_isdigit(cp) || is_ascii_letter(cp))) ||
        cfg.extra_strip_chars.find(static_cast<char32_t>(cp)) != std::u32string::npos;
    cps.push_back(strip ? U' ' : static_cast<char32_t>(cp));
  });

  std::string squeezed = squeeze(cps);
  if (cfg.stopwords.empty() || squeezed.empty()) return squeezed;

  std::string out;
  out.reserve(squeezed.size());
  std::size_t pos = 0;
  while (pos <= squeezed.size()) {
    std::size_t end = squeezed.find(' ', pos);
    if (end == std::string::npos) end = squeezed.size();
    const std::string_view tok(squeezed.data() + pos, end - pos);
    if (!cfg.stopwords.contains(std::string(tok))) {
      if (!out.empty()) out.push_back(' ');
      out.append(tok);
    }
    pos = end + 1;
  }
  return out;
}

TokenSeq tokenize(std::string_view text, std::string source_id) {
  TokenSeq seq;
  seq.source_id = std::move(source_id);
  std::string current;
  for_each_code_point(text, [&](UChar32 cp, std::size_t) {
    if (is_space(cp)) {
      if (!current.empty()) seq.tokens.push_back(std::move(current));
      current.clear();
    } else {
      append_utf8(current, cp);
    }
  });
  if (!current.empty()) seq.tokens.push_back(std::move(current));
  return seq;
}

FixedSentence unify_length(const TokenSeq& seq, std::size_t max_len) {
  if (max_len == 0) throw ValidationError("unify_length: max_len must be >= 1");
  FixedSentence out;
  out.true_length = std::min(seq.size(), max_len);
  out.tokens.reserve(max_len);
  out.tokens.assign(seq.tokens.begin(), seq.tokens.begin() + static_cast<std::ptrdiff_t>(out.true_length));
  out.tokens.resize(max_len, kPad);
  return out;
}

double LengthHistogram::cumulative(std::size_t length) const {
  if (total_ == 0) return 0.0;
  std::size_t below = 0;
  for (const auto& [len, count] : counts_) {
    if (len > length) break;
    below += count;
  }
  return static_cast<double>(below) / static_cast<double>(total_);
}

std::string LengthHistogram::to_tsv() const {
  std::ostringstream os;
  os << "length\tcount\tcumulative\n";
  std::size_t running = 0;
  for (const auto& [len, count] : counts_) {
    running += count;
    os << len << '\t' << count << '\t' << static_cast<double>(running) / static_cast<double>(total_) << '\n';
  }
  return os.str();
}

std::vector<std::string> read_stopword_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    for (const auto& tok : tokenize(line).tokens) words.push_back(tok);
  }
  return words;
}

}  // namespace sarv::text
