#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include <unicode/uchar.h>

#include "sarv/embed.hpp"
#include "sarv/errors.hpp"
#include "sarv/textproc.hpp"
#include "support.hpp"

using namespace sarv;
using namespace sarv::text;

namespace {

NormConfig no_stopwords() { return NormConfig{}; }

NormConfig with_default_stopwords() {
  NormConfig cfg;
  cfg.set_stopwords(default_stopwords());
  return cfg;
}

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "کتاب", "خوب", " ", "  ", "\t", "،", ".", "!", "؟", "abc", "Z", "123", "۴۵", "٦", "ي", "ك", "‌",
      "َ", "ـ", "گوشی", "می‌شود", "«", "»", "-", "\n", "x1", "ـ", "ًً", "این", "از", "و"};
  std::string s;
  const auto n = rng() % 12;
  for (std::size_t i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
  return s;
}

}  // namespace

TEST_CASE("normalize strips punctuation from the IT fixture comment") {
  CHECK(normalize("واقعا عالیه، من که ازش خیلی راضیم.", no_stopwords()) == "واقعا عالیه من که ازش خیلی راضیم");
}

TEST_CASE("normalize of empty input is empty") {
  CHECK(normalize("", no_stopwords()).empty());
  CHECK(normalize("   \t\n ", no_stopwords()).empty());
}

TEST_CASE("digits and foreign letters are removed") {
  CHECK(normalize("abc 123 کتاب", no_stopwords()) == "کتاب");
  CHECK(normalize("۱۲۳ کتاب ٤٥", no_stopwords()) == "کتاب");
  NormConfig keep;
  keep.strip_digits_and_foreign_letters = false;
  CHECK(normalize("abc 123 کتاب", keep) == "abc 123 کتاب");
}

TEST_CASE("punctuation stripping can be disabled") {
  NormConfig cfg;
  cfg.strip_punctuation = false;
  CHECK(normalize("خوب، بود.", cfg) == "خوب، بود.");
}

TEST_CASE("whitespace collapses and trims") {
  CHECK(normalize("  کتاب \t\n  خوب  ", no_stopwords()) == "کتاب خوب");
}

TEST_CASE("persian folding") {
  const auto cfg = no_stopwords();
  SUBCASE("arabic yeh and kaf") {
    CHECK(normalize("كتاب", cfg) == "کتاب");
    CHECK(normalize("علي", cfg) == "علی");
    CHECK(normalize("موسى", cfg) == "موسی");
  }
  SUBCASE("diacritics and tatweel are dropped") {
    CHECK(normalize("کِتاب", cfg) == "کتاب");
    CHECK(normalize("کـــتاب", cfg) == "کتاب");
  }
  SUBCASE("zwnj becomes a space") { CHECK(normalize("می‌شود", cfg) == "می شود"); }
  SUBCASE("folding off keeps the original code points") {
    NormConfig raw;
    raw.unicode_persian_fold = false;
    CHECK(normalize("كتاب", raw) == "كتاب");
    CHECK(normalize("می‌شود", raw) == "می‌شود");
  }
}

TEST_CASE("invalid UTF-8 reports the byte offset") {
  try {
    (void)normalize("ab\xff" "cd", no_stopwords());
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS((void)normalize("کتاب\xd8", no_stopwords()), DecodeError);
}

TEST_CASE("stopwords are removed as whole tokens") {
  NormConfig cfg;
  cfg.set_stopwords({"از", "و"});
  CHECK(normalize("کتاب و قلم از بازار", cfg) == "کتاب قلم بازار");
  // "از" inside "بازار" survives
  CHECK(normalize("بازار", cfg) == "بازار");
  CHECK(normalize("و از", cfg).empty());
}

TEST_CASE("stopwords are folded before matching") {
  NormConfig cfg;
  cfg.set_stopwords({"يك"});  // arabic yeh and kaf
  CHECK(cfg.stopwords.contains("یک"));
  CHECK(normalize("یک کتاب", cfg) == "کتاب");
}

TEST_CASE("bundled stopword list") {
  const auto& words = default_stopwords();
  CHECK(words.size() >= 140);
  CHECK(words.size() <= 200);
  const auto cfg = with_default_stopwords();
  CHECK(cfg.stopwords.contains("از"));
  // sentiment-bearing negation stays
  CHECK_FALSE(cfg.stopwords.contains("نه"));
  CHECK_FALSE(cfg.stopwords.contains("هیچ"));
}

TEST_CASE("stopword file is one token per line") {
  testing::TempDir dir;
  testing::write_file(dir / "stop.txt", "از\r\n\n  و  \nبه\n");
  const auto words = read_stopword_file(dir / "stop.txt");
  CHECK(words == std::vector<std::string>{"از", "و", "به"});
  CHECK_THROWS_AS(read_stopword_file(dir / "missing.txt"), DataError);
}

TEST_CASE("config hash tracks every setting") {
  NormConfig a;
  NormConfig b;
  CHECK(a.hash() == b.hash());
  b.strip_punctuation = false;
  CHECK(a.hash() != b.hash());
  NormConfig c;
  c.set_stopwords({"از"});
  CHECK(a.hash() != c.hash());
}

TEST_CASE("normalize is idempotent (fuzz)") {
  std::mt19937_64 rng(11);
  const auto cfgs = {no_stopwords(), with_default_stopwords()};
  for (const auto& cfg : cfgs) {
    for (int i = 0; i < 2000; ++i) {
      const auto raw = random_text(rng);
      const auto once = normalize(raw, cfg);
      CHECK(normalize(once, cfg) == once);
    }
  }
}

TEST_CASE("tokens never contain a stripped character class (fuzz)") {
  std::mt19937_64 rng(12);
  const auto cfg = no_stopwords();
  for (int i = 0; i < 2000; ++i) {
    const auto seq = tokenize(normalize(random_text(rng), cfg));
    for (const auto& tok : seq.tokens) {
      REQUIRE_FALSE(tok.empty());
      for (char32_t c : embed::to_code_points(tok)) {
        const auto cp = static_cast<UChar32>(c);
        CHECK_FALSE(u_ispunct(cp));
        CHECK_FALSE(u_isdigit(cp));
        CHECK_FALSE(u_isUWhiteSpace(cp));
        CHECK_FALSE(((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')));
        CHECK(c != 0x200C);
        CHECK(c != 0x064A);
        CHECK(c != 0x0643);
      }
    }
  }
}

TEST_CASE("tokenize splits on whitespace") {
  CHECK(tokenize("کتاب خوب بود").tokens == std::vector<std::string>{"کتاب", "خوب", "بود"});
  CHECK(tokenize("").tokens.empty());
  CHECK(tokenize("  a   b ").tokens == std::vector<std::string>{"a", "b"});
  CHECK(tokenize("x", "row-7").source_id == "row-7");
}

TEST_CASE("unify_length") {
  auto make = [](std::size_t n) {
    TokenSeq s;
    for (std::size_t i = 0; i < n; ++i) s.tokens.push_back("t" + std::to_string(i));
    return s;
  };
  SUBCASE("truncates to the first fifteen") {
    const auto f = unify_length(make(20));
    CHECK(f.true_length == 15);
    REQUIRE(f.tokens.size() == 15);
    for (std::size_t i = 0; i < 15; ++i) CHECK(f.tokens[i] == "t" + std::to_string(i));
  }
  SUBCASE("pads short input") {
    const auto f = unify_length(make(3));
    CHECK(f.true_length == 3);
    REQUIRE(f.tokens.size() == 15);
    CHECK(f.tokens[2] == "t2");
    for (std::size_t i = 3; i < 15; ++i) CHECK(f.tokens[i] == kPad);
  }
  SUBCASE("exactly max_len is unchanged") {
    const auto f = unify_length(make(15));
    CHECK(f.true_length == 15);
    CHECK(f.tokens == make(15).tokens);
  }
  SUBCASE("empty input is all padding") {
    const auto f = unify_length(make(0));
    CHECK(f.true_length == 0);
    CHECK(std::all_of(f.tokens.begin(), f.tokens.end(), [](const auto& t) { return t == kPad; }));
  }
  SUBCASE("custom length and invalid length") {
    CHECK(unify_length(make(5), 2).tokens.size() == 2);
    CHECK_THROWS_AS(unify_length(make(5), 0), ValidationError);
  }
}

TEST_CASE("PAD is never a token") {
  // PAD carries a space, which tokenize never leaves inside a token
  CHECK(tokenize(kPad).tokens != std::vector<std::string>{kPad});
  CHECK(normalize(kPad, no_stopwords()) != kPad);
}

TEST_CASE("length histogram") {
  SUBCASE("small corpus") {
    std::vector<TokenSeq> corpus(3);
    corpus[0].tokens = {"a", "b", "c"};
    corpus[1].tokens = {"a", "b", "c"};
    corpus[2].tokens = {"1", "2", "3", "4", "5", "6", "7"};
    const auto h = length_histogram(corpus);
    CHECK(h.counts() == std::map<std::size_t, std::size_t>{{3, 2}, {7, 1}});
    CHECK(h.cumulative(3) == doctest::Approx(2.0 / 3.0));
    CHECK(h.cumulative(6) == doctest::Approx(2.0 / 3.0));
    CHECK(h.cumulative(7) == 1.0);
    CHECK(h.to_tsv().find("3\t2\t") != std::string::npos);
  }
  SUBCASE("empty corpus") {
    const auto h = length_histogram(std::vector<TokenSeq>{});
    CHECK(h.counts().empty());
    CHECK(h.total() == 0);
    CHECK(h.cumulative(15) == 0.0);
  }
  SUBCASE("fuzzed corpus sums to its size") {
    std::mt19937_64 rng(5);
    std::vector<TokenSeq> corpus(1000);
    std::map<std::size_t, std::size_t> brute;
    for (auto& s : corpus) {
      s = tokenize(normalize(random_text(rng), no_stopwords()));
      ++brute[s.size()];
    }
    const auto h = length_histogram(corpus);
    CHECK(h.total() == 1000);
    CHECK(h.counts() == brute);
    std::size_t sum = 0;
    for (const auto& [len, n] : h.counts()) sum += n;
    CHECK(sum == 1000);
  }
}

TEST_CASE("fixture comments match the token-count oracle") {
  std::ifstream in(testing::data_path("review_tokens_expected.tsv"));
  REQUIRE(in);
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string category, count, expected_norm;
    std::getline(ls, category, '\t');
    std::getline(ls, count, '\t');
    std::getline(ls, expected_norm);
    ++rows;
    CAPTURE(category);
    std::ifstream src(testing::data_path("review_comments.tsv"));
    std::string row;
    std::string raw;
    while (std::getline(src, row)) {
      if (row.rfind(category + "\t", 0) == 0) raw = row.substr(category.size() + 1);
    }
    REQUIRE_FALSE(raw.empty());
    const auto norm = normalize(raw, no_stopwords());
    CHECK(norm == expected_norm);
    const auto fixed = unify_length(tokenize(norm));
    CHECK(fixed.tokens.size() == kMaxLen);
    CHECK(fixed.true_length == std::min<std::size_t>(std::stoul(count), kMaxLen));
    CHECK(tokenize(norm).size() == std::stoul(count));
  }
  CHECK(rows == 5);
}

TEST_CASE("the Mobile fixture row has 13 tokens") {
  const auto seq = tokenize(normalize("گوشی این قیمت و امکانات در مقایسه با سایر برندها هیچ مزیتی نداره.", no_stopwords()));
  CHECK(seq.size() == 13);
}
