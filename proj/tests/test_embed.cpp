#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sarv/embed.hpp"
#include "sarv/errors.hpp"
#include "sarv/textproc.hpp"
#include "support.hpp"

using namespace sarv;
using namespace sarv::embed;

namespace {

std::string vec_line(const std::string& tok, std::size_t dim, float base) {
  std::string s = tok;
  for (std::size_t i = 0; i < dim; ++i) s += " " + std::to_string(base + 0.01F * static_cast<float>(i));
  return s + "\n";
}

bool all_zero(std::span<const float> v) {
  return std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0F; });
}

}  // namespace

TEST_CASE("three well-formed lines load into three entries") {
  std::istringstream in(vec_line("a", 50, 0.1F) + vec_line("b", 50, 0.2F) + vec_line("c", 50, 0.3F));
  const auto res = load_embeddings(in, 50);
  CHECK(res.table.size() == 3);
  CHECK(res.table.dim() == 50);
  CHECK(res.loaded == 3);
  CHECK(res.skipped == 0);
}

TEST_CASE("short line is skipped and counted") {
  std::istringstream in("cat 0.1 0.2\n" + vec_line("dog", 50, 0.5F) + "bad 1 x 3\n");
  const auto res = load_embeddings(in, 50);
  CHECK(res.skipped == 2);
  CHECK(res.table.size() == 1);
  CHECK_FALSE(res.table.contains("cat"));
}

TEST_CASE("duplicate tokens keep the last occurrence") {
  std::istringstream in(vec_line("x", 3, 1.0F) + vec_line("y", 3, 2.0F) + vec_line("x", 3, 5.0F));
  const auto res = load_embeddings(in, 3);
  CHECK(res.table.size() == 2);
  CHECK(res.table.lookup("x")[0] == doctest::Approx(5.0F));
  CHECK(res.table.id("x") == 2);
  CHECK(res.table.id("y") == 3);
}

TEST_CASE("unreadable embeddings file is fatal") {
  CHECK_THROWS_AS(load_embeddings("/nonexistent/vectors.txt", 50), DataError);
}

TEST_CASE("bundled fixture vectors: 100 finite entries") {
  const auto res = load_embeddings(std::filesystem::path(SARV_TEST_DATA_DIR) / ".." / ".." / "data" /
                                   "fixture_vectors_fa.txt");
  CHECK(res.table.size() == 100);
  CHECK(res.skipped == 0);
  for (WordId id = 2; id < 102; ++id) {
    for (float v : res.table.vector(id)) REQUIRE(std::isfinite(v));
  }
}

TEST_CASE("lookup: known, unseen and PAD") {
  EmbeddingTable t(50);
  std::vector<float> v(50, 0.25F);
  t.set("کتاب", v);
  CHECK(t.lookup("کتاب")[7] == 0.25F);
  CHECK(t.lookup("qxzv").size() == 50);
  CHECK(all_zero(t.lookup("qxzv")));
  CHECK(all_zero(t.lookup(text::kPad)));
  CHECK(t.id(text::kPad) == kPadId);
  CHECK(t.id("qxzv") == kUnknownId);
  CHECK(t.token(kPadId) == text::kPad);
  CHECK_THROWS_AS(t.set("bad", std::vector<float>(3)), DimensionError);
}

TEST_CASE("table hash is deterministic and content-sensitive") {
  const auto a = testing::synthetic_table(20, 8, 1);
  const auto b = testing::synthetic_table(20, 8, 1);
  const auto c = testing::synthetic_table(20, 8, 2);
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
}

TEST_CASE("vectorize_sentence") {
  const auto table = testing::synthetic_table(20, 50, 4);
  SUBCASE("all PAD is a zero matrix") {
    const auto m = vectorize_sentence(text::unify_length(text::TokenSeq{}), table);
    CHECK(m.rows == 15);
    CHECK(m.cols == 50);
    CHECK(all_zero(m.values));
  }
  SUBCASE("known tokens in order") {
    text::TokenSeq s;
    for (int i = 0; i < 15; ++i) s.tokens.push_back("w" + std::to_string(i));
    const auto m = vectorize_sentence(text::unify_length(s), table);
    for (std::size_t r = 0; r < 15; ++r) {
      const auto want = table.lookup("w" + std::to_string(r));
      CHECK(std::equal(want.begin(), want.end(), m.row(r).begin()));
    }
  }
  SUBCASE("mixed known and OOV rows") {
    text::TokenSeq s;
    s.tokens = {"w1", "oov", "w3", "zzz"};
    const auto f = text::unify_length(s);
    const auto m = vectorize_sentence(f, table);
    for (std::size_t r = 0; r < 15; ++r) {
      const auto direct = r < f.true_length ? table.lookup(f.tokens[r]) : table.vector(kPadId);
      CHECK(std::equal(direct.begin(), direct.end(), m.row(r).begin()));
    }
    CHECK_FALSE(all_zero(m.row(0)));
    CHECK(all_zero(m.row(1)));
    CHECK_FALSE(all_zero(m.row(2)));
    CHECK(all_zero(m.row(3)));
    for (std::size_t r = f.true_length; r < 15; ++r) CHECK(all_zero(m.row(r)));
  }
}

TEST_CASE("char vocabulary") {
  SUBCASE("sorted ids") {
    std::vector<text::TokenSeq> corpus(2);
    corpus[0].tokens = {"ab"};
    corpus[1].tokens = {"ba"};
    const auto v = build_char_vocab(corpus);
    CHECK(v.size() == 2);
    CHECK(v.id(U'a') == 1);
    CHECK(v.id(U'b') == 2);
    CHECK(v.id(U'z') == 0);
  }
  SUBCASE("empty corpus") { CHECK(build_char_vocab(std::vector<text::TokenSeq>{}).size() == 0); }
  SUBCASE("size matches a brute-force character set") {
    std::vector<text::TokenSeq> corpus;
    std::set<char32_t> brute;
    const text::NormConfig cfg;
    for (const char* raw : {"واقعا عالیه، من که ازش خیلی راضیم.", "گوشی این قیمت و امکانات", "کتاب خوب بود"}) {
      corpus.push_back(text::tokenize(text::normalize(raw, cfg)));
      for (const auto& t : corpus.back().tokens) {
        for (char32_t c : to_code_points(t)) brute.insert(c);
      }
    }
    CHECK(build_char_vocab(corpus).size() == brute.size());
  }
  SUBCASE("serialization round trip") {
    const auto v = CharVocab::build({U"سلام", U"abc"});
    const auto back = CharVocab::deserialize(v.serialize());
    CHECK(back == v);
    for (char32_t c : v.chars()) CHECK(back.id(c) == v.id(c));
    testing::TempDir dir;
    v.save(dir / "v.tsv");
    CHECK(CharVocab::load(dir / "v.tsv") == v);
    CHECK_THROWS_AS(CharVocab::deserialize("a\t2\n"), DataError);
    CHECK_THROWS_AS(CharVocab::deserialize("a 1\n"), DataError);
  }
}

TEST_CASE("encode_chars") {
  const auto v5 = CharVocab::build({U"ab"}, 5);
  CHECK(encode_chars("ab", v5) == std::vector<CharId>{1, 2, 0, 0, 0});
  CHECK(encode_chars("axb", v5) == std::vector<CharId>{1, 0, 2, 0, 0});
  CHECK(encode_chars(text::kPad, v5) == std::vector<CharId>(5, 0));
  const auto v20 = CharVocab::build({U"abcdefghijklmnopqrstuvwxy"}, 20);
  const auto ids = encode_chars("abcdefghijklmnopqrstuvwxy", v20);
  CHECK(ids.size() == 20);
  for (CharId i = 0; i < 20; ++i) CHECK(ids[static_cast<std::size_t>(i)] == i + 1);
  CHECK(encode_chars("", v20).size() == 20);
}

TEST_CASE("encode_sentence lays out ids per slot") {
  const auto table = testing::synthetic_table(3, 4, 1);
  const auto vocab = CharVocab::build({U"w012"});
  text::TokenSeq s;
  s.tokens = {"w1", "unknown", "w2"};
  const auto e = encode_sentence(text::unify_length(s), table, vocab, 1);
  CHECK(e.true_length == 3);
  CHECK(e.label == 1);
  REQUIRE(e.tokens.size() == 15);
  CHECK(e.tokens[0] == table.id("w1"));
  CHECK(e.tokens[1] == kUnknownId);
  CHECK(e.tokens[3] == kPadId);
  CHECK(e.chars[0].size() == 2);
  CHECK(e.chars[3].empty());
}
