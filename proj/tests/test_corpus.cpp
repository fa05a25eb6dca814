#include <doctest.h>

#include <random>

#include "sarv/corpus.hpp"
#include "sarv/errors.hpp"
#include "support.hpp"

using namespace sarv;
using namespace sarv::text;

TEST_CASE("delimited rows follow RFC 4180 quoting") {
  const auto rows = parse_delimited("a,\"b,c\",\"say \"\"hi\"\"\"\nx,\"multi\nline\",z\n", ',');
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "say \"hi\""});
  CHECK(rows[1] == std::vector<std::string>{"x", "multi\nline", "z"});
}

TEST_CASE("row line numbers count from the row's first line") {
  std::vector<std::size_t> lines;
  parse_delimited("h1,h2\n\"a\nb\",1\nc,2\r\n", ',', &lines);
  CHECK(lines == std::vector<std::size_t>{1, 2, 4});
}

TEST_CASE("csv corpus with header and a malformed row") {
  testing::TempDir dir;
  testing::write_file(dir / "c.csv", "text,label,category\n\"خوب، بود\",positive,Mobile\nonly-one-field\n\"بد\",0,Books\n");
  const auto res = read_corpus(dir / "c.csv", CorpusFormat::for_path(dir / "c.csv"));
  REQUIRE(res.records.size() == 2);
  CHECK(res.records[0].text == "خوب، بود");
  CHECK(res.records[0].label == "positive");
  CHECK(res.records[0].category == "Mobile");
  CHECK(res.records[0].line == 2);
  CHECK(res.records[1].line == 4);
  REQUIRE(res.malformed.size() == 1);
  CHECK(res.malformed[0].line == 3);
}

TEST_CASE("malformed rows beyond the threshold are fatal") {
  testing::TempDir dir;
  testing::write_file(dir / "c.csv", "text,label\nbad\nbad\nok,1\n");
  CHECK_NOTHROW(read_corpus(dir / "c.csv", CorpusFormat{}, 2));
  CHECK_THROWS_AS(read_corpus(dir / "c.csv", CorpusFormat{}, 1), DataError);
}

TEST_CASE("tsv and column mapping by name") {
  testing::TempDir dir;
  testing::write_file(dir / "c.tsv", "id\tbody\ty\n1\tمتن\tnegative\n");
  auto fmt = CorpusFormat::for_path(dir / "c.tsv");
  CHECK(fmt.delimiter == '\t');
  fmt.text_column = "body";
  fmt.label_column = "y";
  fmt.category_column = "";
  const auto res = read_corpus(dir / "c.tsv", fmt);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].text == "متن");
  CHECK(res.records[0].category.empty());
}

TEST_CASE("headerless files use column indices") {
  testing::TempDir dir;
  testing::write_file(dir / "c.csv", "positive,متن\n");
  CorpusFormat fmt;
  fmt.header = false;
  fmt.text_column = "1";
  fmt.label_column = "0";
  fmt.category_column = "";
  const auto res = read_corpus(dir / "c.csv", fmt);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].label == "positive");
  fmt.text_column = "body";
  CHECK_THROWS_AS(read_corpus(dir / "c.csv", fmt), ConfigError);
}

TEST_CASE("missing text column is a config error") {
  testing::TempDir dir;
  testing::write_file(dir / "c.csv", "body,label\nx,1\n");
  CHECK_THROWS_AS(read_corpus(dir / "c.csv", CorpusFormat{}), ConfigError);
}

TEST_CASE("jsonl corpus") {
  testing::TempDir dir;
  testing::write_file(dir / "c.jsonl",
                      "{\"text\":\"عالی\",\"label\":\"positive\",\"category\":\"IT\"}\n\nnot json\n{\"text\":\"بد\",\"label\":0}\n"
                      "{\"label\":1}\n");
  const auto res = read_corpus(dir / "c.jsonl", CorpusFormat::for_path(dir / "c.jsonl"));
  REQUIRE(res.records.size() == 2);
  CHECK(res.records[0].category == "IT");
  CHECK(res.records[1].label == "0");
  CHECK(res.records[1].line == 4);
  REQUIRE(res.malformed.size() == 2);
  CHECK(res.malformed[0].line == 3);
  CHECK(res.malformed[1].line == 5);
}

TEST_CASE("empty and unreadable files") {
  testing::TempDir dir;
  testing::write_file(dir / "empty.csv", "");
  const auto res = read_corpus(dir / "empty.csv", CorpusFormat{});
  CHECK(res.records.empty());
  CHECK(res.malformed.empty());
  CHECK_THROWS_AS(read_corpus(dir / "nope.csv", CorpusFormat{}), DataError);
}

TEST_CASE("fuzz: records plus malformed rows equal input rows") {
  testing::TempDir dir;
  std::mt19937_64 rng(3);
  std::string doc = "text,label,category\n";
  std::size_t good = 0;
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    if (rng() % 10 == 0) {
      doc += "lonely\n";
      ++bad;
    } else {
      doc += "\"t" + std::to_string(i) + (rng() % 3 == 0 ? ",\nwith newline" : "") + "\"," +
             std::to_string(rng() % 2) + ",c\n";
      ++good;
    }
  }
  testing::write_file(dir / "f.csv", doc);
  const auto res = read_corpus(dir / "f.csv", CorpusFormat{});
  CHECK(res.records.size() == good);
  CHECK(res.malformed.size() == bad);
  CHECK(res.records.size() == 1000 - res.malformed.size());
}
