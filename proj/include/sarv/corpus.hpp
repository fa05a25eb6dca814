#pragma once

// Raw review corpus readers: delimited text (CSV/TSV) or line-delimited JSON records.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace sarv::text {

struct CorpusRecord {
  std::string text;
  std::string label;
  std::string category;
  std::size_t line = 0;  // 1-based line where the record starts
};

struct CorpusFormat {
  enum class Kind { delimited, jsonl };
  Kind kind = Kind::delimited;
  char delimiter = ',';
  bool header = true;
  // Header names, or zero-based column indexes when header is false.
  std::string text_column = "text";
  std::string label_column = "label";
  std::string category_column = "category";

  /// Picks kind/delimiter from the extension (.csv, .tsv, .jsonl, .ndjson).
  static CorpusFormat for_path(const std::filesystem::path& path);
};

struct MalformedRow {
  std::size_t line = 0;
  std::string reason;
};

struct CorpusReadResult {
  std::vector<CorpusRecord> records;
  std::vector<MalformedRow> malformed;
};

/// Throws DataError when the file is unreadable or more than `max_malformed` rows are bad.
CorpusReadResult read_corpus(const std::filesystem::path& path, const CorpusFormat& format,
                             std::size_t max_malformed = static_cast<std::size_t>(-1));

/// RFC 4180 style field splitting of an in-memory document; quoted fields may span lines.
std::vector<std::vector<std::string>> parse_delimited(const std::string& doc, char delimiter,
                                                      std::vector<std::size_t>* row_lines = nullptr);

}  // namespace sarv::text
