#include "sarv/corpus.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "sarv/errors.hpp"

namespace sarv::text {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::optional<std::size_t> column_index(const std::vector<std::string>& header, const std::string& name,
                                        bool has_header) {
  if (name.empty()) return std::nullopt;
  if (has_header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }
  std::size_t idx = 0;
  auto [p, ec] = std::from_chars(name.data(), name.data() + name.size(), idx);
  if (ec != std::errc{} || p != name.data() + name.size()) {
    throw ConfigError("column '" + name + "' must be a numeric index when the corpus has no header");
  }
  return idx;
}

CorpusReadResult read_delimited(const std::filesystem::path& path, const CorpusFormat& fmt) {
  std::vector<std::size_t> lines;
  auto rows = parse_delimited(slurp(path), fmt.delimiter, &lines);
  CorpusReadResult out;
  if (rows.empty()) return out;

  std::vector<std::string> header;
  std::size_t first = 0;
  if (fmt.header) {
    header = rows.front();
    first = 1;
  }
  const auto text_col = column_index(header, fmt.text_column, fmt.header);
  const auto label_col = column_index(header, fmt.label_column, fmt.header);
  const auto cat_col = column_index(header, fmt.category_column, fmt.header);
  if (!text_col) throw ConfigError("corpus has no text column '" + fmt.text_column + "'");
  if (!label_col) throw ConfigError("corpus has no label column '" + fmt.label_column + "'");

  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    const std::size_t need = std::max({*text_col, *label_col, cat_col.value_or(0)}) + 1;
    if (row.size() < need) {
      out.malformed.push_back({lines[r], "expected at least " + std::to_string(need) + " fields, found " +
                                             std::to_string(row.size())});
      continue;
    }
    CorpusRecord rec;
    rec.text = row[*text_col];
    rec.label = row[*label_col];
    if (cat_col) rec.category = row[*cat_col];
    rec.line = lines[r];
    out.records.push_back(std::move(rec));
  }
  return out;
}

CorpusReadResult read_jsonl(const std::filesystem::path& path, const CorpusFormat& fmt) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  CorpusReadResult out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      out.malformed.push_back({lineno, "not a JSON object"});
      continue;
    }
    auto field = [&](const std::string& key) -> std::optional<std::string> {
      if (!obj.contains(key)) return std::nullopt;
      const auto& v = obj[key];
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      return std::nullopt;
    };
    auto text = field(fmt.text_column);
    auto label = field(fmt.label_column);
    if (!text || !label) {
      out.malformed.push_back({lineno, "missing '" + fmt.text_column + "' or '" + fmt.label_column + "'"});
      continue;
    }
    out.records.push_back({std::move(*text), std::move(*label), field(fmt.category_column).value_or(""), lineno});
  }
  return out;
}

}  // namespace

CorpusFormat CorpusFormat::for_path(const std::filesystem::path& path) {
  CorpusFormat fmt;
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson") {
    fmt.kind = Kind::jsonl;
  } else if (ext == ".tsv" || ext == ".tab") {
    fmt.delimiter = '\t';
  }
  return fmt;
}

std::vector<std::vector<std::string>> parse_delimited(const std::string& doc, char delimiter,
                                                      std::vector<std::size_t>* row_lines) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_open = false;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    rows.push_back(std::move(row));
    row.clear();
    if (row_lines) row_lines->push_back(row_line);
    row_open = false;
  };

  for (std::size_t i = 0; i < doc.size(); ++i) {
    const char c = doc[i];
    if (!row_open) {
      row_open = true;
      row_line = line;
    }
    if (quoted) {
      if (c == '"') {
        if (i + 1 < doc.size() && doc[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_row();
      ++line;
    } else {
      field.push_back(c);
    }
  }
  if (row_open) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    end_row();
  }
  return rows;
}

CorpusReadResult read_corpus(const std::filesystem::path& path, const CorpusFormat& format,
                             std::size_t max_malformed) {
  auto result = format.kind == CorpusFormat::Kind::jsonl ? read_jsonl(path, format) : read_delimited(path, format);
  if (result.malformed.size() > max_malformed) {
    const auto& first = result.malformed.front();
    throw DataError(path.string() + ": " + std::to_string(result.malformed.size()) +
                    " malformed rows exceed the limit of " + std::to_string(max_malformed) + " (first at line " +
                    std::to_string(first.line) + ": " + first.reason + ")");
  }
  return result;
}

}  // namespace sarv::text
