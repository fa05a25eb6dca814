#pragma once

// Confusion-matrix metrics and per-category dataset statistics.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sarv::eval {

/// counts[t][p]: records with true class t predicted as p.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes = 2, std::vector<std::string> class_names = {});

  std::size_t num_classes() const noexcept { return n_; }
  std::uint64_t& at(std::size_t truth, std::size_t pred) { return counts_[truth * n_ + pred]; }
  std::uint64_t at(std::size_t truth, std::size_t pred) const { return counts_[truth * n_ + pred]; }
  std::uint64_t total() const;
  const std::vector<std::string>& class_names() const noexcept { return names_; }

  /// Throws ValidationError on an out-of-range label.
  void add(int truth, int pred);
  /// Elementwise sum; class counts must agree.
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::string> names_;
};

/// Throws ValidationError on length mismatch, empty input, or labels outside [0, num_classes).
ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth, std::size_t num_classes,
                          std::vector<std::string> class_names = {});

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;    // true count (row sum)
  bool zero_division = false;   // precision or recall had an empty denominator
  bool absent = false;          // class never appears in truth or predictions
};

struct Metrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  std::vector<ClassMetrics> per_class;

  /// Fixed-width text table.
  std::string to_table(const std::vector<std::string>& class_names) const;
  /// One JSON object per line: a summary line, then one line per class.
  std::string to_jsonl(const std::vector<std::string>& class_names) const;
};

/// Precision/recall over an empty set is 0 and flagged; requires total() > 0.
Metrics metrics(const ConfusionMatrix& cm);

/// Table of class counts per category, in the column order of `class_names`.
class CategoryStats {
 public:
  explicit CategoryStats(std::vector<std::string> class_names) : names_(std::move(class_names)) {}

  void add(const std::string& category, int label);
  const std::map<std::string, std::vector<std::uint64_t>>& rows() const noexcept { return rows_; }
  std::vector<std::uint64_t> totals() const;
  const std::vector<std::string>& class_names() const noexcept { return names_; }
  bool empty() const noexcept { return rows_.empty(); }

  /// Delimited text: header `Category<d>class...`, one row per category, then `Total`.
  std::string to_delimited(char delimiter = '\t') const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::vector<std::uint64_t>> rows_;
};

struct CategoryRecord {
  std::string category;
  int label = 0;
};

CategoryStats category_stats(std::span<const CategoryRecord> records, std::vector<std::string> class_names);

}  // namespace sarv::eval
