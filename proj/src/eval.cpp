#include "sarv/eval.hpp"

#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "sarv/errors.hpp"

namespace sarv::eval {
namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& zero) {
  if (den == 0) {
    zero = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string class_label(const std::vector<std::string>& names, std::size_t c) {
  return c < names.size() ? names[c] : std::to_string(c);
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes, std::vector<std::string> class_names)
    : n_(num_classes), counts_(num_classes * num_classes, 0), names_(std::move(class_names)) {
  if (num_classes == 0) throw ValidationError("confusion matrix needs at least one class");
}

std::uint64_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

void ConfusionMatrix::add(int truth, int pred) {
  if (truth < 0 || pred < 0 || static_cast<std::size_t>(truth) >= n_ || static_cast<std::size_t>(pred) >= n_) {
    throw ValidationError("label pair (" + std::to_string(truth) + ", " + std::to_string(pred) + ") outside [0, " +
                          std::to_string(n_) + ")");
  }
  ++at(static_cast<std::size_t>(truth), static_cast<std::size_t>(pred));
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.n_ != n_) throw DimensionError("cannot merge confusion matrices of different class counts");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth, std::size_t num_classes,
                          std::vector<std::string> class_names) {
  if (preds.size() != truth.size()) {
    throw ValidationError("confusion: " + std::to_string(preds.size()) + " predictions vs " +
                          std::to_string(truth.size()) + " labels");
  }
  if (preds.empty()) throw ValidationError("confusion: no records");
  ConfusionMatrix cm(num_classes, std::move(class_names));
  for (std::size_t i = 0; i < preds.size(); ++i) cm.add(truth[i], preds[i]);
  return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
  const std::size_t n = cm.num_classes();
  const std::uint64_t total = cm.total();
  if (total == 0) throw ValidationError("metrics: empty confusion matrix");
  Metrics m;
  std::uint64_t trace = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::uint64_t row = 0;
    std::uint64_t col = 0;
    for (std::size_t k = 0; k < n; ++k) {
      row += cm.at(c, k);
      col += cm.at(k, c);
    }
    const std::uint64_t diag = cm.at(c, c);
    trace += diag;
    ClassMetrics cls;
    cls.support = row;
    cls.absent = row == 0 && col == 0;
    cls.precision = ratio(diag, col, cls.zero_division);
    cls.recall = ratio(diag, row, cls.zero_division);
    const double denom = cls.precision + cls.recall;
    cls.f1 = denom > 0.0 ? 2.0 * cls.precision * cls.recall / denom : 0.0;
    m.macro_f1 += cls.f1;
    m.weighted_f1 += cls.f1 * static_cast<double>(row);
    m.per_class.push_back(cls);
  }
  m.macro_f1 /= static_cast<double>(n);
  m.weighted_f1 /= static_cast<double>(total);
  m.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  return m;
}

std::string Metrics::to_table(const std::vector<std::string>& class_names) const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "accuracy     " << accuracy << "\nmacro F1     " << macro_f1 << "\nweighted F1  " << weighted_f1 << "\n\n";
  os << std::left << std::setw(12) << "class" << std::right << std::setw(11) << "precision" << std::setw(9)
     << "recall" << std::setw(9) << "F1" << std::setw(9) << "support" << "\n";
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    const auto& cls = per_class[c];
    os << std::left << std::setw(12) << class_label(class_names, c) << std::right << std::setw(11) << cls.precision
       << std::setw(9) << cls.recall << std::setw(9) << cls.f1 << std::setw(9) << cls.support;
    if (cls.absent) {
      os << "  (absent)";
    } else if (cls.zero_division) {
      os << "  (zero division)";
    }
    os << "\n";
  }
  return os.str();
}

std::string Metrics::to_jsonl(const std::vector<std::string>& class_names) const {
  std::string out;
  nlohmann::ordered_json summary;
  summary["kind"] = "summary";
  summary["accuracy"] = accuracy;
  summary["macro_f1"] = macro_f1;
  summary["weighted_f1"] = weighted_f1;
  out += summary.dump() + "\n";
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    const auto& cls = per_class[c];
    nlohmann::ordered_json j;
    j["kind"] = "class";
    j["class"] = class_label(class_names, c);
    j["precision"] = cls.precision;
    j["recall"] = cls.recall;
    j["f1"] = cls.f1;
    j["support"] = cls.support;
    j["zero_division"] = cls.zero_division;
    j["absent"] = cls.absent;
    out += j.dump() + "\n";
  }
  return out;
}

void CategoryStats::add(const std::string& category, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= names_.size()) {
    throw ValidationError("category_stats: label " + std::to_string(label) + " outside the class list");
  }
  auto& row = rows_[category];
  row.resize(names_.size(), 0);
  ++row[static_cast<std::size_t>(label)];
}

std::vector<std::uint64_t> CategoryStats::totals() const {
  std::vector<std::uint64_t> t(names_.size(), 0);
  for (const auto& [cat, row] : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) t[c] += row[c];
  }
  return t;
}

std::string CategoryStats::to_delimited(char delimiter) const {
  std::ostringstream os;
  os << "Category";
  for (const auto& n : names_) os << delimiter << n;
  os << "\n";
  for (const auto& [cat, row] : rows_) {
    os << cat;
    for (auto v : row) os << delimiter << v;
    os << "\n";
  }
  if (!rows_.empty()) {
    os << "Total";
    for (auto v : totals()) os << delimiter << v;
    os << "\n";
  }
  return os.str();
}

CategoryStats category_stats(std::span<const CategoryRecord> records, std::vector<std::string> class_names) {
  CategoryStats stats(std::move(class_names));
  for (const auto& r : records) stats.add(r.category, r.label);
  return stats;
}

}  // namespace sarv::eval
