#pragma once

// Pipeline subcommands shared by the `sarv` executable and the tests.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarv/corpus.hpp"
#include "sarv/eval.hpp"
#include "sarv/models.hpp"
#include "sarv/textproc.hpp"
#include "sarv/train/trainer.hpp"

namespace sarv::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kDataError = 2, kNumericError = 3 };

struct Paths {
  std::filesystem::path corpus;
  std::filesystem::path embeddings;
  std::filesystem::path stopwords;   // empty: bundled list
  std::filesystem::path records;     // preprocess output dir; defaults to out_dir
  std::filesystem::path shard_dir;   // defaults to out_dir/shards
  std::filesystem::path checkpoint;  // defaults to out_dir/checkpoint.bin
  std::filesystem::path out_dir = ".";

  std::filesystem::path records_dir() const { return records.empty() ? out_dir : records; }
  std::filesystem::path shards() const { return shard_dir.empty() ? out_dir / "shards" : shard_dir; }
  std::filesystem::path checkpoint_file() const {
    return checkpoint.empty() ? out_dir / "checkpoint.bin" : checkpoint;
  }
  std::filesystem::path char_vocab_file() const { return records_dir() / "char_vocab.tsv"; }
};

struct CorpusColumns {
  std::string text = "text";
  std::string label = "label";
  std::string category = "category";
  std::optional<char> delimiter;  // inferred from the extension when unset
  bool header = true;
};

struct RunConfig {
  text::NormConfig norm;
  bool use_default_stopwords = true;  // ignored when paths.stopwords is set
  models::ModelSpec model;
  train::TrainConfig train;
  Paths paths;
  CorpusColumns columns;
  std::uint64_t seed = 0;
  double split = 0.8;
  std::size_t max_malformed = 1000;

  /// Structured sections: norm, corpus, model, train, paths, plus top-level seed/split.
  nlohmann::ordered_json to_json() const;
  /// Missing keys keep their defaults. Throws ConfigError.
  static RunConfig from_json(const nlohmann::json& j);

  static RunConfig load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

  /// Loads the stopword list into `norm` per `paths.stopwords` / `use_default_stopwords`.
  void resolve_stopwords();
  /// Copies the global seed into the train section and checks ranges. Throws ConfigError.
  void validate() const;
};

/// `SARV_SEED` when set; ConfigError when it is not an unsigned integer.
std::optional<std::uint64_t> seed_from_env();

struct PreprocessSummary {
  std::size_t rows = 0;
  std::size_t records = 0;
  std::vector<text::MalformedRow> malformed;
  double fraction_within_max_len = 0.0;
  text::LengthHistogram histogram;
};

/// Writes records.jsonl, char_vocab.tsv, histogram.tsv and preprocess.json into paths.records_dir().
PreprocessSummary cmd_preprocess(const RunConfig& cfg, std::ostream& log);

struct ShardSummary {
  train::ShardManifest train;
  train::ShardManifest test;
};

/// Splits records.jsonl and writes train/ and test/ shard directories under paths.shards().
ShardSummary cmd_shard(const RunConfig& cfg, std::ostream& log);

/// Trains on shards()/train, evaluating on shards()/test after each epoch.
train::TrainResult cmd_train(const RunConfig& cfg, std::ostream& log);

/// Evaluates a checkpoint against a shard manifest; writes eval.txt and eval.jsonl into out_dir.
eval::Metrics cmd_eval(const RunConfig& cfg, const std::filesystem::path& manifest, std::ostream& log);

struct LinePrediction {
  std::string label;
  std::vector<double> probs;
};

/// Raw text lines through normalize, encode and forward. One output line per input line.
std::vector<LinePrediction> cmd_predict(const RunConfig& cfg, std::istream& lines, std::ostream& out);

/// Per-category label counts of the corpus, delimited table with a Total row.
eval::CategoryStats cmd_stats(const RunConfig& cfg, std::ostream& out);

/// Maps an in-flight exception to an exit code and prints it to `err`.
int report_error(std::ostream& err);

}  // namespace sarv::cli
