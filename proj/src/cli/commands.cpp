#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sarv/cli.hpp"
#include "sarv/corpus.hpp"
#include "sarv/embed.hpp"
#include "sarv/errors.hpp"
#include "sarv/hash.hpp"
#include "sarv/eval.hpp"
#include "sarv/nn/checkpoint.hpp"
#include "sarv/train/sampling.hpp"
#include "sarv/train/shards.hpp"

namespace sarv::cli {
namespace {

constexpr const char* kRecordsFile = "records.jsonl";
constexpr const char* kPreprocessInfo = "preprocess.json";
constexpr const char* kResolvedConfig = "run_config.json";

void write_text(const std::filesystem::path& path, const std::string& s) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << s;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError(path.string() + " is not valid JSON");
  return j;
}

void require_file(const std::filesystem::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string("missing ") + what + " path");
  if (!std::filesystem::exists(p)) throw DataError(std::string(what) + " not found: " + p.string());
}

text::CorpusFormat corpus_format(const RunConfig& cfg) {
  auto fmt = text::CorpusFormat::for_path(cfg.paths.corpus);
  fmt.text_column = cfg.columns.text;
  fmt.label_column = cfg.columns.label;
  fmt.category_column = cfg.columns.category;
  if (cfg.columns.delimiter) fmt.delimiter = *cfg.columns.delimiter;
  fmt.header = cfg.columns.header;
  return fmt;
}

embed::EmbeddingTable load_table(const RunConfig& cfg, std::ostream& log) {
  require_file(cfg.paths.embeddings, "embeddings");
  auto loaded = embed::load_embeddings(cfg.paths.embeddings, cfg.model.embed_dim);
  if (loaded.skipped) log << "warning: skipped " << loaded.skipped << " malformed embedding lines\n";
  return std::move(loaded.table);
}

/// Labelled corpus rows; rows with unknown labels join the malformed list.
struct LabelledCorpus {
  std::vector<text::CorpusRecord> records;
  std::vector<int> labels;
  std::vector<text::MalformedRow> malformed;
  std::size_t rows = 0;
};

LabelledCorpus read_labelled(const RunConfig& cfg, std::ostream& log) {
  require_file(cfg.paths.corpus, "corpus");
  auto read = text::read_corpus(cfg.paths.corpus, corpus_format(cfg), cfg.max_malformed);
  const auto scheme = models::LabelScheme::for_classes(cfg.model.num_classes);
  LabelledCorpus out;
  out.rows = read.records.size() + read.malformed.size();
  out.malformed = std::move(read.malformed);
  for (auto& r : read.records) {
    const auto label = scheme.parse(r.label);
    if (!label) {
      out.malformed.push_back({r.line, "unknown label '" + r.label + "'"});
      continue;
    }
    out.labels.push_back(*label);
    out.records.push_back(std::move(r));
  }
  std::sort(out.malformed.begin(), out.malformed.end(),
            [](const auto& a, const auto& b) { return a.line < b.line; });
  for (const auto& m : out.malformed) log << "line " << m.line << ": " << m.reason << "\n";
  if (out.malformed.size() > cfg.max_malformed) {
    throw DataError(std::to_string(out.malformed.size()) + " malformed rows exceed the limit of " +
                    std::to_string(cfg.max_malformed));
  }
  return out;
}

train::ShardManifest load_manifest_checked(const std::filesystem::path& dir, const embed::EmbeddingTable& table) {
  auto m = train::ShardManifest::load(dir);
  if (m.provenance.vocab_hash != table.hash()) {
    throw DataError("shards in " + m.dir.string() + " were encoded with embeddings " + m.provenance.vocab_hash +
                    " but the loaded table hashes to " + table.hash());
  }
  return m;
}

template <typename T>
models::Model<T> model_from_checkpoint(const nn::Checkpoint& ckpt) {
  if (!ckpt.metadata.contains("model")) throw nn::CheckpointMismatch("checkpoint carries no model spec");
  models::Model<T> model(models::ModelSpec::from_json(ckpt.metadata["model"]));
  nn::restore(ckpt, model.parameters());
  return model;
}

template <typename T>
eval::Metrics eval_with(const nn::Checkpoint& ckpt, const train::ShardManifest& manifest,
                        const embed::EmbeddingTable& table, std::size_t batch_size) {
  auto model = model_from_checkpoint<T>(ckpt);
  const auto& spec = model.spec();
  if (manifest.provenance.num_classes != static_cast<std::size_t>(spec.num_classes)) {
    throw nn::CheckpointMismatch("checkpoint has " + std::to_string(spec.num_classes) + " classes; shards have " +
                                 std::to_string(manifest.provenance.num_classes));
  }
  const auto outcome = train::evaluate(model, manifest, table, batch_size);
  const auto names = models::LabelScheme::for_classes(spec.num_classes).classes;
  return eval::metrics(eval::confusion(outcome.predictions, outcome.labels, names.size(), names));
}

template <typename T>
std::vector<LinePrediction> predict_with(const nn::Checkpoint& ckpt, const RunConfig& cfg,
                                         const embed::EmbeddingTable& table, const std::vector<std::string>& lines,
                                         std::ostream& out) {
  auto model = model_from_checkpoint<T>(ckpt);
  const auto& spec = model.spec();
  embed::CharVocab vocab(spec.max_word_chars);
  if (models::uses_chars(spec.preset)) {
    vocab = embed::CharVocab::load(cfg.paths.char_vocab_file(), spec.max_word_chars);
    if (vocab.size() != spec.char_vocab_size) {
      throw nn::CheckpointMismatch("char vocabulary mismatch\nexpected: char_embed [" +
                                   std::to_string(spec.char_vocab_size) + " x " +
                                   std::to_string(spec.char_embed_size) + "]\nfound: " +
                                   cfg.paths.char_vocab_file().string() + " with " + std::to_string(vocab.size()) +
                                   " characters");
    }
  }
  if (table.dim() != spec.embed_dim) {
    throw nn::CheckpointMismatch("embedding width mismatch\nexpected: " + std::to_string(spec.embed_dim) +
                                 "\nfound: " + std::to_string(table.dim()));
  }
  const auto scheme = models::LabelScheme::for_classes(spec.num_classes);
  std::vector<embed::EncodedSentence> encoded;
  encoded.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string norm;
    try {
      norm = text::normalize(lines[i], cfg.norm);
    } catch (const DecodeError& e) {
      throw DataError("input line " + std::to_string(i + 1) + ": " + e.what());
    }
    const auto fixed = text::unify_length(text::tokenize(norm), spec.max_len);
    encoded.push_back(embed::encode_sentence(fixed, table, vocab, 0));
  }
  std::vector<LinePrediction> result;
  constexpr std::size_t kChunk = 256;
  out << std::fixed << std::setprecision(6);
  for (std::size_t start = 0; start < encoded.size(); start += kChunk) {
    const auto n = std::min(kChunk, encoded.size() - start);
    const auto batch =
        models::make_batch<T>(std::span(encoded).subspan(start, n), table, spec.max_len);
    for (auto& p : models::predict(model, batch)) {
      out << scheme.name(p.label);
      for (double q : p.probs) out << '\t' << q;
      out << '\n';
      result.push_back({scheme.name(p.label), std::move(p.probs)});
    }
  }
  return result;
}

}  // namespace

PreprocessSummary cmd_preprocess(const RunConfig& in_cfg, std::ostream& log) {
  RunConfig cfg = in_cfg;
  cfg.resolve_stopwords();
  const auto dir = cfg.paths.records_dir();
  std::filesystem::create_directories(dir);
  cfg.save(dir / kResolvedConfig);

  auto corpus = read_labelled(cfg, log);
  const auto table = load_table(cfg, log);

  PreprocessSummary summary;
  summary.rows = corpus.rows;
  std::vector<text::FixedSentence> fixed;
  std::vector<int> labels;
  std::vector<text::TokenSeq> kept_tokens;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& r = corpus.records[i];
    std::string norm;
    try {
      norm = text::normalize(r.text, cfg.norm);
    } catch (const DecodeError& e) {
      corpus.malformed.push_back({r.line, e.what()});
      log << "line " << r.line << ": " << e.what() << "\n";
      continue;
    }
    auto seq = text::tokenize(norm, std::to_string(r.line));
    summary.histogram.add(seq);
    auto f = text::unify_length(seq, cfg.model.max_len);
    seq.tokens.assign(f.tokens.begin(), f.tokens.begin() + static_cast<std::ptrdiff_t>(f.true_length));
    kept_tokens.push_back(std::move(seq));
    fixed.push_back(std::move(f));
    labels.push_back(corpus.labels[i]);
  }
  if (corpus.malformed.size() > cfg.max_malformed) {
    throw DataError(std::to_string(corpus.malformed.size()) + " malformed rows exceed the limit of " +
                    std::to_string(cfg.max_malformed));
  }
  const auto vocab = embed::build_char_vocab(kept_tokens, cfg.model.max_word_chars);

  std::string records;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    records += train::encode_record(embed::encode_sentence(fixed[i], table, vocab, labels[i]));
    records += '\n';
  }
  write_text(dir / kRecordsFile, records);
  vocab.save(dir / "char_vocab.tsv");
  write_text(dir / "histogram.tsv", summary.histogram.to_tsv());

  summary.records = fixed.size();
  summary.malformed = corpus.malformed;
  summary.fraction_within_max_len = summary.histogram.cumulative(cfg.model.max_len);

  nlohmann::ordered_json info;
  info["rows"] = summary.rows;
  info["records"] = summary.records;
  info["num_classes"] = cfg.model.num_classes;
  info["max_len"] = cfg.model.max_len;
  info["fraction_within_max_len"] = summary.fraction_within_max_len;
  info["vocab_hash"] = table.hash();
  info["char_vocab_hash"] = sha256_hex(vocab.serialize());
  info["config_hash"] = cfg.norm.hash();
  info["malformed"] = nlohmann::ordered_json::array();
  for (const auto& m : summary.malformed) info["malformed"].push_back({{"line", m.line}, {"reason", m.reason}});
  write_text(dir / kPreprocessInfo, info.dump(2) + "\n");

  if (summary.records == 0) log << "warning: corpus produced no records\n";
  log << "records: " << summary.records << " of " << summary.rows << " rows (" << summary.malformed.size()
      << " malformed)\n";
  log << "fraction with <= " << cfg.model.max_len << " tokens: " << std::fixed << std::setprecision(4)
      << summary.fraction_within_max_len << "\n";
  log.unsetf(std::ios::floatfield);
  return summary;
}

ShardSummary cmd_shard(const RunConfig& cfg, std::ostream& log) {
  const auto dir = cfg.paths.records_dir();
  const auto info = read_json(dir / kPreprocessInfo);
  std::ifstream in(dir / kRecordsFile, std::ios::binary);
  if (!in) throw DataError("cannot read " + (dir / kRecordsFile).string());
  std::vector<embed::EncodedSentence> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(train::decode_record(line));
  }
  if (records.empty()) throw DataError("no records to shard in " + (dir / kRecordsFile).string());

  train::ShardProvenance prov;
  prov.split_seed = cfg.seed;
  prov.num_classes = info.at("num_classes").get<std::size_t>();
  prov.vocab_hash = info.at("vocab_hash").get<std::string>();
  prov.char_vocab_hash = info.at("char_vocab_hash").get<std::string>();
  prov.config_hash = info.at("config_hash").get<std::string>();

  auto [tr, te] = train::split_train_test(std::move(records), cfg.split, cfg.seed);
  const auto root = cfg.paths.shards();
  for (const char* sub : {"train", "test"}) std::filesystem::remove_all(root / sub);
  ShardSummary s{train::write_shards(tr, cfg.train.shard_size, root / "train", prov),
                 train::write_shards(te, cfg.train.shard_size, root / "test", prov)};
  cfg.save(root / kResolvedConfig);
  log << "train: " << s.train.total_records << " records in " << s.train.shards.size() << " shards\n";
  log << "test: " << s.test.total_records << " records in " << s.test.shards.size() << " shards\n";
  return s;
}

train::TrainResult cmd_train(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto table = load_table(cfg, log);
  const auto root = cfg.paths.shards();
  const auto train_m = load_manifest_checked(root / "train", table);
  std::optional<train::ShardManifest> test_m;
  if (std::filesystem::exists(root / "test" / train::kManifestName)) {
    test_m = load_manifest_checked(root / "test", table);
    if (test_m->total_records == 0) test_m.reset();
  }
  auto spec = cfg.model;
  if (train_m.provenance.num_classes != static_cast<std::size_t>(spec.num_classes)) {
    throw ConfigError("model has " + std::to_string(spec.num_classes) + " classes but shards were built for " +
                      std::to_string(train_m.provenance.num_classes));
  }
  if (models::uses_chars(spec.preset)) {
    spec.char_vocab_size = embed::CharVocab::load(cfg.paths.char_vocab_file(), spec.max_word_chars).size();
  }
  std::filesystem::create_directories(cfg.paths.out_dir);
  cfg.save(cfg.paths.out_dir / kResolvedConfig);
  auto result = train::train_loop(spec, cfg.train, train_m, test_m ? &*test_m : nullptr, table, cfg.paths.out_dir);
  log << result.report.to_table();
  return result;
}

eval::Metrics cmd_eval(const RunConfig& cfg, const std::filesystem::path& manifest_path, std::ostream& log) {
  const auto ckpt = nn::load_checkpoint(cfg.paths.checkpoint_file());
  const auto table = load_table(cfg, log);
  const auto manifest = load_manifest_checked(manifest_path, table);
  const auto m = ckpt.precision == nn::Precision::double_
                     ? eval_with<double>(ckpt, manifest, table, cfg.train.batch_size)
                     : eval_with<float>(ckpt, manifest, table, cfg.train.batch_size);
  const auto names =
      models::LabelScheme::for_classes(ckpt.metadata["model"].value("num_classes", 2)).classes;
  std::filesystem::create_directories(cfg.paths.out_dir);
  write_text(cfg.paths.out_dir / "eval.txt", m.to_table(names));
  write_text(cfg.paths.out_dir / "eval.jsonl", m.to_jsonl(names));
  log << m.to_table(names);
  return m;
}

std::vector<LinePrediction> cmd_predict(const RunConfig& in_cfg, std::istream& input, std::ostream& out) {
  RunConfig cfg = in_cfg;
  cfg.resolve_stopwords();
  const auto ckpt = nn::load_checkpoint(cfg.paths.checkpoint_file());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(input, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  std::ostringstream quiet;
  const auto table = load_table(cfg, quiet);
  return ckpt.precision == nn::Precision::double_ ? predict_with<double>(ckpt, cfg, table, lines, out)
                                                  : predict_with<float>(ckpt, cfg, table, lines, out);
}

eval::CategoryStats cmd_stats(const RunConfig& cfg, std::ostream& out) {
  std::ostringstream log;
  const auto corpus = read_labelled(cfg, log);
  // columns follow the usual reporting order: positive, negative, then neutral
  const auto scheme = models::LabelScheme::for_classes(cfg.model.num_classes);
  std::vector<std::string> order = {"positive", "negative"};
  if (scheme.size() == 3) order.push_back("neutral");
  std::vector<int> column(scheme.size());
  for (std::size_t c = 0; c < order.size(); ++c) column[*scheme.parse(order[c])] = static_cast<int>(c);
  eval::CategoryStats stats(order);
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    stats.add(corpus.records[i].category, column[corpus.labels[i]]);
  }
  out << stats.to_delimited('\t');
  return stats;
}

int report_error(std::ostream& err) {
  try {
    throw;
  } catch (const nn::CheckpointMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DimensionError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace sarv::cli
