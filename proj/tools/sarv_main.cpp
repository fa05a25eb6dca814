// sarv: command-line front end for the sentiment pipeline.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sarv/cli.hpp"
#include "sarv/errors.hpp"

namespace {

struct Flags {
  std::optional<std::string> corpus, embeddings, stopwords, config, preset, lr_schedule, precision, out_dir;
  std::optional<std::string> records, shards, checkpoint;
  std::optional<int> classes;
  std::optional<std::size_t> epochs, batch_size, shard_size;
  std::optional<double> lr, dropout, split;
  std::optional<std::uint64_t> seed;
  bool rus = false;
};

sarv::cli::RunConfig resolve(const Flags& f) {
  using sarv::cli::RunConfig;
  nlohmann::json j = nlohmann::json::object();
  if (f.config) {
    std::ifstream in(*f.config);
    if (!in) throw sarv::ConfigError("cannot read config " + *f.config);
    j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw sarv::ConfigError("config " + *f.config + " is not valid JSON");
  }
  if (!j.contains("seed")) {
    if (auto env = sarv::cli::seed_from_env()) j["seed"] = *env;
  }
  if (f.seed) j["seed"] = *f.seed;
  if (f.preset) {
    const auto wanted = std::string(sarv::models::preset_name(sarv::models::parse_preset(*f.preset)));
    const bool same = j.contains("model") && j["model"].value("preset", "") == wanted;
    if (!same) {
      // a different preset brings its own model and training defaults
      const int classes = j.contains("model") ? j["model"].value("num_classes", 2) : 2;
      j["model"] = {{"preset", wanted}, {"num_classes", classes}};
      j.erase("train");
    }
  }
  if (f.classes) j["model"]["num_classes"] = *f.classes;
  auto& t = j["train"];
  if (t.is_null()) t = nlohmann::json::object();
  if (f.epochs) t["epochs"] = *f.epochs;
  if (f.batch_size) t["batch_size"] = *f.batch_size;
  if (f.shard_size) t["shard_size"] = *f.shard_size;
  if (f.lr) t["base_lr"] = *f.lr;
  if (f.lr_schedule) t["lr_schedule"] = *f.lr_schedule;
  if (f.precision) t["precision"] = *f.precision;
  if (f.rus) t["rus"] = true;
  if (f.dropout) {
    t["dropout_rate"] = *f.dropout;
    j["model"]["dropout_rate"] = *f.dropout;
  }
  if (f.split) j["split"] = *f.split;
  auto& p = j["paths"];
  if (p.is_null()) p = nlohmann::json::object();
  auto set = [&](const char* key, const std::optional<std::string>& v) {
    if (v) p[key] = *v;
  };
  set("corpus", f.corpus);
  set("embeddings", f.embeddings);
  set("stopwords", f.stopwords);
  set("records", f.records);
  set("shard_dir", f.shards);
  set("checkpoint", f.checkpoint);
  set("out_dir", f.out_dir);
  return RunConfig::from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persian review sentiment pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--corpus", f.corpus, "Corpus file (.csv, .tsv, .jsonl)");
  app.add_option("--embeddings", f.embeddings, "GloVe-format text vectors");
  app.add_option("--stopwords", f.stopwords, "Stopword file, one word per line");
  app.add_option("--config", f.config, "JSON run config");
  app.add_option("--preset", f.preset, "Model preset, e.g. W2V_LSTM");
  app.add_option("--classes", f.classes, "Label scheme size")->check(CLI::IsMember({2, 3}));
  app.add_option("--epochs", f.epochs);
  app.add_option("--batch-size", f.batch_size);
  app.add_option("--lr", f.lr, "Base learning rate");
  app.add_option("--lr-schedule", f.lr_schedule)->check(CLI::IsMember({"constant", "exp", "plateau"}));
  app.add_option("--dropout", f.dropout);
  app.add_option("--shard-size", f.shard_size);
  app.add_option("--split", f.split, "Training fraction");
  app.add_option("--seed", f.seed, "Global seed (falls back to SARV_SEED)");
  app.add_flag("--rus", f.rus, "Under-sample the training stream");
  app.add_option("--precision", f.precision)->check(CLI::IsMember({"single", "double"}));
  app.add_option("--out-dir", f.out_dir);
  app.add_option("--records", f.records, "Preprocess output directory (default: out-dir)");
  app.add_option("--shards", f.shards, "Shard root directory (default: out-dir/shards)");
  app.add_option("--checkpoint", f.checkpoint, "Checkpoint file (default: out-dir/checkpoint.bin)");

  auto* preprocess = app.add_subcommand("preprocess", "Normalize, tokenize and encode a corpus");
  auto* shard = app.add_subcommand("shard", "Split encoded records and write shards");
  auto* train = app.add_subcommand("train", "Train a preset on the shards");
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a shard manifest");
  std::string manifest;
  eval->add_option("--manifest", manifest, "Manifest file or directory (default: shards/test)");
  auto* predict = app.add_subcommand("predict", "Label raw text lines");
  std::string input = "-";
  predict->add_option("--input", input, "Text file, one review per line ('-' for stdin)");
  auto* stats = app.add_subcommand("stats", "Per-category label counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sarv::cli::kConfigError;
  }

  try {
    const auto cfg = resolve(f);
    if (preprocess->parsed()) {
      sarv::cli::cmd_preprocess(cfg, std::cerr);
    } else if (shard->parsed()) {
      sarv::cli::cmd_shard(cfg, std::cerr);
    } else if (train->parsed()) {
      sarv::cli::cmd_train(cfg, std::cout);
    } else if (eval->parsed()) {
      sarv::cli::cmd_eval(cfg, manifest.empty() ? cfg.paths.shards() / "test" : std::filesystem::path(manifest),
                          std::cout);
    } else if (predict->parsed()) {
      if (input == "-") {
        sarv::cli::cmd_predict(cfg, std::cin, std::cout);
      } else {
        std::ifstream in(input);
        if (!in) throw sarv::DataError("cannot read " + input);
        sarv::cli::cmd_predict(cfg, in, std::cout);
      }
    } else if (stats->parsed()) {
      sarv::cli::cmd_stats(cfg, std::cout);
    }
  } catch (...) {
    return sarv::cli::report_error(std::cerr);
  }
  return sarv::cli::kOk;
}
