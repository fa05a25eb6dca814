#include "sarv/train/trainer.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sarv/errors.hpp"
#include "sarv/eval.hpp"
#include "sarv/nn/checkpoint.hpp"
#include "sarv/nn/layers.hpp"
#include "sarv/train/optim.hpp"
#include "sarv/train/sampling.hpp"

namespace sarv::train {
namespace {

constexpr std::uint64_t kShuffleSalt = 0xA24BAED4963EE407ULL;
constexpr std::uint64_t kRusSalt = 0x5851F42D4C957F2DULL;

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <typename Map, typename E>
std::string_view name_of(const Map& table, E value) {
  for (const auto& [v, n] : table) {
    if (v == value) return n;
  }
  return "?";
}

constexpr std::pair<OptimizerKind, std::string_view> kOptimizers[] = {{OptimizerKind::sgd, "sgd"},
                                                                      {OptimizerKind::adam, "adam"}};
constexpr std::pair<LrSchedule, std::string_view> kSchedules[] = {
    {LrSchedule::constant, "constant"}, {LrSchedule::exp_decay, "exp"}, {LrSchedule::plateau, "plateau"}};

void write_text(const std::filesystem::path& path, const std::string& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << s;
}

double accuracy_of(const EvalOutcome& o) {
  if (o.labels.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < o.labels.size(); ++i) hit += o.labels[i] == o.predictions[i];
  return static_cast<double>(hit) / static_cast<double>(o.labels.size());
}

std::vector<bool> rus_mask(const ShardManifest& train, std::size_t num_classes, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(train.total_records);
  ShardStream stream(train);
  while (auto shard = stream.next()) {
    for (const auto& r : shard->records) labels.push_back(r.label);
  }
  std::vector<bool> keep(labels.size(), false);
  for (auto i : undersample_indices(labels, num_classes, mix(seed, kRusSalt))) keep[i] = true;
  return keep;
}

template <typename T>
TrainResult run(models::ModelSpec spec, const TrainConfig& cfg, const ShardManifest& train, const ShardManifest* eval,
                const embed::EmbeddingTable& table, const std::filesystem::path& out_dir) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  if (cfg.dropout_rate) spec.dropout_rate = *cfg.dropout_rate;
  spec.validate();
  if (table.dim() != spec.embed_dim) {
    throw ConfigError("embedding dim " + std::to_string(table.dim()) + " differs from model embed_dim " +
                      std::to_string(spec.embed_dim));
  }
  if (train.total_records == 0) throw DataError("training manifest has no records");
  std::filesystem::create_directories(out_dir);

  const auto classes = static_cast<std::size_t>(spec.num_classes);
  models::Model<T> model(spec, cfg.seed);
  const auto params = model.parameters();

  std::optional<std::vector<bool>> keep;
  if (cfg.rus || spec.preset == models::Preset::char_w2v_lstm_rus) keep = rus_mask(train, classes, cfg.seed);

  TrainResult result;
  result.best_checkpoint = out_dir / "checkpoint.bin";
  result.last_checkpoint = out_dir / "last.bin";
  auto save = [&](const std::filesystem::path& path, std::size_t epoch) {
    nlohmann::json meta;
    meta["model"] = spec.to_json();
    meta["train"] = cfg.to_json();
    meta["epoch"] = epoch;
    return nn::save_checkpoint(nn::snapshot(params, meta), path);
  };

  AdamState adam;
  PlateauSchedule plateau(cfg.base_lr, cfg.plateau_factor, std::max<std::size_t>(cfg.plateau_patience, 1),
                          cfg.plateau_start_epoch);
  double epoch_lr = cfg.lr_schedule == LrSchedule::exp_decay ? cfg.exp_decay(0) : cfg.base_lr;
  std::size_t global_step = 0;
  double best_accuracy = -1.0;

  auto& report = result.report;
  report.best_checkpoint_sha256 = save(result.best_checkpoint, 0);

  std::vector<embed::EncodedSentence> pending;
  pending.reserve(cfg.batch_size);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.lr_schedule == LrSchedule::exp_decay && !cfg.exp_decay_per_batch) epoch_lr = cfg.exp_decay(epoch - 1);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    std::size_t batch_index = 0;

    auto step = [&] {
      auto batch = models::make_batch<T>(pending, table, spec.max_len);
      double loss = 0.0;
      try {
        model.zero_grad();
        auto probs = model.forward(batch, nn::Mode::train);
        auto targets = nn::one_hot<T>(batch.labels, classes);
        loss = nn::cross_entropy(probs, targets);
        model.backward(nn::softmax_cross_entropy_backward(probs, targets));
        const double lr = cfg.lr_schedule == LrSchedule::exp_decay && cfg.exp_decay_per_batch
                              ? cfg.exp_decay(global_step)
                              : (cfg.lr_schedule == LrSchedule::plateau ? plateau.lr() : epoch_lr);
        if (cfg.optimizer == OptimizerKind::sgd) {
          sgd_step(params, lr);
        } else {
          adam_step(params, lr, adam);
        }
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + " batch " + std::to_string(batch_index) + ": " + e.what());
      }
      loss_sum += loss * static_cast<double>(pending.size());
      seen += pending.size();
      ++batch_index;
      ++global_step;
      pending.clear();
    };

    ShardStream stream(train);
    std::size_t offset = 0;
    while (auto shard = stream.next()) {
      std::vector<std::size_t> order;
      order.reserve(shard->records.size());
      for (std::size_t i = 0; i < shard->records.size(); ++i) {
        if (!keep || (*keep)[offset + i]) order.push_back(i);
      }
      offset += shard->records.size();
      if (cfg.shuffle) {
        nn::Rng rng(mix(mix(cfg.seed, kShuffleSalt), epoch * 1000003ULL + shard->index()));
        seeded_shuffle(order.begin(), order.end(), rng);
      }
      for (auto i : order) {
        pending.push_back(shard->records[i]);
        if (pending.size() == cfg.batch_size) step();
      }
    }
    if (!pending.empty()) step();

    EpochStats row;
    row.epoch = epoch;
    row.learning_rate = cfg.lr_schedule == LrSchedule::plateau ? plateau.lr() : epoch_lr;
    row.train_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
    try {
      const auto on_train = evaluate(model, train, table, cfg.batch_size, keep ? &*keep : nullptr);
      row.train_accuracy = accuracy_of(on_train);
      // without a held-out manifest the training stream stands in for it
      const auto outcome = eval && eval->total_records > 0 ? evaluate(model, *eval, table, cfg.batch_size) : on_train;
      const auto m = eval::metrics(eval::confusion(outcome.predictions, outcome.labels, classes));
      row.eval_accuracy = m.accuracy;
      row.eval_macro_f1 = m.macro_f1;
    } catch (const NumericError& e) {
      throw NumericError("epoch " + std::to_string(epoch) + " evaluation: " + e.what());
    }
    report.epochs.push_back(row);

    if (cfg.lr_schedule == LrSchedule::plateau) plateau.observe(row.eval_accuracy);
    if (row.eval_accuracy > best_accuracy) {
      best_accuracy = row.eval_accuracy;
      report.best_epoch = epoch;
      report.best_checkpoint_sha256 = save(result.best_checkpoint, epoch);
    }
    if (cfg.stop_at_train_accuracy && row.train_accuracy >= *cfg.stop_at_train_accuracy) break;
  }

  report.last_checkpoint_sha256 = save(result.last_checkpoint, report.epochs.size());
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_text(out_dir / "report.jsonl", report.to_jsonl());
  write_text(out_dir / "report.txt", report.to_table());
  return result;
}

}  // namespace

TrainConfig TrainConfig::for_preset(models::Preset preset) {
  TrainConfig c;
  switch (preset) {
    case models::Preset::w2v_softmax:
      c.optimizer = OptimizerKind::sgd;
      c.base_lr = 0.003;
      c.lr_schedule = LrSchedule::constant;
      break;
    case models::Preset::w2v_mlp_sigmoid:
      c.lr_schedule = LrSchedule::plateau;
      break;
    case models::Preset::w2v_mlp_relu_lrdecay:
    case models::Preset::w2v_mlp_relu_lrdecay_dropout:
      c.lr_schedule = LrSchedule::exp_decay;
      c.base_lr = c.exp_decay(0);
      break;
    case models::Preset::w2v_lstm:
    case models::Preset::char_w2v_lstm:
      c.lr_schedule = LrSchedule::plateau;
      break;
    case models::Preset::char_w2v_lstm_rus:
      c.lr_schedule = LrSchedule::plateau;
      c.rus = true;
      break;
  }
  return c;
}

void TrainConfig::validate() const {
  if (!(base_lr > 0.0)) throw ConfigError("base_lr must be > 0");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (shard_size == 0) throw ConfigError("shard_size must be >= 1");
  if (dropout_rate && !(*dropout_rate >= 0.0 && *dropout_rate < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (!(plateau_factor > 0.0 && plateau_factor < 1.0)) throw ConfigError("plateau factor must be in (0, 1)");
  if (!(exp_decay.period > 0.0)) throw ConfigError("exp decay period must be > 0");
}

std::string_view optimizer_name(OptimizerKind k) { return name_of(kOptimizers, k); }

OptimizerKind parse_optimizer(std::string_view s) {
  for (const auto& [v, n] : kOptimizers) {
    if (n == s) return v;
  }
  throw ConfigError("unknown optimizer '" + std::string(s) + "'");
}

std::string_view schedule_name(LrSchedule s) { return name_of(kSchedules, s); }

LrSchedule parse_schedule(std::string_view s) {
  if (s == "exp_decay") return LrSchedule::exp_decay;
  for (const auto& [v, n] : kSchedules) {
    if (n == s) return v;
  }
  throw ConfigError("unknown lr schedule '" + std::string(s) + "' (constant|exp|plateau)");
}

std::string_view precision_name(nn::Precision p) { return p == nn::Precision::single ? "single" : "double"; }

nn::Precision parse_precision(std::string_view s) {
  if (s == "single") return nn::Precision::single;
  if (s == "double") return nn::Precision::double_;
  throw ConfigError("unknown precision '" + std::string(s) + "' (single|double)");
}

nlohmann::ordered_json TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["optimizer"] = optimizer_name(optimizer);
  j["base_lr"] = base_lr;
  j["lr_schedule"] = schedule_name(lr_schedule);
  j["exp_decay"] = {{"floor", exp_decay.floor}, {"amplitude", exp_decay.amplitude}, {"period", exp_decay.period}};
  j["exp_decay_per_batch"] = exp_decay_per_batch;
  j["plateau_factor"] = plateau_factor;
  j["plateau_patience"] = plateau_patience;
  j["plateau_start_epoch"] = plateau_start_epoch ? nlohmann::ordered_json(*plateau_start_epoch) : nullptr;
  j["batch_size"] = batch_size;
  j["epochs"] = epochs;
  j["dropout_rate"] = dropout_rate ? nlohmann::ordered_json(*dropout_rate) : nullptr;
  j["shard_size"] = shard_size;
  j["seed"] = seed;
  j["precision"] = precision_name(precision);
  j["rus"] = rus;
  j["shuffle"] = shuffle;
  j["stop_at_train_accuracy"] = stop_at_train_accuracy ? nlohmann::ordered_json(*stop_at_train_accuracy) : nullptr;
  return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  try {
    TrainConfig c;
    c.optimizer = parse_optimizer(j.value("optimizer", std::string(optimizer_name(c.optimizer))));
    c.base_lr = j.value("base_lr", c.base_lr);
    c.lr_schedule = parse_schedule(j.value("lr_schedule", std::string(schedule_name(c.lr_schedule))));
    if (j.contains("exp_decay")) {
      const auto& e = j["exp_decay"];
      c.exp_decay.floor = e.value("floor", c.exp_decay.floor);
      c.exp_decay.amplitude = e.value("amplitude", c.exp_decay.amplitude);
      c.exp_decay.period = e.value("period", c.exp_decay.period);
    }
    c.exp_decay_per_batch = j.value("exp_decay_per_batch", c.exp_decay_per_batch);
    c.plateau_factor = j.value("plateau_factor", c.plateau_factor);
    c.plateau_patience = j.value("plateau_patience", c.plateau_patience);
    if (j.contains("plateau_start_epoch") && !j["plateau_start_epoch"].is_null()) {
      c.plateau_start_epoch = j["plateau_start_epoch"].get<std::size_t>();
    }
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    if (j.contains("dropout_rate") && !j["dropout_rate"].is_null()) c.dropout_rate = j["dropout_rate"].get<double>();
    c.shard_size = j.value("shard_size", c.shard_size);
    c.seed = j.value("seed", c.seed);
    c.precision = parse_precision(j.value("precision", std::string("single")));
    c.rus = j.value("rus", c.rus);
    c.shuffle = j.value("shuffle", c.shuffle);
    if (j.contains("stop_at_train_accuracy") && !j["stop_at_train_accuracy"].is_null()) {
      c.stop_at_train_accuracy = j["stop_at_train_accuracy"].get<double>();
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
}

std::string TrainReport::to_table() const {
  std::ostringstream os;
  os << std::fixed;
  os << "epoch  train_loss  train_acc  eval_acc  eval_macro_f1  lr\n";
  for (const auto& e : epochs) {
    os << std::setw(5) << e.epoch << "  " << std::setprecision(6) << std::setw(10) << e.train_loss << "  "
       << std::setprecision(4) << std::setw(9) << e.train_accuracy << "  " << std::setw(8) << e.eval_accuracy << "  "
       << std::setw(13) << e.eval_macro_f1 << "  " << std::setprecision(8) << e.learning_rate << "\n";
  }
  os << "best epoch " << best_epoch << "\n";
  if (!last_checkpoint_sha256.empty()) os << "final checkpoint sha256 " << last_checkpoint_sha256 << "\n";
  os << "wall time " << std::setprecision(2) << wall_time_seconds << " s\n";
  return os.str();
}

std::string TrainReport::to_jsonl() const {
  std::string out;
  for (const auto& e : epochs) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["train_loss"] = e.train_loss;
    j["train_accuracy"] = e.train_accuracy;
    j["eval_accuracy"] = e.eval_accuracy;
    j["eval_macro_f1"] = e.eval_macro_f1;
    j["learning_rate"] = e.learning_rate;
    out += j.dump() + "\n";
  }
  nlohmann::ordered_json s;
  s["summary"] = true;
  s["epochs"] = epochs.size();
  s["best_epoch"] = best_epoch;
  s["best_checkpoint_sha256"] = best_checkpoint_sha256;
  s["last_checkpoint_sha256"] = last_checkpoint_sha256;
  out += s.dump() + "\n";
  return out;
}

template <typename T>
EvalOutcome evaluate(models::Model<T>& model, const ShardManifest& manifest, const embed::EmbeddingTable& table,
                     std::size_t batch_size, const std::vector<bool>* keep) {
  EvalOutcome out;
  const auto classes = static_cast<std::size_t>(model.spec().num_classes);
  std::vector<embed::EncodedSentence> pending;
  double loss_sum = 0.0;
  auto flush = [&] {
    auto batch = models::make_batch<T>(pending, table, model.spec().max_len);
    auto probs = model.forward(batch, nn::Mode::eval);
    loss_sum += nn::cross_entropy(probs, nn::one_hot<T>(batch.labels, classes)) * static_cast<double>(pending.size());
    for (const auto& p : models::predictions_from_probs(probs)) out.predictions.push_back(p.label);
    out.labels.insert(out.labels.end(), batch.labels.begin(), batch.labels.end());
    pending.clear();
  };
  ShardStream stream(manifest);
  std::size_t offset = 0;
  while (auto shard = stream.next()) {
    for (std::size_t i = 0; i < shard->records.size(); ++i) {
      if (keep && !(*keep)[offset + i]) continue;
      pending.push_back(shard->records[i]);
      if (pending.size() == batch_size) flush();
    }
    offset += shard->records.size();
  }
  if (!pending.empty()) flush();
  if (!out.labels.empty()) out.loss = loss_sum / static_cast<double>(out.labels.size());
  return out;
}

TrainResult train_loop(const models::ModelSpec& spec, const TrainConfig& cfg, const ShardManifest& train,
                       const ShardManifest* eval, const embed::EmbeddingTable& table,
                       const std::filesystem::path& out_dir) {
  if (cfg.precision == nn::Precision::double_) return run<double>(spec, cfg, train, eval, table, out_dir);
  return run<float>(spec, cfg, train, eval, table, out_dir);
}

template EvalOutcome evaluate(models::Model<float>&, const ShardManifest&, const embed::EmbeddingTable&, std::size_t,
                              const std::vector<bool>*);
template EvalOutcome evaluate(models::Model<double>&, const ShardManifest&, const embed::EmbeddingTable&, std::size_t,
                              const std::vector<bool>*);

}  // namespace sarv::train
