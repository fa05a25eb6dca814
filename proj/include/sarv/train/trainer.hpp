#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarv/embed.hpp"
#include "sarv/models.hpp"
#include "sarv/nn/tensor.hpp"
#include "sarv/train/schedule.hpp"
#include "sarv/train/shards.hpp"

namespace sarv::train {

enum class OptimizerKind { sgd, adam };
enum class LrSchedule { constant, exp_decay, plateau };

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::adam;
  double base_lr = 0.001;
  LrSchedule lr_schedule = LrSchedule::constant;
  ExpDecay exp_decay;
  bool exp_decay_per_batch = false;  // default: `step` counts completed epochs
  double plateau_factor = 0.9;
  std::size_t plateau_patience = 27;
  std::optional<std::size_t> plateau_start_epoch;  // alternative reading of the 27-epoch rule
  std::size_t batch_size = 512;
  std::size_t epochs = 20;
  std::optional<double> dropout_rate;  // overrides ModelSpec::dropout_rate when set
  std::size_t shard_size = kDefaultShardSize;
  std::uint64_t seed = 0;
  nn::Precision precision = nn::Precision::single;
  bool rus = false;  // under-sample the training stream (always on for the RUS preset)
  bool shuffle = true;
  std::optional<double> stop_at_train_accuracy;

  /// Per-preset defaults: SGD at 0.003 for the softmax baseline, Adam at 0.001 otherwise;
  /// plateau decay for the sigmoid MLP and LSTM presets, exponential decay for the ReLU MLPs.
  static TrainConfig for_preset(models::Preset preset);

  /// Throws ConfigError on invalid values.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

std::string_view optimizer_name(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view s);
std::string_view schedule_name(LrSchedule s);
/// Accepts constant | exp | exp_decay | plateau.
LrSchedule parse_schedule(std::string_view s);
std::string_view precision_name(nn::Precision p);
nn::Precision parse_precision(std::string_view s);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double eval_accuracy = 0.0;
  double eval_macro_f1 = 0.0;
  double learning_rate = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
  std::string best_checkpoint_sha256;
  std::string last_checkpoint_sha256;
  double wall_time_seconds = 0.0;  // not part of the serialized report

  std::string to_table() const;
  /// One JSON object per epoch, then a summary line. Deterministic for a fixed seed.
  std::string to_jsonl() const;
};

struct TrainResult {
  TrainReport report;
  std::filesystem::path best_checkpoint;
  std::filesystem::path last_checkpoint;
};

/// Streams the training shards for `cfg.epochs` epochs, evaluates on `eval`
/// (or on the training stream when null) after each epoch, and writes
/// `checkpoint.bin` (best eval accuracy), `last.bin`, `report.jsonl` and
/// `report.txt` into `out_dir`. Throws NumericError on a non-finite loss.
TrainResult train_loop(const models::ModelSpec& spec, const TrainConfig& cfg, const ShardManifest& train,
                       const ShardManifest* eval, const embed::EmbeddingTable& table,
                       const std::filesystem::path& out_dir);

/// Eval-mode pass over a shard stream.
struct EvalOutcome {
  std::vector<int> predictions;
  std::vector<int> labels;
  double loss = 0.0;
};

template <typename T>
EvalOutcome evaluate(models::Model<T>& model, const ShardManifest& manifest, const embed::EmbeddingTable& table,
                     std::size_t batch_size, const std::vector<bool>* keep = nullptr);

}  // namespace sarv::train
