#pragma once

// The seven sentiment classifier architectures and their forward/predict paths.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sarv/embed.hpp"
#include "sarv/nn/layers.hpp"
#include "sarv/nn/lstm.hpp"
#include "sarv/nn/tensor.hpp"

namespace sarv::models {

enum class Preset {
  w2v_softmax,
  w2v_mlp_sigmoid,
  w2v_mlp_relu_lrdecay,
  w2v_mlp_relu_lrdecay_dropout,
  w2v_lstm,
  char_w2v_lstm_rus,
  char_w2v_lstm,
};

inline constexpr Preset kAllPresets[] = {
    Preset::w2v_softmax,          Preset::w2v_mlp_sigmoid,   Preset::w2v_mlp_relu_lrdecay,
    Preset::w2v_mlp_relu_lrdecay_dropout, Preset::w2v_lstm, Preset::char_w2v_lstm_rus,
    Preset::char_w2v_lstm,
};

/// Canonical upper-case name, e.g. "CHAR_W2V_LSTM".
std::string_view preset_name(Preset p);
/// Case-insensitive; throws ConfigError for unknown names.
Preset parse_preset(std::string_view name);

bool is_mlp(Preset p);
bool is_lstm(Preset p);
bool uses_chars(Preset p);

struct ModelSpec {
  Preset preset = Preset::w2v_softmax;
  int num_classes = 2;
  std::vector<std::size_t> hidden_sizes = {200, 100, 60, 30};
  std::size_t word_lstm_size = 100;
  std::size_t char_lstm_size = 50;
  std::size_t char_embed_size = 16;
  std::size_t char_vocab_size = 0;  // ids 1..char_vocab_size
  double dropout_rate = 0.0;
  std::size_t embed_dim = embed::kDefaultDim;
  std::size_t max_len = text::kMaxLen;
  std::size_t max_word_chars = embed::kMaxWordChars;

  /// Defaults for a preset (dropout 0.25 for the dropout preset, 0 otherwise).
  static ModelSpec for_preset(Preset preset, int num_classes = 2);

  /// Throws ConfigError on any out-of-range field.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);

  bool operator==(const ModelSpec&) const = default;
};

/// Ordered class names; one-hot encoding with class i at column i.
struct LabelScheme {
  std::vector<std::string> classes;

  /// 2 -> {negative, positive}; 3 -> {negative, neutral, positive}.
  static LabelScheme for_classes(int num_classes);

  std::size_t size() const noexcept { return classes.size(); }
  /// Accepts a class name (case-insensitive) or its index; nullopt when not in the scheme.
  std::optional<int> parse(std::string_view label) const;
  const std::string& name(int index) const { return classes.at(static_cast<std::size_t>(index)); }
};

/// A batch in model-ready layout.
template <typename T>
struct InputBatch {
  nn::Tensor<T> words;                                       // [B x max_len x embed_dim]
  std::vector<std::size_t> lengths;                          // true lengths clamped to >= 1
  std::vector<std::vector<std::vector<embed::CharId>>> chars;  // [B][slot] ids
  std::vector<int> labels;

  std::size_t size() const noexcept { return lengths.size(); }
};

template <typename T>
InputBatch<T> make_batch(std::span<const embed::EncodedSentence> records, const embed::EmbeddingTable& table,
                         std::size_t max_len = text::kMaxLen);

enum class Init { glorot, zero };

template <typename T>
class Model {
 public:
  explicit Model(const ModelSpec& spec, std::uint64_t seed = 0, Init init = Init::glorot);

  const ModelSpec& spec() const noexcept { return spec_; }

  /// Fixed order: char embedding, char LSTM, word LSTM, dense layers input to output.
  nn::ParameterList<T> parameters();
  std::size_t parameter_count();
  void zero_grad();

  /// Pre-softmax scores, [B x C].
  nn::Tensor<T> logits(const InputBatch<T>& batch, nn::Mode mode);
  /// Row-stochastic [B x C].
  nn::Tensor<T> forward(const InputBatch<T>& batch, nn::Mode mode);
  /// Backpropagates d loss / d logits through the last forward call.
  void backward(const nn::Tensor<T>& dlogits);

  /// Resets the RNG that draws dropout masks.
  void reseed_dropout(std::uint64_t seed) { dropout_rng_.seed(seed); }

  /// Test hook: constant added to every logit before softmax.
  void set_logit_shift(T shift) { logit_shift_ = shift; }

  /// Layer widths of the flattened MLP path, input to output (empty for LSTM presets).
  std::vector<std::size_t> dense_layer_sizes() const;
  std::size_t word_lstm_input_size() const { return word_lstm_ ? word_lstm_->input_size() : 0; }

 private:
  nn::Tensor<T> run_char_path(const InputBatch<T>& batch);
  void backward_char_path(const nn::Tensor<T>& dseq);

  ModelSpec spec_;
  std::optional<nn::Embedding<T>> char_embed_;
  std::optional<nn::Lstm<T>> char_lstm_;
  std::optional<nn::Lstm<T>> word_lstm_;
  std::vector<nn::Dense<T>> dense_;
  std::vector<nn::Activation<T>> activations_;
  std::vector<nn::Dropout<T>> dropouts_;
  nn::Rng dropout_rng_;
  T logit_shift_{0};

  // char path bookkeeping from the last forward
  std::vector<std::pair<std::size_t, std::size_t>> char_slots_;  // (row, slot) of each char sequence
  std::size_t batch_rows_ = 0;
  std::size_t batch_slots_ = 0;
};

struct Prediction {
  int label = 0;
  std::vector<double> probs;
};

/// Argmax per row; ties go to the lowest class index.
template <typename T>
std::vector<Prediction> predictions_from_probs(const nn::Tensor<T>& probs);

template <typename T>
std::vector<Prediction> predict(Model<T>& model, const InputBatch<T>& batch);

}  // namespace sarv::models
