#include "sarv/models.hpp"

#include <algorithm>
#include <cctype>

#include "sarv/errors.hpp"

namespace sarv::models {
namespace {

struct PresetInfo {
  Preset preset;
  std::string_view name;
};

constexpr PresetInfo kPresetNames[] = {
    {Preset::w2v_softmax, "W2V_SOFTMAX"},
    {Preset::w2v_mlp_sigmoid, "W2V_MLP_SIGMOID"},
    {Preset::w2v_mlp_relu_lrdecay, "W2V_MLP_RELU_LRDECAY"},
    {Preset::w2v_mlp_relu_lrdecay_dropout, "W2V_MLP_RELU_LRDECAY_DROPOUT"},
    {Preset::w2v_lstm, "W2V_LSTM"},
    {Preset::char_w2v_lstm_rus, "CHAR_W2V_LSTM_RUS"},
    {Preset::char_w2v_lstm, "CHAR_W2V_LSTM"},
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view preset_name(Preset p) {
  for (const auto& info : kPresetNames) {
    if (info.preset == p) return info.name;
  }
  throw ConfigError("unknown preset");
}

Preset parse_preset(std::string_view name) {
  const auto key = upper(name);
  for (const auto& info : kPresetNames) {
    if (info.name == key) return info.preset;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

bool is_mlp(Preset p) {
  return p == Preset::w2v_mlp_sigmoid || p == Preset::w2v_mlp_relu_lrdecay ||
         p == Preset::w2v_mlp_relu_lrdecay_dropout;
}

bool is_lstm(Preset p) { return p == Preset::w2v_lstm || uses_chars(p); }

bool uses_chars(Preset p) { return p == Preset::char_w2v_lstm || p == Preset::char_w2v_lstm_rus; }

ModelSpec ModelSpec::for_preset(Preset preset, int num_classes) {
  ModelSpec s;
  s.preset = preset;
  s.num_classes = num_classes;
  s.dropout_rate = preset == Preset::w2v_mlp_relu_lrdecay_dropout ? 0.25 : 0.0;
  return s;
}

void ModelSpec::validate() const {
  if (num_classes != 2 && num_classes != 3) throw ConfigError("num_classes must be 2 or 3");
  if (embed_dim == 0 || max_len == 0 || max_word_chars == 0) throw ConfigError("model sizes must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout_rate must be in [0, 1)");
  if (is_mlp(preset)) {
    if (hidden_sizes.empty()) throw ConfigError("MLP presets need at least one hidden size");
    if (std::find(hidden_sizes.begin(), hidden_sizes.end(), 0U) != hidden_sizes.end()) {
      throw ConfigError("hidden sizes must be >= 1");
    }
  }
  if (is_lstm(preset) && word_lstm_size == 0) throw ConfigError("word_lstm_size must be >= 1");
  if (uses_chars(preset) && (char_lstm_size == 0 || char_embed_size == 0)) {
    throw ConfigError("char_lstm_size and char_embed_size must be >= 1");
  }
}

nlohmann::ordered_json ModelSpec::to_json() const {
  nlohmann::ordered_json j;
  j["preset"] = preset_name(preset);
  j["num_classes"] = num_classes;
  j["hidden_sizes"] = hidden_sizes;
  j["word_lstm_size"] = word_lstm_size;
  j["char_lstm_size"] = char_lstm_size;
  j["char_embed_size"] = char_embed_size;
  j["char_vocab_size"] = char_vocab_size;
  j["dropout_rate"] = dropout_rate;
  j["embed_dim"] = embed_dim;
  j["max_len"] = max_len;
  j["max_word_chars"] = max_word_chars;
  return j;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  try {
    ModelSpec s = for_preset(parse_preset(j.at("preset").get<std::string>()), j.value("num_classes", 2));
    s.hidden_sizes = j.value("hidden_sizes", s.hidden_sizes);
    s.word_lstm_size = j.value("word_lstm_size", s.word_lstm_size);
    s.char_lstm_size = j.value("char_lstm_size", s.char_lstm_size);
    s.char_embed_size = j.value("char_embed_size", s.char_embed_size);
    s.char_vocab_size = j.value("char_vocab_size", s.char_vocab_size);
    s.dropout_rate = j.value("dropout_rate", s.dropout_rate);
    s.embed_dim = j.value("embed_dim", s.embed_dim);
    s.max_len = j.value("max_len", s.max_len);
    s.max_word_chars = j.value("max_word_chars", s.max_word_chars);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model spec: ") + e.what());
  }
}

LabelScheme LabelScheme::for_classes(int num_classes) {
  if (num_classes == 2) return {{"negative", "positive"}};
  if (num_classes == 3) return {{"negative", "neutral", "positive"}};
  throw ConfigError("num_classes must be 2 or 3");
}

std::optional<int> LabelScheme::parse(std::string_view label) const {
  const auto key = lower(label);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == key || std::to_string(i) == key) return static_cast<int>(i);
  }
  return std::nullopt;
}

template <typename T>
InputBatch<T> make_batch(std::span<const embed::EncodedSentence> records, const embed::EmbeddingTable& table,
                         std::size_t max_len) {
  InputBatch<T> b;
  const std::size_t dim = table.dim();
  b.words = nn::Tensor<T>({records.size(), max_len, dim});
  b.lengths.reserve(records.size());
  b.chars.reserve(records.size());
  b.labels.reserve(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.tokens.size() != max_len || rec.chars.size() != max_len || rec.true_length > max_len) {
      throw DimensionError("record " + std::to_string(r) + " does not have " + std::to_string(max_len) + " slots");
    }
    for (std::size_t t = 0; t < rec.true_length; ++t) {
      auto v = table.vector(rec.tokens[t]);
      T* dst = b.words.data() + (r * max_len + t) * dim;
      for (std::size_t k = 0; k < dim; ++k) dst[k] = static_cast<T>(v[k]);
    }
    b.lengths.push_back(std::max<std::size_t>(rec.true_length, 1));
    b.chars.push_back(rec.chars);
    b.labels.push_back(rec.label);
  }
  return b;
}

template <typename T>
Model<T>::Model(const ModelSpec& spec, std::uint64_t seed, Init init) : spec_(spec), dropout_rng_(seed ^ 0x9E3779B97F4A7C15ULL) {
  spec_.validate();
  nn::Rng rng(seed);
  const auto classes = static_cast<std::size_t>(spec_.num_classes);
  const std::size_t flat = spec_.max_len * spec_.embed_dim;

  if (uses_chars(spec_.preset)) {
    char_embed_.emplace("char_embed", spec_.char_vocab_size, spec_.char_embed_size);
    char_lstm_.emplace("char_lstm", spec_.char_embed_size, spec_.char_lstm_size);
  }
  if (is_lstm(spec_.preset)) {
    const std::size_t in = spec_.embed_dim + (uses_chars(spec_.preset) ? spec_.char_lstm_size : 0);
    word_lstm_.emplace("word_lstm", in, spec_.word_lstm_size);
    dense_.emplace_back("output", spec_.word_lstm_size, classes);
  } else if (is_mlp(spec_.preset)) {
    const auto kind = spec_.preset == Preset::w2v_mlp_sigmoid ? nn::ActivationKind::sigmoid : nn::ActivationKind::relu;
    std::size_t in = flat;
    for (std::size_t i = 0; i < spec_.hidden_sizes.size(); ++i) {
      dense_.emplace_back("hidden" + std::to_string(i), in, spec_.hidden_sizes[i]);
      activations_.emplace_back(kind);
      dropouts_.emplace_back(spec_.dropout_rate);
      in = spec_.hidden_sizes[i];
    }
    dense_.emplace_back("output", in, classes);
  } else {
    dense_.emplace_back("output", flat, classes);
  }

  if (init == Init::glorot) {
    if (char_embed_) char_embed_->init_glorot(rng);
    if (char_lstm_) char_lstm_->init(rng);
    if (word_lstm_) word_lstm_->init(rng);
    for (auto& d : dense_) d.init_glorot(rng);
  }
}

template <typename T>
nn::ParameterList<T> Model<T>::parameters() {
  nn::ParameterList<T> out;
  if (char_embed_) char_embed_->collect(out);
  if (char_lstm_) char_lstm_->collect(out);
  if (word_lstm_) word_lstm_->collect(out);
  for (auto& d : dense_) d.collect(out);
  return out;
}

template <typename T>
std::size_t Model<T>::parameter_count() {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->size();
  return n;
}

template <typename T>
void Model<T>::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

template <typename T>
std::vector<std::size_t> Model<T>::dense_layer_sizes() const {
  if (is_lstm(spec_.preset)) return {};
  std::vector<std::size_t> sizes{dense_.front().in_features()};
  for (const auto& d : dense_) sizes.push_back(d.out_features());
  return sizes;
}

template <typename T>
nn::Tensor<T> Model<T>::run_char_path(const InputBatch<T>& batch) {
  const std::size_t rows = batch.size();
  const std::size_t slots = spec_.max_len;
  const std::size_t width = spec_.char_lstm_size;
  batch_rows_ = rows;
  batch_slots_ = slots;
  char_slots_.clear();

  std::size_t longest = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t t = 0; t < batch.chars[r].size() && t < slots; ++t) {
      const auto n = std::min(batch.chars[r][t].size(), spec_.max_word_chars);
      if (n == 0) continue;
      char_slots_.emplace_back(r, t);
      longest = std::max(longest, n);
    }
  }

  nn::Tensor<T> features({rows, slots, width});
  if (char_slots_.empty()) return features;

  std::vector<embed::CharId> ids(char_slots_.size() * longest, 0);
  std::vector<std::size_t> lengths;
  lengths.reserve(char_slots_.size());
  for (std::size_t n = 0; n < char_slots_.size(); ++n) {
    const auto& seq = batch.chars[char_slots_[n].first][char_slots_[n].second];
    const auto len = std::min(seq.size(), spec_.max_word_chars);
    std::copy(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(len), ids.begin() + static_cast<std::ptrdiff_t>(n * longest));
    lengths.push_back(len);
  }
  auto embedded = char_embed_->forward(ids).reshaped({char_slots_.size(), longest, spec_.char_embed_size});
  auto word_features = char_lstm_->forward(embedded, lengths);
  for (std::size_t n = 0; n < char_slots_.size(); ++n) {
    const auto [r, t] = char_slots_[n];
    std::copy(word_features.data() + n * width, word_features.data() + (n + 1) * width,
              features.data() + (r * slots + t) * width);
  }
  return features;
}

template <typename T>
void Model<T>::backward_char_path(const nn::Tensor<T>& dseq) {
  if (char_slots_.empty()) return;
  const std::size_t width = spec_.char_lstm_size;
  const std::size_t in = word_lstm_->input_size();
  nn::Tensor<T> dfeat({char_slots_.size(), width});
  for (std::size_t n = 0; n < char_slots_.size(); ++n) {
    const auto [r, t] = char_slots_[n];
    const T* src = dseq.data() + (r * batch_slots_ + t) * in + spec_.embed_dim;
    std::copy(src, src + width, dfeat.data() + n * width);
  }
  auto dembedded = char_lstm_->backward(dfeat);
  const std::size_t steps = dembedded.size() / spec_.char_embed_size;
  char_embed_->backward(std::move(dembedded).reshaped({steps, spec_.char_embed_size}));
}

template <typename T>
nn::Tensor<T> Model<T>::logits(const InputBatch<T>& batch, nn::Mode mode) {
  const std::size_t rows = batch.size();
  if (rows == 0) throw ValidationError("forward: empty batch");
  nn::require_shape(batch.words.shape(), {rows, spec_.max_len, spec_.embed_dim}, "model input");

  nn::Tensor<T> out;
  if (word_lstm_) {
    nn::Tensor<T> seq;
    if (uses_chars(spec_.preset)) {
      if (batch.chars.size() != rows) throw DimensionError("char ids missing from batch");
      auto chars = run_char_path(batch);
      const std::size_t dw = spec_.embed_dim;
      const std::size_t dc = spec_.char_lstm_size;
      seq = nn::Tensor<T>({rows, spec_.max_len, dw + dc});
      for (std::size_t k = 0; k < rows * spec_.max_len; ++k) {
        std::copy(batch.words.data() + k * dw, batch.words.data() + (k + 1) * dw, seq.data() + k * (dw + dc));
        std::copy(chars.data() + k * dc, chars.data() + (k + 1) * dc, seq.data() + k * (dw + dc) + dw);
      }
    } else {
      seq = batch.words;
    }
    out = dense_.front().forward(word_lstm_->forward(seq, batch.lengths));
  } else {
    out = batch.words.reshaped({rows, spec_.max_len * spec_.embed_dim});
    for (std::size_t i = 0; i < activations_.size(); ++i) {
      out = activations_[i].forward(dense_[i].forward(out));
      out = dropouts_[i].forward(out, mode, dropout_rng_);
    }
    out = dense_.back().forward(out);
  }
  if (logit_shift_ != T{0}) {
    for (auto& v : out.values()) v += logit_shift_;
  }
  return out;
}

template <typename T>
nn::Tensor<T> Model<T>::forward(const InputBatch<T>& batch, nn::Mode mode) {
  return nn::softmax(logits(batch, mode));
}

template <typename T>
void Model<T>::backward(const nn::Tensor<T>& dlogits) {
  if (word_lstm_) {
    auto dseq = word_lstm_->backward(dense_.front().backward(dlogits));
    if (uses_chars(spec_.preset)) backward_char_path(dseq);
    return;
  }
  auto d = dense_.back().backward(dlogits);
  for (std::size_t i = activations_.size(); i-- > 0;) {
    d = dense_[i].backward(activations_[i].backward(dropouts_[i].backward(d)));
  }
}

template <typename T>
std::vector<Prediction> predictions_from_probs(const nn::Tensor<T>& probs) {
  std::vector<Prediction> out;
  const std::size_t cols = probs.dim(1);
  for (std::size_t r = 0; r < probs.dim(0); ++r) {
    Prediction p;
    p.probs.reserve(cols);
    for (std::size_t c = 0; c < cols; ++c) {
      p.probs.push_back(static_cast<double>(probs(r, c)));
      if (probs(r, c) > probs(r, static_cast<std::size_t>(p.label))) p.label = static_cast<int>(c);
    }
    out.push_back(std::move(p));
  }
  return out;
}

template <typename T>
std::vector<Prediction> predict(Model<T>& model, const InputBatch<T>& batch) {
  return predictions_from_probs(model.forward(batch, nn::Mode::eval));
}

#define SARV_INSTANTIATE_MODELS(T)                                                                          \
  template InputBatch<T> make_batch<T>(std::span<const embed::EncodedSentence>, const embed::EmbeddingTable&, \
                                       std::size_t);                                                         \
  template class Model<T>;                                                                                  \
  template std::vector<Prediction> predictions_from_probs(const nn::Tensor<T>&);                            \
  template std::vector<Prediction> predict(Model<T>&, const InputBatch<T>&);

SARV_INSTANTIATE_MODELS(float)
SARV_INSTANTIATE_MODELS(double)
SARV_INSTANTIATE_MODELS(long double)

}  // namespace sarv::models
