#include <cstdlib>
#include <fstream>

#include <unicode/unistr.h>

#include "sarv/cli.hpp"
#include "sarv/embed.hpp"
#include "sarv/errors.hpp"

namespace sarv::cli {
namespace {

std::string to_utf8(const std::u32string& s) {
  std::string out;
  icu::UnicodeString::fromUTF32(reinterpret_cast<const UChar32*>(s.data()), static_cast<int32_t>(s.size()))
      .toUTF8String(out);
  return out;
}

template <typename J>
std::filesystem::path path_of(const J& j, const char* key, const std::filesystem::path& fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  return std::filesystem::path(j[key].template get<std::string>());
}

}  // namespace

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["split"] = split;
  j["max_malformed"] = max_malformed;
  j["norm"] = {{"strip_punctuation", norm.strip_punctuation},
               {"strip_digits_and_foreign_letters", norm.strip_digits_and_foreign_letters},
               {"unicode_persian_fold", norm.unicode_persian_fold},
               {"extra_strip_chars", to_utf8(norm.extra_strip_chars)},
               {"default_stopwords", use_default_stopwords}};
  j["corpus"] = {{"text_column", columns.text},
                 {"label_column", columns.label},
                 {"category_column", columns.category},
                 {"delimiter", columns.delimiter ? nlohmann::ordered_json(std::string(1, *columns.delimiter))
                                                 : nlohmann::ordered_json(nullptr)},
                 {"header", columns.header}};
  j["model"] = model.to_json();
  auto t = train.to_json();
  t.erase("seed");
  j["train"] = std::move(t);
  j["paths"] = {{"corpus", paths.corpus.string()},         {"embeddings", paths.embeddings.string()},
                {"stopwords", paths.stopwords.string()},   {"records", paths.records.string()},
                {"shard_dir", paths.shard_dir.string()},   {"checkpoint", paths.checkpoint.string()},
                {"out_dir", paths.out_dir.string()}};
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    RunConfig c;
    c.seed = j.value("seed", c.seed);
    c.split = j.value("split", c.split);
    c.max_malformed = j.value("max_malformed", c.max_malformed);

    if (j.contains("norm")) {
      const auto& n = j["norm"];
      c.norm.strip_punctuation = n.value("strip_punctuation", c.norm.strip_punctuation);
      c.norm.strip_digits_and_foreign_letters =
          n.value("strip_digits_and_foreign_letters", c.norm.strip_digits_and_foreign_letters);
      c.norm.unicode_persian_fold = n.value("unicode_persian_fold", c.norm.unicode_persian_fold);
      c.norm.extra_strip_chars = embed::to_code_points(n.value("extra_strip_chars", std::string()));
      c.use_default_stopwords = n.value("default_stopwords", c.use_default_stopwords);
    }
    if (j.contains("corpus")) {
      const auto& k = j["corpus"];
      c.columns.text = k.value("text_column", c.columns.text);
      c.columns.label = k.value("label_column", c.columns.label);
      c.columns.category = k.value("category_column", c.columns.category);
      if (k.contains("delimiter") && !k["delimiter"].is_null()) {
        const auto d = k["delimiter"].get<std::string>();
        if (d.size() != 1) throw ConfigError("corpus.delimiter must be a single character");
        c.columns.delimiter = d[0];
      }
      c.columns.header = k.value("header", c.columns.header);
    }

    nlohmann::json model = j.value("model", nlohmann::json::object());
    if (!model.contains("preset")) model["preset"] = std::string(models::preset_name(c.model.preset));
    c.model = models::ModelSpec::from_json(model);

    // train keys fall back to the preset's defaults, not the global ones
    nlohmann::json train = c.train.for_preset(c.model.preset).to_json();
    if (j.contains("train")) train.update(j["train"]);
    train["seed"] = c.seed;
    c.train = train::TrainConfig::from_json(train);

    if (j.contains("paths")) {
      const auto& p = j["paths"];
      c.paths.corpus = path_of(p, "corpus", c.paths.corpus);
      c.paths.embeddings = path_of(p, "embeddings", c.paths.embeddings);
      c.paths.stopwords = path_of(p, "stopwords", c.paths.stopwords);
      c.paths.records = path_of(p, "records", c.paths.records);
      c.paths.shard_dir = path_of(p, "shard_dir", c.paths.shard_dir);
      c.paths.checkpoint = path_of(p, "checkpoint", c.paths.checkpoint);
      c.paths.out_dir = path_of(p, "out_dir", c.paths.out_dir);
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config " + file.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config " + file.string() + " is not valid JSON");
  return from_json(j);
}

void RunConfig::save(const std::filesystem::path& file) const {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write " + file.string());
  out << to_json().dump(2) << "\n";
}

void RunConfig::resolve_stopwords() {
  if (!paths.stopwords.empty()) {
    norm.set_stopwords(text::read_stopword_file(paths.stopwords));
  } else if (use_default_stopwords) {
    norm.set_stopwords(text::default_stopwords());
  } else {
    norm.set_stopwords({});
  }
}

void RunConfig::validate() const {
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must be in (0, 1)");
  model.validate();
  train.validate();
  if (train.seed != seed) throw ConfigError("train seed differs from the global seed");
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("SARV_SEED");
  if (!raw || !*raw) return std::nullopt;
  char* end = nullptr;
  const auto v = std::strtoull(raw, &end, 10);
  if (*end != '\0') throw ConfigError(std::string("SARV_SEED is not an unsigned integer: ") + raw);
  return v;
}

}  // namespace sarv::cli
