#include "sarv/train/shards.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "sarv/errors.hpp"
#include "sarv/hash.hpp"

namespace sarv::train {
namespace {

constexpr int kManifestVersion = 1;

std::string shard_file_name(std::size_t index) {
  std::ostringstream os;
  os << "shard-" << std::setw(5) << std::setfill('0') << index << ".jsonl";
  return os.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing shard " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace

std::string encode_record(const embed::EncodedSentence& rec) {
  std::string s = "{\"t\":[";
  for (std::size_t i = 0; i < rec.tokens.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(rec.tokens[i]);
  }
  s += "],\"c\":[";
  for (std::size_t i = 0; i < rec.chars.size(); ++i) {
    if (i) s += ',';
    s += '[';
    for (std::size_t k = 0; k < rec.chars[i].size(); ++k) {
      if (k) s += ',';
      s += std::to_string(rec.chars[i][k]);
    }
    s += ']';
  }
  s += "],\"len\":" + std::to_string(rec.true_length) + ",\"y\":" + std::to_string(rec.label) + "}";
  return s;
}

embed::EncodedSentence decode_record(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("record is not a JSON object");
  try {
    embed::EncodedSentence rec;
    rec.tokens = j.at("t").get<std::vector<embed::WordId>>();
    rec.chars = j.at("c").get<std::vector<std::vector<embed::CharId>>>();
    rec.true_length = j.at("len").get<std::size_t>();
    rec.label = j.at("y").get<int>();
    if (rec.tokens.size() != rec.chars.size() || rec.true_length > rec.tokens.size()) {
      throw DataError("record slot counts disagree");
    }
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad record: ") + e.what());
  }
}

nlohmann::ordered_json ShardManifest::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "sarv-shards";
  j["version"] = kManifestVersion;
  j["shard_size"] = shard_size;
  j["total_records"] = total_records;
  j["split_seed"] = provenance.split_seed;
  j["num_classes"] = provenance.num_classes;
  j["class_histogram"] = class_histogram;
  j["vocab_hash"] = provenance.vocab_hash;
  j["char_vocab_hash"] = provenance.char_vocab_hash;
  j["config_hash"] = provenance.config_hash;
  j["shards"] = nlohmann::ordered_json::array();
  for (const auto& s : shards) {
    j["shards"].push_back({{"path", s.path}, {"records", s.records}, {"sha256", s.sha256}});
  }
  return j;
}

ShardManifest ShardManifest::from_json(const nlohmann::json& j, std::filesystem::path dir) {
  try {
    if (j.at("format").get<std::string>() != "sarv-shards") throw DataError("not a shard manifest");
    if (j.at("version").get<int>() != kManifestVersion) throw DataError("unsupported shard manifest version");
    ShardManifest m;
    m.dir = std::move(dir);
    m.shard_size = j.at("shard_size").get<std::size_t>();
    m.total_records = j.at("total_records").get<std::size_t>();
    m.provenance.split_seed = j.at("split_seed").get<std::uint64_t>();
    m.provenance.num_classes = j.at("num_classes").get<std::size_t>();
    m.provenance.vocab_hash = j.at("vocab_hash").get<std::string>();
    m.provenance.char_vocab_hash = j.at("char_vocab_hash").get<std::string>();
    m.provenance.config_hash = j.at("config_hash").get<std::string>();
    m.class_histogram = j.at("class_histogram").get<std::vector<std::size_t>>();
    for (const auto& s : j.at("shards")) {
      m.shards.push_back({s.at("path").get<std::string>(), s.at("records").get<std::size_t>(),
                          s.at("sha256").get<std::string>()});
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad shard manifest: ") + e.what());
  }
}

void ShardManifest::save() const {
  std::filesystem::create_directories(dir);
  write_file(manifest_path(), to_json().dump(2) + "\n");
}

ShardManifest ShardManifest::load(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / kManifestName : path;
  std::ifstream in(file);
  if (!in) throw DataError("cannot read shard manifest " + file.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError("corrupt shard manifest " + file.string());
  return from_json(j, file.parent_path());
}

std::string ShardManifest::hash() const { return sha256_hex(to_json().dump()); }

void ShardManifest::validate() const {
  if (shard_size == 0) throw DataError("shard_size must be >= 1");
  std::size_t sum = 0;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    sum += shards[i].records;
    const bool last = i + 1 == shards.size();
    if ((!last && shards[i].records != shard_size) || shards[i].records == 0 || shards[i].records > shard_size) {
      throw DataError("shard " + shards[i].path + " holds " + std::to_string(shards[i].records) +
                      " records; expected " + std::to_string(shard_size));
    }
  }
  if (sum != total_records) {
    throw DataError("shard counts sum to " + std::to_string(sum) + " but total_records is " +
                    std::to_string(total_records));
  }
  std::size_t hist = 0;
  for (auto c : class_histogram) hist += c;
  if (hist != total_records) throw DataError("class histogram does not sum to total_records");
}

ShardManifest write_shards(std::span<const embed::EncodedSentence> records, std::size_t shard_size,
                           const std::filesystem::path& out_dir, const ShardProvenance& provenance) {
  if (shard_size == 0) throw ValidationError("shard_size must be >= 1");
  std::filesystem::create_directories(out_dir);
  ShardManifest m;
  m.dir = out_dir;
  m.shard_size = shard_size;
  m.total_records = records.size();
  m.provenance = provenance;
  m.class_histogram.assign(provenance.num_classes, 0);
  for (std::size_t start = 0, index = 0; start < records.size(); start += shard_size, ++index) {
    const std::size_t end = std::min(records.size(), start + shard_size);
    std::string bytes;
    for (std::size_t i = start; i < end; ++i) {
      const auto label = records[i].label;
      if (label < 0) throw ValidationError("negative label in record " + std::to_string(i));
      if (static_cast<std::size_t>(label) >= m.class_histogram.size()) m.class_histogram.resize(label + 1, 0);
      ++m.class_histogram[static_cast<std::size_t>(label)];
      bytes += encode_record(records[i]);
      bytes += '\n';
    }
    const auto name = shard_file_name(index);
    write_file(out_dir / name, bytes);
    m.shards.push_back({name, end - start, sha256_hex(bytes)});
  }
  m.save();
  return m;
}

void ResidencyCounter::acquire() {
  std::lock_guard lock(mu_);
  ++current_;
  peak_ = std::max(peak_, current_);
}

void ResidencyCounter::release() {
  std::lock_guard lock(mu_);
  --current_;
}

std::size_t ResidencyCounter::current() const {
  std::lock_guard lock(mu_);
  return current_;
}

std::size_t ResidencyCounter::peak() const {
  std::lock_guard lock(mu_);
  return peak_;
}

Shard::Shard(std::size_t index, std::shared_ptr<ResidencyCounter> counter)
    : index_(index), counter_(std::move(counter)) {
  if (counter_) counter_->acquire();
}

Shard::~Shard() {
  if (counter_) counter_->release();
}

Shard::Shard(Shard&& other) noexcept
    : records(std::move(other.records)), index_(other.index_), counter_(std::move(other.counter_)) {}

Shard& Shard::operator=(Shard&& other) noexcept {
  if (this != &other) {
    if (counter_) counter_->release();
    records = std::move(other.records);
    index_ = other.index_;
    counter_ = std::move(other.counter_);
  }
  return *this;
}

Shard load_shard(const ShardManifest& manifest, std::size_t index, std::shared_ptr<ResidencyCounter> counter) {
  const auto& info = manifest.shards.at(index);
  const auto path = manifest.dir / info.path;
  Shard shard(index, std::move(counter));
  const std::string bytes = read_file(path);
  const std::string digest = sha256_hex(bytes);
  if (digest != info.sha256) {
    throw DataError("corrupt shard " + path.string() + ": hash " + digest + " does not match manifest " + info.sha256);
  }
  shard.records.reserve(info.records);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) end = bytes.size();
    try {
      shard.records.push_back(decode_record(std::string_view(bytes).substr(pos, end - pos)));
    } catch (const DataError& e) {
      throw DataError(path.string() + " record " + std::to_string(shard.records.size() + 1) + ": " + e.what());
    }
    pos = end + 1;
  }
  if (shard.records.size() != info.records) {
    throw DataError("shard " + path.string() + " holds " + std::to_string(shard.records.size()) +
                    " records; manifest says " + std::to_string(info.records));
  }
  return shard;
}

ShardStream::ShardStream(const ShardManifest& manifest, bool prefetch)
    : manifest_(manifest), prefetch_(prefetch), counter_(std::make_shared<ResidencyCounter>()) {
  if (prefetch_) worker_ = std::thread([this] { produce(); });
}

ShardStream::~ShardStream() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

void ShardStream::produce() {
  for (std::size_t i = 0; i <= manifest_.shards.size(); ++i) {
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [this] { return !slot_filled_ || stop_; });
      if (stop_) return;
    }
    if (i == manifest_.shards.size()) {
      std::lock_guard lock(mu_);
      slot_filled_ = true;  // end marker: filled with an empty slot
      cv_.notify_all();
      return;
    }
    try {
      Shard s = load_shard(manifest_, i, counter_);
      std::lock_guard lock(mu_);
      slot_.emplace(std::move(s));
      slot_filled_ = true;
    } catch (...) {
      std::lock_guard lock(mu_);
      error_ = std::current_exception();
      slot_filled_ = true;
      cv_.notify_all();
      return;
    }
    cv_.notify_all();
  }
}

std::optional<Shard> ShardStream::next() {
  if (!prefetch_) {
    if (next_index_ >= manifest_.shards.size()) return std::nullopt;
    return load_shard(manifest_, next_index_++, counter_);
  }
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return slot_filled_; });
  if (error_) std::rethrow_exception(error_);
  if (!slot_) return std::nullopt;
  std::optional<Shard> out(std::move(slot_));
  slot_.reset();
  slot_filled_ = false;
  lock.unlock();
  cv_.notify_all();
  return out;
}

std::vector<embed::EncodedSentence> load_shards(const ShardManifest& manifest) {
  std::vector<embed::EncodedSentence> all;
  all.reserve(manifest.total_records);
  ShardStream stream(manifest);
  while (auto shard = stream.next()) {
    std::move(shard->records.begin(), shard->records.end(), std::back_inserter(all));
  }
  return all;
}

}  // namespace sarv::train
