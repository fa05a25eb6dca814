#pragma once

// On-disk record shards: line-delimited JSON records plus a manifest with
// counts, class histogram, provenance hashes and one SHA-256 per shard.

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sarv/embed.hpp"

namespace sarv::train {

inline constexpr std::size_t kDefaultShardSize = 200000;
inline constexpr const char* kManifestName = "manifest.json";

/// `{"t":[ids],"c":[[ids],...],"len":n,"y":k}` without a trailing newline.
std::string encode_record(const embed::EncodedSentence& rec);
/// Throws DataError on malformed input.
embed::EncodedSentence decode_record(std::string_view line);

struct ShardInfo {
  std::string path;  // relative to the manifest directory
  std::size_t records = 0;
  std::string sha256;
};

struct ShardProvenance {
  std::uint64_t split_seed = 0;
  std::size_t num_classes = 2;
  std::string vocab_hash;
  std::string char_vocab_hash;
  std::string config_hash;
};

struct ShardManifest {
  std::filesystem::path dir;  // where the manifest lives; not serialized
  std::size_t shard_size = kDefaultShardSize;
  std::size_t total_records = 0;
  ShardProvenance provenance;
  std::vector<std::size_t> class_histogram;
  std::vector<ShardInfo> shards;

  nlohmann::ordered_json to_json() const;
  static ShardManifest from_json(const nlohmann::json& j, std::filesystem::path dir);

  void save() const;
  /// Accepts the manifest file or its directory.
  static ShardManifest load(const std::filesystem::path& path);
  std::filesystem::path manifest_path() const { return dir / kManifestName; }

  /// Digest of the serialized manifest.
  std::string hash() const;
  /// Throws DataError if counts are inconsistent.
  void validate() const;
};

ShardManifest write_shards(std::span<const embed::EncodedSentence> records, std::size_t shard_size,
                           const std::filesystem::path& out_dir, const ShardProvenance& provenance = {});

/// Tracks how many shard buffers are alive at once.
class ResidencyCounter {
 public:
  void acquire();
  void release();
  std::size_t current() const;
  std::size_t peak() const;

 private:
  mutable std::mutex mu_;
  std::size_t current_ = 0;
  std::size_t peak_ = 0;
};

/// Records of one shard; counted against its stream's residency while alive.
class Shard {
 public:
  Shard(std::size_t index, std::shared_ptr<ResidencyCounter> counter);
  ~Shard();
  Shard(Shard&& other) noexcept;
  Shard& operator=(Shard&& other) noexcept;
  Shard(const Shard&) = delete;
  Shard& operator=(const Shard&) = delete;

  std::size_t index() const noexcept { return index_; }
  std::vector<embed::EncodedSentence> records;

 private:
  std::size_t index_;
  std::shared_ptr<ResidencyCounter> counter_;
};

/// Reads one shard from disk after verifying its hash (DataError names the path).
Shard load_shard(const ShardManifest& manifest, std::size_t index, std::shared_ptr<ResidencyCounter> counter = nullptr);

/// Sequential shard reader. With prefetch, a background thread loads shard k+1
/// while the caller works on shard k; it never starts a load while a finished
/// shard is still waiting, so at most two shards are resident.
class ShardStream {
 public:
  explicit ShardStream(const ShardManifest& manifest, bool prefetch = true);
  ~ShardStream();
  ShardStream(const ShardStream&) = delete;
  ShardStream& operator=(const ShardStream&) = delete;

  /// Next shard in manifest order, or nullopt at the end. Rethrows loader errors.
  std::optional<Shard> next();
  std::size_t peak_resident() const { return counter_->peak(); }

 private:
  void produce();

  const ShardManifest& manifest_;
  bool prefetch_;
  std::size_t next_index_ = 0;
  std::shared_ptr<ResidencyCounter> counter_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::optional<Shard> slot_;
  std::exception_ptr error_;
  bool slot_filled_ = false;
  bool stop_ = false;
  std::thread worker_;
};

/// Every record of every shard, in order.
std::vector<embed::EncodedSentence> load_shards(const ShardManifest& manifest);

}  // namespace sarv::train
