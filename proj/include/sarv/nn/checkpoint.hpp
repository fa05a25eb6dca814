#pragma once

// Versioned parameter container.
//
// Binary layout (all integers and floats little-endian):
//   "SARVCKPT"  u32 version  u32 value_bytes (4|8)  u32 count
//   count x { u32 name_len, name bytes, u32 rank, u64 dims[rank], values[prod(dims)] }
// A JSON manifest next to it (`<stem>.manifest.json`) lists names, shapes, the
// precision, the SHA-256 of the binary file, and free-form metadata.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarv/errors.hpp"
#include "sarv/nn/tensor.hpp"

namespace sarv::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Shape shape;
  std::vector<double> values;
};

struct Checkpoint {
  Precision precision = Precision::single;
  std::vector<NamedTensor> tensors;
  nlohmann::json metadata = nlohmann::json::object();
};

/// Thrown when stored shapes or names disagree with a model; what() carries the full diff.
class CheckpointMismatch : public DataError {
 public:
  using DataError::DataError;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& bin);

template <typename T>
Checkpoint snapshot(const ParameterList<T>& params, nlohmann::json metadata = nlohmann::json::object());

/// Copies values into `params`; throws CheckpointMismatch listing expected vs found shapes.
template <typename T>
void restore(const Checkpoint& ckpt, const ParameterList<T>& params);

/// Writes the binary and its manifest; returns the binary's SHA-256.
std::string save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& bin);

/// Verifies the binary against its manifest hash (DataError on mismatch or corruption).
Checkpoint load_checkpoint(const std::filesystem::path& bin);

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

}  // namespace sarv::nn
