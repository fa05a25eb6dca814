#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sarv {

/// Bad user input: flags, config files, presets.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable data (corpus rows, shards, checkpoints).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text that is not valid UTF-8.
class DecodeError : public DataError {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : DataError(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Shapes that do not conform for an operation.
class DimensionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Violated precondition on otherwise well-typed values (non one-hot target, zero length, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN or Inf surfaced during a computation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sarv
