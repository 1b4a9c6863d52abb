#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "afeng/nn/model.hpp"

// Binary checkpoint layout (all integers little-endian):
//
//   "AFENG1"            6-byte magic
//   u32 version         currently 1
//   u64 n, n bytes      JSON metadata: emotion order, hyperparameters,
//                       vocabulary fingerprint, seed
//   u32 tensor count
//   per tensor:         u32 name length, name, u32 rank, u64 extents...,
//                       f64 values in row-major order
namespace afeng::nn {

inline constexpr std::string_view kCheckpointMagic = "AFENG1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, VersionMismatch, ShapeHeaderMismatch, Io };
  CheckpointError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct CheckpointMeta {
  std::uint64_t vocab_fingerprint = 0;
  std::uint64_t seed = 0;

  bool operator==(const CheckpointMeta&) const = default;
};

struct Checkpoint {
  CnnLstmModel model;
  CheckpointMeta meta;
};

std::string serialize_checkpoint(const CnnLstmModel& model, const CheckpointMeta& meta);

// When `expected` is given, its shape-determining fields must match the
// stored configuration.
Checkpoint parse_checkpoint(std::string_view bytes, const ModelConfig* expected = nullptr);

// Writes to a sibling temporary file and renames it into place.
void save_checkpoint(const CnnLstmModel& model, const CheckpointMeta& meta,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const ModelConfig* expected = nullptr);

// Fingerprint of the serialized parameters and metadata.
std::uint64_t checkpoint_fingerprint(const CnnLstmModel& model, const CheckpointMeta& meta);

}  // namespace afeng::nn
