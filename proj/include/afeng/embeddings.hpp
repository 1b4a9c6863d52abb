#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "afeng/textprep.hpp"

namespace afeng::embed {

inline constexpr std::size_t kDefaultDim = 200;
inline constexpr double kInitRange = 0.05;

using VectorMap = std::unordered_map<std::string, std::vector<double>>;

class EmbeddingError : public std::runtime_error {
 public:
  enum class Kind { DimensionMismatch, NonFinite, Io };
  EmbeddingError(Kind kind, std::size_t line, const std::string& msg)
      : std::runtime_error(msg), kind_(kind), line_(line) {}
  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

struct ParseOptions {
  std::size_t expected_dim = kDefaultDim;
  // Maps a file token to the lookup key (e.g. the text normalizer). Identity
  // when empty.
  std::function<std::string(const std::string&)> key;
  // When set, entries whose key fails the filter are counted as skipped and
  // not retained; their values are still validated.
  std::function<bool(const std::string&)> keep;
};

struct ParseResult {
  VectorMap vectors;
  std::size_t parsed = 0;
  std::size_t skipped = 0;     // filtered out or duplicate key
  std::size_t duplicates = 0;
};

// Streams `token v1 ... vd` lines. Duplicate keys keep the first occurrence.
ParseResult parse_vectors(std::istream& in, const ParseOptions& opts);

// Same over a file; `.gz` files are decompressed transparently.
ParseResult parse_vectors_file(const std::filesystem::path& path, const ParseOptions& opts);

// Vocabulary-aligned row-major matrix. Row 0 is the padding row.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;
  bool trainable = false;

  std::span<const double> row(std::size_t r) const { return {values.data() + r * dim, dim}; }
  std::span<double> row(std::size_t r) { return {values.data() + r * dim, dim}; }
  bool operator==(const EmbeddingMatrix&) const = default;
};

// Pretrained rows are copied, the OOV row and unmatched rows are drawn from
// U(-0.05, 0.05) with `seed`, the pad row is zero.
EmbeddingMatrix build_matrix(const text::Vocabulary& vocab, const VectorMap& vectors,
                             std::size_t dim, std::uint64_t seed);

}  // namespace afeng::embed
