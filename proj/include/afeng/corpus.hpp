#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "afeng/emotion.hpp"

namespace afeng::corpus {

struct LabeledSentence {
  std::string text;
  Emotion label;
  std::string source_id;

  bool operator==(const LabeledSentence&) const = default;
};

using Corpus = std::vector<LabeledSentence>;

struct CorpusSplit {
  Corpus train;
  Corpus validation;
  Corpus test;
  std::uint64_t seed = 0;
};

enum class Format { Tsv, Csv };

class CorpusError : public std::runtime_error {
 public:
  enum class Kind { UnknownLabel, EmptyText, MalformedRow, MissingClass, InvalidFraction, Io };

  CorpusError(Kind kind, std::size_t row, const std::string& message)
      : std::runtime_error(message), kind_(kind), row_(row) {}

  Kind kind() const { return kind_; }
  // 1-based data row (header excluded); 0 when not row-specific.
  std::size_t row() const { return row_; }

 private:
  Kind kind_;
  std::size_t row_;
};

// Reads `text, label[, source]` rows. A header line whose first two fields
// are "text" and "label" is skipped. Rows without a source column get the
// file stem as source_id.
Corpus load_corpus(const std::filesystem::path& path, Format format);
Corpus read_corpus(std::istream& in, Format format, const std::string& default_source);

// Writes the canonical TSV form (with header). Tabs and newlines inside text
// are replaced by spaces.
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

// Concatenation of all sources in order.
Corpus consolidate(const std::vector<Corpus>& sources);

// Consolidates, then downsamples every emotion to
// min(per_class, smallest class count). Within a class the kept rows are
// chosen by a seeded shuffle; output keeps the input order of kept rows.
Corpus consolidate_and_balance(const std::vector<Corpus>& sources,
                               std::optional<std::size_t> per_class, std::uint64_t seed);

std::array<std::size_t, kNumEmotions> class_counts(const Corpus& corpus);

// Stratified split. Test size is round(test_fraction * n), validation size is
// round(validation_fraction * (n - test)); both are apportioned across classes
// with the largest-remainder rule.
CorpusSplit split(const Corpus& corpus, std::uint64_t seed, double test_fraction,
                  double validation_fraction = 0.02);

// Deterministic templated keyword corpus: every emotion gets `per_class`
// sentences built from emotion-specific keywords and shared filler.
Corpus synthetic_corpus(std::size_t per_class, std::uint64_t seed);

}  // namespace afeng::corpus
