#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace afeng::text {

using Tokens = std::vector<std::string>;

inline constexpr std::size_t kDefaultMaxLength = 40;

// Lowercases ASCII, splits on whitespace and punctuation, drops URLs and
// @mentions, keeps hashtag words without '#', and passes emoticons through
// unchanged.
Tokens tokenize(std::string_view text);

// Porter (1980) suffix stripping. Input is expected lowercase.
std::string porter_stem(std::string_view word);

// The shipped stop-word list.
const std::unordered_set<std::string>& stopwords();

Tokens normalize(const Tokens& tokens, bool remove_stopwords, bool stem);

struct PrepOptions {
  bool remove_stopwords = true;
  bool stem = true;
};

// tokenize followed by normalize.
Tokens preprocess(std::string_view text, const PrepOptions& opts = {});

class Vocabulary {
 public:
  static constexpr std::uint32_t kPad = 0;
  static constexpr std::uint32_t kOov = 1;

  Vocabulary();

  // Tokens with count >= min_count, by descending count then lexicographic.
  static Vocabulary build(std::span<const Tokens> train, std::size_t min_count);

  // Parses the `token<TAB>index` form written by write().
  static Vocabulary read(std::istream& in);
  static Vocabulary load(const std::filesystem::path& path);

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  std::uint32_t index_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(std::uint32_t index) const { return tokens_.at(index); }
  // Including the two reserved slots.
  std::size_t size() const { return tokens_.size(); }
  std::uint64_t fingerprint() const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct EncodedSentence {
  std::vector<std::uint32_t> indices;
  std::size_t true_length = 0;

  bool operator==(const EncodedSentence&) const = default;
};

EncodedSentence encode(const Tokens& tokens, const Vocabulary& vocab,
                       std::size_t max_len = kDefaultMaxLength);

}  // namespace afeng::text
