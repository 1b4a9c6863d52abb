#include "afeng/textprep.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "afeng/hash.hpp"
#include "afeng/resources.hpp"

namespace afeng::text {
namespace {

constexpr std::array<std::string_view, 26> kEmoticons = {
    ":)", ":-)", ":(", ":-(", ":D", ":-D", ";)", ";-)", ":P", ":-P", ":p", ":-p", ":'(",
    ":/", ":-/", "<3", "</3", ":O", ":o", "XD", "xD", ":|", "=)", "=(", ":*", ":3",
};

bool is_word_byte(unsigned char c) {
  // Non-ASCII bytes belong to UTF-8 sequences and stay inside words.
  return std::isalnum(c) || c >= 0x80;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

void split_words(std::string_view chunk, Tokens& out) {
  std::string cur;
  for (char ch : chunk) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      cur += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const auto start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const auto chunk = text.substr(start, i - start);
    if (chunk.empty()) continue;
    if (std::find(kEmoticons.begin(), kEmoticons.end(), chunk) != kEmoticons.end()) {
      out.emplace_back(chunk);
      continue;
    }
    if (chunk.front() == '@') continue;
    if (starts_with_ci(chunk, "http://") || starts_with_ci(chunk, "https://") ||
        starts_with_ci(chunk, "www.")) {
      continue;
    }
    split_words(chunk.front() == '#' ? chunk.substr(1) : chunk, out);
  }
  return out;
}

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = [] {
    std::unordered_set<std::string> w;
    std::istringstream in{std::string(resources::stopwords_txt())};
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) w.insert(line);
    }
    return w;
  }();
  return words;
}

Tokens normalize(const Tokens& tokens, bool remove_stopwords, bool stem) {
  Tokens out;
  out.reserve(tokens.size());
  const auto& stop = stopwords();
  for (const auto& t : tokens) {
    if (remove_stopwords && stop.contains(t)) continue;
    out.push_back(stem ? porter_stem(t) : t);
  }
  return out;
}

Tokens preprocess(std::string_view text, const PrepOptions& opts) {
  return normalize(tokenize(text), opts.remove_stopwords, opts.stem);
}

Vocabulary::Vocabulary() {
  add("<pad>");
  add("<unk>");
}

void Vocabulary::add(std::string token) {
  const auto idx = static_cast<std::uint32_t>(tokens_.size());
  if (!index_.emplace(token, idx).second) {
    throw std::invalid_argument("duplicate vocabulary token '" + token + "'");
  }
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::build(std::span<const Tokens> train, std::size_t min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& sentence : train) {
    for (const auto& t : sentence) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [tok, n] : counts) {
    if (n >= min_count) ranked.emplace_back(tok, n);
  }
  // map iteration is already lexicographic; stable sort keeps it for ties.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (auto& [tok, n] : ranked) v.add(tok);
  return v;
}

std::uint32_t Vocabulary::index_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? kOov : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

void Vocabulary::write(std::ostream& out) const {
  for (std::size_t i = 2; i < tokens_.size(); ++i) out << tokens_[i] << '\t' << i << '\n';
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write vocabulary " + path.string());
  write(out);
}

Vocabulary Vocabulary::read(std::istream& in) {
  Vocabulary v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error("vocabulary line " + std::to_string(lineno) + ": missing tab");
    }
    const auto idx = std::stoul(line.substr(tab + 1));
    if (idx != v.size()) {
      throw std::runtime_error("vocabulary line " + std::to_string(lineno) +
                               ": index out of sequence");
    }
    v.add(line.substr(0, tab));
  }
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary " + path.string());
  return read(in);
}

std::uint64_t Vocabulary::fingerprint() const {
  std::ostringstream os;
  write(os);
  return fnv1a(os.str());
}

EncodedSentence encode(const Tokens& tokens, const Vocabulary& vocab, std::size_t max_len) {
  if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  EncodedSentence out;
  out.indices.assign(max_len, Vocabulary::kPad);
  out.true_length = std::min(tokens.size(), max_len);
  for (std::size_t i = 0; i < out.true_length; ++i) out.indices[i] = vocab.index_of(tokens[i]);
  return out;
}

}  // namespace afeng::text
