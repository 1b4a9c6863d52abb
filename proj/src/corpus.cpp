#include "afeng/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "afeng/random.hpp"

namespace afeng::corpus {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

// RFC 4180 fields; returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(cur));
  return fields;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Largest-remainder apportionment of `target` across `weights`.
std::array<std::size_t, kNumEmotions> apportion(const std::array<std::size_t, kNumEmotions>& weights,
                                                std::size_t target) {
  std::size_t total = 0;
  for (auto w : weights) total += w;
  std::array<std::size_t, kNumEmotions> out{};
  if (total == 0 || target == 0) return out;
  std::array<double, kNumEmotions> frac{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    const double quota = static_cast<double>(target) * static_cast<double>(weights[k]) /
                         static_cast<double>(total);
    out[k] = static_cast<std::size_t>(std::floor(quota));
    frac[k] = quota - static_cast<double>(out[k]);
    assigned += out[k];
  }
  std::array<std::size_t, kNumEmotions> order{};
  for (std::size_t k = 0; k < kNumEmotions; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; assigned < target; i = (i + 1) % kNumEmotions) {
    const auto k = order[i];
    if (out[k] < weights[k]) {
      ++out[k];
      ++assigned;
    }
  }
  return out;
}

}  // namespace

Corpus read_corpus(std::istream& in, Format format, const std::string& default_source) {
  Corpus out;
  std::string line;
  std::size_t row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    if (format == Format::Tsv) {
      fields = split_tsv(line);
    } else {
      auto parsed = split_csv(line);
      if (!parsed) {
        throw CorpusError(CorpusError::Kind::MalformedRow, row + 1,
                          "row " + std::to_string(row + 1) + ": unterminated quoted field");
      }
      fields = std::move(*parsed);
    }
    if (first) {
      first = false;
      if (fields.size() >= 2 && lower(trim(fields[0])) == "text" &&
          lower(trim(fields[1])) == "label") {
        continue;
      }
    }
    ++row;
    if (line.empty()) {
      throw CorpusError(CorpusError::Kind::MalformedRow, row,
                        "row " + std::to_string(row) + ": blank line");
    }
    if (fields.size() < 2 || fields.size() > 3) {
      throw CorpusError(CorpusError::Kind::MalformedRow, row,
                        "row " + std::to_string(row) + ": expected 2 or 3 columns, found " +
                            std::to_string(fields.size()));
    }
    auto text = trim(fields[0]);
    if (text.empty()) {
      throw CorpusError(CorpusError::Kind::EmptyText, row,
                        "row " + std::to_string(row) + ": empty text");
    }
    const auto label_text = trim(fields[1]);
    const auto label = parse_emotion(label_text);
    if (!label) {
      throw CorpusError(CorpusError::Kind::UnknownLabel, row,
                        "row " + std::to_string(row) + ": unknown label '" + label_text + "'");
    }
    std::string source = fields.size() == 3 ? trim(fields[2]) : default_source;
    out.push_back({std::move(text), *label, std::move(source)});
  }
  return out;
}

Corpus load_corpus(const std::filesystem::path& path, Format format) {
  std::ifstream in(path);
  if (!in) {
    throw CorpusError(CorpusError::Kind::Io, 0, "cannot open corpus file " + path.string());
  }
  return read_corpus(in, format, path.stem().string());
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  out << "text\tlabel\tsource\n";
  for (const auto& s : corpus) {
    std::string text = s.text;
    std::replace_if(text.begin(), text.end(),
                    [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
    out << text << '\t' << name_of(s.label) << '\t' << s.source_id << '\n';
  }
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError(CorpusError::Kind::Io, 0, "cannot write " + path.string());
  write_corpus(out, corpus);
}

Corpus consolidate(const std::vector<Corpus>& sources) {
  Corpus out;
  for (const auto& src : sources) out.insert(out.end(), src.begin(), src.end());
  return out;
}

std::array<std::size_t, kNumEmotions> class_counts(const Corpus& corpus) {
  std::array<std::size_t, kNumEmotions> counts{};
  for (const auto& s : corpus) ++counts[index_of(s.label)];
  return counts;
}

Corpus consolidate_and_balance(const std::vector<Corpus>& sources,
                               std::optional<std::size_t> per_class, std::uint64_t seed) {
  const Corpus all = consolidate(sources);
  std::array<std::vector<std::size_t>, kNumEmotions> by_class;
  for (std::size_t i = 0; i < all.size(); ++i) by_class[index_of(all[i].label)].push_back(i);

  std::size_t keep = per_class.value_or(all.size());
  for (Emotion e : kAllEmotions) {
    const auto& members = by_class[index_of(e)];
    if (members.empty()) {
      throw CorpusError(CorpusError::Kind::MissingClass, 0,
                        "no sentences labelled " + std::string(name_of(e)));
    }
    keep = std::min(keep, members.size());
  }

  Rng rng(seed);
  std::vector<bool> selected(all.size(), false);
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t i = 0; i < keep; ++i) selected[members[i]] = true;
  }
  Corpus out;
  out.reserve(keep * kNumEmotions);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (selected[i]) out.push_back(all[i]);
  }
  return out;
}

CorpusSplit split(const Corpus& corpus, std::uint64_t seed, double test_fraction,
                  double validation_fraction) {
  const auto valid = [](double f) { return std::isfinite(f) && f >= 0.0 && f < 1.0; };
  if (!valid(test_fraction) || !valid(validation_fraction) ||
      test_fraction + validation_fraction >= 1.0) {
    throw CorpusError(CorpusError::Kind::InvalidFraction, 0,
                      "fractions must lie in [0,1) and sum to less than 1");
  }
  if (corpus.empty()) {
    throw CorpusError(CorpusError::Kind::InvalidFraction, 0, "cannot split an empty corpus");
  }

  std::array<std::vector<std::size_t>, kNumEmotions> by_class;
  for (std::size_t i = 0; i < corpus.size(); ++i) by_class[index_of(corpus[i].label)].push_back(i);
  const auto counts = class_counts(corpus);

  const auto n = corpus.size();
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  const auto test_per = apportion(counts, n_test);
  std::array<std::size_t, kNumEmotions> pool{};
  for (std::size_t k = 0; k < kNumEmotions; ++k) pool[k] = counts[k] - test_per[k];
  const auto n_val = static_cast<std::size_t>(
      std::llround(validation_fraction * static_cast<double>(n - n_test)));
  const auto val_per = apportion(pool, n_val);

  enum class Part : std::uint8_t { Train, Validation, Test };
  std::vector<Part> part(n, Part::Train);
  Rng rng(seed);
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    auto members = by_class[k];
    rng.shuffle(members);
    for (std::size_t i = 0; i < test_per[k]; ++i) part[members[i]] = Part::Test;
    for (std::size_t i = 0; i < val_per[k]; ++i) part[members[test_per[k] + i]] = Part::Validation;
  }

  CorpusSplit out;
  out.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    switch (part[i]) {
      case Part::Train: out.train.push_back(corpus[i]); break;
      case Part::Validation: out.validation.push_back(corpus[i]); break;
      case Part::Test: out.test.push_back(corpus[i]); break;
    }
  }
  return out;
}

}  // namespace afeng::corpus
