#include "afeng/embeddings.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>

#include "afeng/random.hpp"

namespace afeng::embed {
namespace {

void parse_line(const std::string& line, std::size_t lineno, const ParseOptions& opts,
                ParseResult& result) {
  if (line.empty()) return;
  const auto space = line.find(' ');
  if (space == std::string::npos || space == 0) {
    throw EmbeddingError(EmbeddingError::Kind::DimensionMismatch, lineno,
                         "line " + std::to_string(lineno) + ": no vector values");
  }
  std::string token = line.substr(0, space);
  std::vector<double> values;
  values.reserve(opts.expected_dim);
  const char* p = line.data() + space;
  const char* end = line.data() + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\r' || *p == '\t')) ++p;
    if (p == end) break;
    double v = 0.0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec == std::errc::result_out_of_range) {
      throw EmbeddingError(EmbeddingError::Kind::NonFinite, lineno,
                           "line " + std::to_string(lineno) + ": value out of range");
    }
    if (ec != std::errc()) {
      throw EmbeddingError(EmbeddingError::Kind::DimensionMismatch, lineno,
                           "line " + std::to_string(lineno) + ": unparsable value");
    }
    if (!std::isfinite(v)) {
      throw EmbeddingError(EmbeddingError::Kind::NonFinite, lineno,
                           "line " + std::to_string(lineno) + ": non-finite value");
    }
    values.push_back(v);
    p = next;
  }
  if (values.size() != opts.expected_dim) {
    throw EmbeddingError(EmbeddingError::Kind::DimensionMismatch, lineno,
                         "line " + std::to_string(lineno) + ": expected " +
                             std::to_string(opts.expected_dim) + " values, found " +
                             std::to_string(values.size()));
  }
  ++result.parsed;
  std::string key = opts.key ? opts.key(token) : std::move(token);
  if (opts.keep && !opts.keep(key)) {
    ++result.skipped;
    return;
  }
  if (!result.vectors.emplace(std::move(key), std::move(values)).second) {
    ++result.duplicates;
    ++result.skipped;
  }
}

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};

}  // namespace

ParseResult parse_vectors(std::istream& in, const ParseOptions& opts) {
  ParseResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) parse_line(line, ++lineno, opts, result);
  return result;
}

ParseResult parse_vectors_file(const std::filesystem::path& path, const ParseOptions& opts) {
  if (path.extension() != ".gz") {
    std::ifstream in(path);
    if (!in) throw EmbeddingError(EmbeddingError::Kind::Io, 0, "cannot open " + path.string());
    return parse_vectors(in, opts);
  }
  std::unique_ptr<gzFile_s, GzCloser> gz(gzopen(path.c_str(), "rb"));
  if (!gz) throw EmbeddingError(EmbeddingError::Kind::Io, 0, "cannot open " + path.string());
  ParseResult result;
  std::string line;
  std::size_t lineno = 0;
  char buf[1 << 16];
  while (gzgets(gz.get(), buf, sizeof buf) != nullptr) {
    line += buf;
    if (!line.empty() && line.back() == '\n') {
      line.pop_back();
      parse_line(line, ++lineno, opts, result);
      line.clear();
    }
  }
  if (!line.empty()) parse_line(line, ++lineno, opts, result);
  return result;
}

EmbeddingMatrix build_matrix(const text::Vocabulary& vocab, const VectorMap& vectors,
                             std::size_t dim, std::uint64_t seed) {
  EmbeddingMatrix m;
  m.rows = vocab.size();
  m.dim = dim;
  m.values.assign(m.rows * dim, 0.0);
  Rng rng(seed);
  for (std::size_t r = 1; r < m.rows; ++r) {
    auto dst = m.row(r);
    const auto it = r >= 2 ? vectors.find(vocab.token(static_cast<std::uint32_t>(r)))
                           : vectors.end();
    if (it != vectors.end()) {
      if (it->second.size() != dim) {
        throw EmbeddingError(EmbeddingError::Kind::DimensionMismatch, 0,
                             "vector for '" + it->first + "' has wrong dimension");
      }
      std::copy(it->second.begin(), it->second.end(), dst.begin());
    } else {
      for (auto& v : dst) v = rng.uniform(-kInitRange, kInitRange);
    }
  }
  return m;
}

}  // namespace afeng::embed
