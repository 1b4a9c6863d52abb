#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "afeng/emotion.hpp"
#include "afeng/textprep.hpp"

// Classical vectorizer x classifier baselines.
namespace afeng::baselines {

class BaselineError : public std::runtime_error {
 public:
  enum class Kind { NotFitted, MissingClass, EmptyInput, ShapeMismatch };
  BaselineError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Strictly ascending indices, no stored zeros.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::size_t dim = 0;

  double norm() const;
  bool operator==(const SparseVector&) const = default;
};

// Builds a SparseVector from unsorted (index, value) pairs, summing repeats
// and dropping zeros.
SparseVector make_sparse(std::map<std::uint32_t, double> entries, std::size_t dim);

enum class VectorizerMode { Bow, Tfidf, Hashing };

std::string_view to_string(VectorizerMode m);

inline constexpr std::size_t kHashingDim = std::size_t{1} << 18;

class Vectorizer {
 public:
  explicit Vectorizer(VectorizerMode mode, std::size_t hashing_dim = kHashingDim);

  // Learns the vocabulary (lexicographic indices) and document frequencies.
  // A no-op for hashing.
  void fit(std::span<const text::Tokens> docs);
  // bow: raw counts; tfidf: count * (ln((1+N)/(1+df)) + 1), l2-normalized;
  // hashing: signed counts, l2-normalized. Unknown tokens are ignored.
  SparseVector transform(const text::Tokens& tokens) const;

  VectorizerMode mode() const { return mode_; }
  bool fitted() const { return fitted_; }
  std::size_t dim() const;
  const std::map<std::string, std::uint32_t>& vocabulary() const { return vocab_; }
  double idf(std::uint32_t feature) const { return idf_.at(feature); }

 private:
  VectorizerMode mode_;
  std::size_t hashing_dim_;
  bool fitted_ = false;
  std::map<std::string, std::uint32_t> vocab_;
  std::vector<double> idf_;
};

struct Dataset {
  std::vector<SparseVector> features;
  std::vector<Emotion> labels;
};

enum class LinearKind { Logistic, Hinge };

struct LinearConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 30;
  double l2 = 1e-4;
  std::uint64_t seed = 42;
  // When false, emotions absent from the data are trained as pure negatives
  // instead of raising MissingClass.
  bool require_all_classes = true;
};

// One-vs-rest linear model; row c scores emotion c.
struct LinearModel {
  LinearKind kind = LinearKind::Logistic;
  std::size_t dim = 0;
  std::vector<double> weights;  // kNumEmotions x dim, row-major
  std::array<double, kNumEmotions> bias{};

  std::array<double, kNumEmotions> scores(const SparseVector& x) const;
  // Argmax of scores; ties go to the lowest canonical index.
  Emotion predict(const SparseVector& x) const;
};

LinearModel train_linear(const Dataset& data, LinearKind kind, const LinearConfig& config);

struct MlpConfig {
  std::size_t hidden = 100;
  double learning_rate = 0.05;
  std::size_t epochs = 30;
  double l2 = 1e-4;
  std::uint64_t seed = 42;
  bool require_all_classes = true;
};

// One ReLU hidden layer and a softmax output over the 8 emotions.
struct MlpModel {
  std::size_t dim = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;  // dim x hidden, row per input feature
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // kNumEmotions x hidden
  std::array<double, kNumEmotions> b2{};

  std::array<double, kNumEmotions> probabilities(const SparseVector& x) const;
  Emotion predict(const SparseVector& x) const;
};

struct MlpGradients {
  std::vector<double> w1, b1, w2;
  std::array<double, kNumEmotions> b2{};
  double loss = 0.0;  // cross-entropy of one example, without the l2 term
};

MlpModel init_mlp(std::size_t dim, std::size_t hidden, std::uint64_t seed);
MlpGradients mlp_gradients(const MlpModel& model, const SparseVector& x, Emotion label);
MlpModel train_mlp(const Dataset& data, const MlpConfig& config);

template <typename Model>
double accuracy(const Model& model, const Dataset& data) {
  if (data.labels.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (model.predict(data.features[i]) == data.labels[i]) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(data.labels.size());
}

enum class ClassifierKind { SgdLogistic, SgdHinge, LinearSvc, Mlp };

struct GridCell {
  std::string classifier;  // table column, e.g. "SGD Classifier"
  std::string model;       // e.g. "Logistic Regression"
  VectorizerMode vectorizer = VectorizerMode::Bow;
  ClassifierKind kind = ClassifierKind::SgdLogistic;
};

// The six rows of the classical comparison grid.
std::vector<GridCell> default_grid();

struct ComparisonRow {
  std::string classifier;
  std::string model;
  std::string vectorizer;
  double macro_precision = 0.0;
};

struct LabeledTokens {
  std::vector<text::Tokens> docs;
  std::vector<Emotion> labels;
};

struct ComparisonConfig {
  LinearConfig sgd;
  LinearConfig svc{0.01, 60, 1e-3, 42, true};
  MlpConfig mlp;
};

// Trains every grid cell on `train` and scores macro precision on `test`.
std::vector<ComparisonRow> run_comparison(const LabeledTokens& train, const LabeledTokens& test,
                                          std::span<const GridCell> grid,
                                          const ComparisonConfig& config = {});

std::string comparison_csv(std::span<const ComparisonRow> rows);
std::string format_comparison(std::span<const ComparisonRow> rows);

}  // namespace afeng::baselines
