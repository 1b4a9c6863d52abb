#include "afeng/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "afeng/eval.hpp"
#include "afeng/hash.hpp"
#include "afeng/random.hpp"

namespace afeng::baselines {
namespace {

void l2_normalize(SparseVector& v) {
  const double n = v.norm();
  if (n > 0.0) {
    for (double& x : v.values) x /= n;
  }
}

void check_dataset(const Dataset& data, bool require_all_classes) {
  if (data.features.size() != data.labels.size()) {
    throw BaselineError(BaselineError::Kind::ShapeMismatch, "features and labels differ in length");
  }
  if (data.features.empty()) {
    throw BaselineError(BaselineError::Kind::EmptyInput, "training set is empty");
  }
  const auto dim = data.features.front().dim;
  for (const auto& x : data.features) {
    if (x.dim != dim) {
      throw BaselineError(BaselineError::Kind::ShapeMismatch, "feature dimensions differ");
    }
  }
  if (!require_all_classes) return;
  std::array<bool, kNumEmotions> seen{};
  for (Emotion e : data.labels) seen[index_of(e)] = true;
  for (Emotion e : kAllEmotions) {
    if (!seen[index_of(e)]) {
      throw BaselineError(BaselineError::Kind::MissingClass,
                          "no training example for " + std::string(name_of(e)));
    }
  }
}

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  return order;
}

template <std::size_t N>
std::size_t argmax(const std::array<double, N>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < N; ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

double dot_row(const std::vector<double>& w, std::size_t row, std::size_t dim, const SparseVector& x) {
  double s = 0.0;
  const double* r = w.data() + row * dim;
  for (std::size_t k = 0; k < x.indices.size(); ++k) s += r[x.indices[k]] * x.values[k];
  return s;
}

}  // namespace

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

SparseVector make_sparse(std::map<std::uint32_t, double> entries, std::size_t dim) {
  SparseVector v;
  v.dim = dim;
  for (const auto& [i, x] : entries) {
    if (x == 0.0) continue;
    if (i >= dim) throw BaselineError(BaselineError::Kind::ShapeMismatch, "feature index out of range");
    v.indices.push_back(i);
    v.values.push_back(x);
  }
  return v;
}

std::string_view to_string(VectorizerMode m) {
  switch (m) {
    case VectorizerMode::Bow: return "Bag-of-words";
    case VectorizerMode::Tfidf: return "Tf-idf";
    case VectorizerMode::Hashing: return "Hashing";
  }
  return "?";
}

Vectorizer::Vectorizer(VectorizerMode mode, std::size_t hashing_dim)
    : mode_(mode), hashing_dim_(hashing_dim), fitted_(mode == VectorizerMode::Hashing) {
  if (hashing_dim_ == 0) throw std::invalid_argument("hashing dimension must be positive");
}

std::size_t Vectorizer::dim() const {
  if (mode_ == VectorizerMode::Hashing) return hashing_dim_;
  if (!fitted_) throw BaselineError(BaselineError::Kind::NotFitted, "vectorizer is not fitted");
  return vocab_.size();
}

void Vectorizer::fit(std::span<const text::Tokens> docs) {
  if (mode_ == VectorizerMode::Hashing) return;
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::vector<std::string> uniq(doc.begin(), doc.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (auto& t : uniq) ++df[t];
  }
  vocab_.clear();
  idf_.clear();
  const double n = static_cast<double>(docs.size());
  std::uint32_t next = 0;
  for (const auto& [token, count] : df) {
    vocab_.emplace(token, next++);
    idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  fitted_ = true;
}

SparseVector Vectorizer::transform(const text::Tokens& tokens) const {
  if (!fitted_) throw BaselineError(BaselineError::Kind::NotFitted, "vectorizer is not fitted");
  std::map<std::uint32_t, double> acc;
  if (mode_ == VectorizerMode::Hashing) {
    for (const auto& t : tokens) {
      const auto h = fnv1a(t);
      const auto idx = static_cast<std::uint32_t>(h % hashing_dim_);
      acc[idx] += (h >> 63) ? -1.0 : 1.0;
    }
    auto v = make_sparse(std::move(acc), hashing_dim_);
    l2_normalize(v);
    return v;
  }
  for (const auto& t : tokens) {
    if (const auto it = vocab_.find(t); it != vocab_.end()) acc[it->second] += 1.0;
  }
  if (mode_ == VectorizerMode::Tfidf) {
    for (auto& [i, x] : acc) x *= idf_[i];
  }
  auto v = make_sparse(std::move(acc), vocab_.size());
  if (mode_ == VectorizerMode::Tfidf) l2_normalize(v);
  return v;
}

std::array<double, kNumEmotions> LinearModel::scores(const SparseVector& x) const {
  if (x.dim != dim) throw BaselineError(BaselineError::Kind::ShapeMismatch, "feature dimension mismatch");
  std::array<double, kNumEmotions> s{};
  for (std::size_t c = 0; c < kNumEmotions; ++c) s[c] = dot_row(weights, c, dim, x) + bias[c];
  return s;
}

Emotion LinearModel::predict(const SparseVector& x) const {
  return emotion_from_index(argmax(scores(x)));
}

LinearModel train_linear(const Dataset& data, LinearKind kind, const LinearConfig& config) {
  check_dataset(data, config.require_all_classes);
  LinearModel m;
  m.kind = kind;
  m.dim = data.features.front().dim;
  m.weights.assign(kNumEmotions * m.dim, 0.0);

  // w_c = scale_c * v_c, so the l2 shrink is O(1) per step.
  std::array<double, kNumEmotions> scale;
  scale.fill(1.0);
  const double lr = config.learning_rate;
  const double shrink = 1.0 - lr * config.l2;
  Rng rng(config.seed);
  auto order = identity_order(data.labels.size());

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (const auto i : order) {
      const auto& x = data.features[i];
      const auto target = index_of(data.labels[i]);
      for (std::size_t c = 0; c < kNumEmotions; ++c) {
        const double y = c == target ? 1.0 : -1.0;
        const double z = scale[c] * dot_row(m.weights, c, m.dim, x) + m.bias[c];
        double g = 0.0;
        if (kind == LinearKind::Logistic) {
          g = -y / (1.0 + std::exp(y * z));
        } else if (y * z < 1.0) {
          g = -y;
        }
        scale[c] *= shrink;
        if (g != 0.0) {
          double* row = m.weights.data() + c * m.dim;
          const double step = -lr * g / scale[c];
          for (std::size_t k = 0; k < x.indices.size(); ++k) row[x.indices[k]] += step * x.values[k];
          m.bias[c] -= lr * g;
        }
        if (scale[c] < 1e-9) {
          double* row = m.weights.data() + c * m.dim;
          for (std::size_t f = 0; f < m.dim; ++f) row[f] *= scale[c];
          scale[c] = 1.0;
        }
      }
    }
  }
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    double* row = m.weights.data() + c * m.dim;
    for (std::size_t f = 0; f < m.dim; ++f) row[f] *= scale[c];
  }
  return m;
}

namespace {

struct MlpActivations {
  std::vector<double> pre;     // hidden pre-activation
  std::vector<double> hidden;  // ReLU output
  std::array<double, kNumEmotions> probs{};
};

MlpActivations mlp_forward(const MlpModel& m, const SparseVector& x) {
  if (x.dim != m.dim) throw BaselineError(BaselineError::Kind::ShapeMismatch, "feature dimension mismatch");
  MlpActivations a;
  a.pre = m.b1;
  for (std::size_t k = 0; k < x.indices.size(); ++k) {
    const double* row = m.w1.data() + static_cast<std::size_t>(x.indices[k]) * m.hidden;
    for (std::size_t j = 0; j < m.hidden; ++j) a.pre[j] += x.values[k] * row[j];
  }
  a.hidden.resize(m.hidden);
  for (std::size_t j = 0; j < m.hidden; ++j) a.hidden[j] = std::max(0.0, a.pre[j]);
  std::array<double, kNumEmotions> z{};
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    double s = m.b2[c];
    const double* row = m.w2.data() + c * m.hidden;
    for (std::size_t j = 0; j < m.hidden; ++j) s += row[j] * a.hidden[j];
    z[c] = s;
  }
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumEmotions; ++c) sum += (a.probs[c] = std::exp(z[c] - mx));
  for (double& p : a.probs) p /= sum;
  return a;
}

// dz = p - onehot and the hidden-layer delta; shared by training and the
// explicit gradient function.
std::vector<double> mlp_deltas(const MlpModel& m, const MlpActivations& a, std::size_t target,
                               std::array<double, kNumEmotions>& dz) {
  for (std::size_t c = 0; c < kNumEmotions; ++c) dz[c] = a.probs[c] - (c == target ? 1.0 : 0.0);
  std::vector<double> da(m.hidden, 0.0);
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    const double* row = m.w2.data() + c * m.hidden;
    for (std::size_t j = 0; j < m.hidden; ++j) da[j] += row[j] * dz[c];
  }
  for (std::size_t j = 0; j < m.hidden; ++j) {
    if (a.pre[j] <= 0.0) da[j] = 0.0;
  }
  return da;
}

}  // namespace

std::array<double, kNumEmotions> MlpModel::probabilities(const SparseVector& x) const {
  return mlp_forward(*this, x).probs;
}

Emotion MlpModel::predict(const SparseVector& x) const {
  return emotion_from_index(argmax(probabilities(x)));
}

MlpModel init_mlp(std::size_t dim, std::size_t hidden, std::uint64_t seed) {
  if (dim == 0 || hidden == 0) throw std::invalid_argument("MLP sizes must be positive");
  MlpModel m;
  m.dim = dim;
  m.hidden = hidden;
  Rng rng(seed);
  const double a1 = std::sqrt(6.0 / static_cast<double>(dim + hidden));
  const double a2 = std::sqrt(6.0 / static_cast<double>(hidden + kNumEmotions));
  m.w1.resize(dim * hidden);
  for (double& w : m.w1) w = rng.uniform(-a1, a1);
  m.b1.assign(hidden, 0.0);
  m.w2.resize(kNumEmotions * hidden);
  for (double& w : m.w2) w = rng.uniform(-a2, a2);
  return m;
}

MlpGradients mlp_gradients(const MlpModel& m, const SparseVector& x, Emotion label) {
  const auto a = mlp_forward(m, x);
  const auto target = index_of(label);
  MlpGradients g;
  const auto da = mlp_deltas(m, a, target, g.b2);
  g.loss = -std::log(a.probs[target]);
  g.w2.assign(kNumEmotions * m.hidden, 0.0);
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    for (std::size_t j = 0; j < m.hidden; ++j) g.w2[c * m.hidden + j] = g.b2[c] * a.hidden[j];
  }
  g.b1 = da;
  g.w1.assign(m.dim * m.hidden, 0.0);
  for (std::size_t k = 0; k < x.indices.size(); ++k) {
    double* row = g.w1.data() + static_cast<std::size_t>(x.indices[k]) * m.hidden;
    for (std::size_t j = 0; j < m.hidden; ++j) row[j] += x.values[k] * da[j];
  }
  return g;
}

MlpModel train_mlp(const Dataset& data, const MlpConfig& config) {
  check_dataset(data, config.require_all_classes);
  auto m = init_mlp(data.features.front().dim, config.hidden, config.seed);
  const double lr = config.learning_rate;
  const double shrink = 1.0 - lr * config.l2;
  // w1 = s1 * stored values; keeps the l2 shrink off the (possibly wide)
  // input layer's inner loop.
  double s1 = 1.0;
  Rng rng(mix_seed(config.seed, 1));
  auto order = identity_order(data.labels.size());

  MlpModel view = m;  // forward pass needs the effective w1
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (const auto i : order) {
      const auto& x = data.features[i];
      // Materialize only the touched rows of the effective w1.
      for (std::size_t k = 0; k < x.indices.size(); ++k) {
        const auto base = static_cast<std::size_t>(x.indices[k]) * m.hidden;
        for (std::size_t j = 0; j < m.hidden; ++j) view.w1[base + j] = s1 * m.w1[base + j];
      }
      view.b1 = m.b1;
      view.w2 = m.w2;
      view.b2 = m.b2;
      const auto a = mlp_forward(view, x);
      std::array<double, kNumEmotions> dz{};
      const auto da = mlp_deltas(view, a, index_of(data.labels[i]), dz);

      for (std::size_t c = 0; c < kNumEmotions; ++c) {
        double* row = m.w2.data() + c * m.hidden;
        for (std::size_t j = 0; j < m.hidden; ++j) row[j] = row[j] * shrink - lr * dz[c] * a.hidden[j];
        m.b2[c] -= lr * dz[c];
      }
      s1 *= shrink;
      for (std::size_t k = 0; k < x.indices.size(); ++k) {
        double* row = m.w1.data() + static_cast<std::size_t>(x.indices[k]) * m.hidden;
        const double step = -lr * x.values[k] / s1;
        for (std::size_t j = 0; j < m.hidden; ++j) row[j] += step * da[j];
      }
      for (std::size_t j = 0; j < m.hidden; ++j) m.b1[j] -= lr * da[j];
      if (s1 < 1e-9) {
        for (double& w : m.w1) w *= s1;
        s1 = 1.0;
      }
    }
  }
  for (double& w : m.w1) w *= s1;
  return m;
}

std::vector<GridCell> default_grid() {
  return {
      {"SGD Classifier", "Logistic Regression", VectorizerMode::Bow, ClassifierKind::SgdLogistic},
      {"SGD Classifier", "Logistic Regression", VectorizerMode::Tfidf, ClassifierKind::SgdLogistic},
      {"SGD Classifier", "Logistic Regression", VectorizerMode::Hashing, ClassifierKind::SgdLogistic},
      {"MLP Classifier", "Logistic Regression", VectorizerMode::Bow, ClassifierKind::Mlp},
      {"SGD Classifier", "Linear Model", VectorizerMode::Bow, ClassifierKind::SgdHinge},
      {"Linear SVC", "SVM Model", VectorizerMode::Bow, ClassifierKind::LinearSvc},
  };
}

std::vector<ComparisonRow> run_comparison(const LabeledTokens& train, const LabeledTokens& test,
                                          std::span<const GridCell> grid,
                                          const ComparisonConfig& config) {
  std::vector<ComparisonRow> rows;
  for (const auto& cell : grid) {
    Vectorizer vec(cell.vectorizer);
    vec.fit(train.docs);
    Dataset tr, te;
    for (const auto& d : train.docs) tr.features.push_back(vec.transform(d));
    tr.labels = train.labels;
    for (const auto& d : test.docs) te.features.push_back(vec.transform(d));
    te.labels = test.labels;

    std::vector<Emotion> predicted;
    predicted.reserve(te.labels.size());
    const auto predict_all = [&](const auto& model) {
      for (const auto& x : te.features) predicted.push_back(model.predict(x));
    };
    switch (cell.kind) {
      case ClassifierKind::SgdLogistic:
        predict_all(train_linear(tr, LinearKind::Logistic, config.sgd));
        break;
      case ClassifierKind::SgdHinge:
        predict_all(train_linear(tr, LinearKind::Hinge, config.sgd));
        break;
      case ClassifierKind::LinearSvc:
        predict_all(train_linear(tr, LinearKind::Hinge, config.svc));
        break;
      case ClassifierKind::Mlp:
        predict_all(train_mlp(tr, config.mlp));
        break;
    }
    const auto rep = eval::report(eval::confusion(te.labels, predicted));
    rows.push_back({cell.classifier, cell.model, std::string(to_string(cell.vectorizer)),
                    rep.macro.precision});
  }
  return rows;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
  std::ostringstream out;
  out << "classifier,model,vectorizer,average_precision\n";
  char buf[32];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f", r.macro_precision);
    out << r.classifier << ',' << r.model << ',' << r.vectorizer << ',' << buf << '\n';
  }
  return out.str();
}

std::string format_comparison(std::span<const ComparisonRow> rows) {
  std::size_t w0 = 10, w1 = 5, w2 = 10;
  for (const auto& r : rows) {
    w0 = std::max(w0, r.classifier.size());
    w1 = std::max(w1, r.model.size());
    w2 = std::max(w2, r.vectorizer.size());
  }
  std::ostringstream out;
  const auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size() + 2, ' '); };
  out << pad("Classifier", w0) << pad("Model", w1) << pad("Vectorizer", w2) << "Average Precision\n";
  char buf[32];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.2f", r.macro_precision);
    out << pad(r.classifier, w0) << pad(r.model, w1) << pad(r.vectorizer, w2) << buf << '\n';
  }
  return out.str();
}

}  // namespace afeng::baselines
