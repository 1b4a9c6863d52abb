#include "afeng/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace afeng::eval {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts) {
    for (auto v : row) n += v;
  }
  return n;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t t) const {
  std::uint64_t n = 0;
  for (auto v : counts[t]) n += v;
  return n;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t p) const {
  std::uint64_t n = 0;
  for (const auto& row : counts) n += row[p];
  return n;
}

ConfusionMatrix confusion(std::span<const Emotion> truth, std::span<const Emotion> predicted) {
  if (truth.size() != predicted.size()) {
    throw EvalError(EvalError::Kind::LengthMismatch,
                    "label sequences differ in length: " + std::to_string(truth.size()) + " vs " +
                        std::to_string(predicted.size()));
  }
  if (truth.empty()) throw EvalError(EvalError::Kind::LengthMismatch, "no labels to compare");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++cm.counts[index_of(truth[i])][index_of(predicted[i])];
  }
  return cm;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

ClassificationReport report(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EvalError(EvalError::Kind::EmptyMatrix, "empty confusion matrix");
  ClassificationReport r;
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    const auto tp = static_cast<double>(cm.counts[k][k]);
    const auto col = cm.col_sum(k);
    const auto row = cm.row_sum(k);
    auto& m = r.per_class[k];
    m.support = row;
    if (col > 0) {
      m.precision = tp / static_cast<double>(col);
    } else {
      r.zero_division = true;
    }
    if (row > 0) {
      m.recall = tp / static_cast<double>(row);
    } else {
      r.zero_division = true;
    }
    m.f1 = f1_score(m.precision, m.recall);
    r.macro.precision += m.precision / kNumEmotions;
    r.macro.recall += m.recall / kNumEmotions;
    r.macro.f1 += m.f1 / kNumEmotions;
  }
  r.macro.support = cm.total();
  return r;
}

std::string format_report(const ClassificationReport& r) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%-14s%10s%10s%10s%10s\n", "", "Precision", "Recall",
                "F1-score", "Support");
  os << line;
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    const auto& m = r.per_class[k];
    std::snprintf(line, sizeof line, "%-14s%10.2f%10.2f%10.2f%10llu\n",
                  std::string(kEmotionNames[k]).c_str(), m.precision, m.recall, m.f1,
                  static_cast<unsigned long long>(m.support));
    os << line;
  }
  std::snprintf(line, sizeof line, "%-14s%10.2f%10.2f%10.2f%10llu\n", "Average", r.macro.precision,
                r.macro.recall, r.macro.f1, static_cast<unsigned long long>(r.macro.support));
  os << line;
  if (r.zero_division) {
    os << "\n* some metrics had a zero denominator and are reported as 0.00\n";
  }
  return os.str();
}

std::string report_csv(const ClassificationReport& r) {
  std::ostringstream os;
  char line[160];
  os << "emotion,precision,recall,f1,support\n";
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    const auto& m = r.per_class[k];
    std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g,%llu\n",
                  std::string(kEmotionNames[k]).c_str(), m.precision, m.recall, m.f1,
                  static_cast<unsigned long long>(m.support));
    os << line;
  }
  std::snprintf(line, sizeof line, "Average,%.17g,%.17g,%.17g,%llu\n", r.macro.precision,
                r.macro.recall, r.macro.f1, static_cast<unsigned long long>(r.macro.support));
  os << line;
  return os.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream os;
  os << "true\\predicted";
  for (auto name : kEmotionNames) os << ',' << name;
  os << '\n';
  for (std::size_t t = 0; t < kNumEmotions; ++t) {
    os << kEmotionNames[t];
    for (auto v : cm.counts[t]) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double dof) {
  if (std::isinf(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return incomplete_beta(dof / 2.0, 0.5, x);
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw EvalError(EvalError::Kind::LengthMismatch, "pearson inputs differ in length");
  }
  const auto n = x.size();
  if (n < 3) throw EvalError(EvalError::Kind::DegenerateInput, "pearson needs n >= 3");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw EvalError(EvalError::Kind::DegenerateInput, "pearson input has zero variance");
  }
  PearsonResult res;
  res.n = n;
  res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(n - 2);
  const double one_minus = 1.0 - res.r * res.r;
  if (one_minus <= 0.0) {
    res.p = 0.0;
  } else {
    const double t = res.r * std::sqrt(dof / one_minus);
    res.p = student_t_two_tailed(t, dof);
  }
  return res;
}

}  // namespace afeng::eval
