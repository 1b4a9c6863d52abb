#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>

#include "afeng/emotion.hpp"

namespace afeng::eval {

class EvalError : public std::runtime_error {
 public:
  enum class Kind { LengthMismatch, DegenerateInput, EmptyMatrix };
  EvalError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// counts[true][predicted] in canonical emotion order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumEmotions>, kNumEmotions> counts{};

  std::uint64_t total() const;
  std::uint64_t row_sum(std::size_t t) const;
  std::uint64_t col_sum(std::size_t p) const;
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const Emotion> truth, std::span<const Emotion> predicted);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct ClassificationReport {
  std::array<ClassMetrics, kNumEmotions> per_class{};
  ClassMetrics macro;  // unweighted means; support = total
  // True when some metric hit a zero denominator and was reported as 0.
  bool zero_division = false;
};

// Zero denominators yield 0 for the affected metric.
ClassificationReport report(const ConfusionMatrix& cm);

double f1_score(double precision, double recall);

// Aligned text in Precision / Recall / F1-score / Support column order.
std::string format_report(const ClassificationReport& r);
std::string report_csv(const ClassificationReport& r);
std::string confusion_csv(const ConfusionMatrix& cm);

struct PearsonResult {
  double r = 0.0;
  double p = 0.0;  // two-tailed
  std::size_t n = 0;
};

// Product-moment correlation with a Student-t significance on n-2 degrees of
// freedom. Requires n >= 3 and non-zero variance in both inputs.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double student_t_two_tailed(double t, double dof);

}  // namespace afeng::eval
