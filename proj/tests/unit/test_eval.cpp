#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "afeng/eval.hpp"
#include "afeng/random.hpp"

using namespace afeng;
using namespace afeng::eval;

namespace {

// Two-tailed Student-t tail from the finite series for integer degrees of freedom.
double t_tail_oracle(double t, int dof) {
  const double theta = std::atan(std::abs(t) / std::sqrt(static_cast<double>(dof)));
  const double s = std::sin(theta), c2 = std::cos(theta) * std::cos(theta);
  double a;
  if (dof % 2 == 0) {
    double term = 1.0, sum = 1.0;
    for (int k = 2; k <= dof - 2; k += 2) {
      term *= c2 * (k - 1) / k;
      sum += term;
    }
    a = s * sum;
  } else if (dof == 1) {
    a = 2.0 * theta / std::numbers::pi;
  } else {
    double term = 1.0, sum = 1.0;
    for (int k = 3; k <= dof - 2; k += 2) {
      term *= c2 * (k - 1) / k;
      sum += term;
    }
    a = 2.0 / std::numbers::pi * (theta + s * std::cos(theta) * sum);
  }
  return 1.0 - a;
}

struct Direct {
  double r, p;
};

Direct direct_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  const double t = r * std::sqrt((n - 2) / (1 - r * r));
  return {r, t_tail_oracle(t, static_cast<int>(n) - 2)};
}

std::vector<Emotion> random_labels(Rng& r, std::size_t n) {
  std::vector<Emotion> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(emotion_from_index(r.below(8)));
  return out;
}

}  // namespace

TEST(Confusion, DiagonalOnPerfectPredictions) {
  const std::vector<Emotion> l{Emotion::Joy, Emotion::Fear, Emotion::Joy, Emotion::Anger};
  const auto cm = confusion(l, l);
  EXPECT_EQ(cm.total(), 4u);
  EXPECT_EQ(cm.counts[1][1], 2u);
  EXPECT_EQ(cm.counts[3][3], 1u);
  EXPECT_EQ(cm.counts[7][7], 1u);
}

TEST(Confusion, SingleOffDiagonal) {
  const auto cm = confusion(std::vector{Emotion::Joy}, std::vector{Emotion::Fear});
  EXPECT_EQ(cm.counts[index_of(Emotion::Joy)][index_of(Emotion::Fear)], 1u);
  EXPECT_EQ(cm.total(), 1u);
}

TEST(Confusion, MatchesTallyOracle) {
  Rng r(3);
  const auto t = random_labels(r, 200), p = random_labels(r, 200);
  const auto cm = confusion(t, p);
  std::uint64_t tally[8][8] = {};
  for (std::size_t i = 0; i < 200; ++i) ++tally[index_of(t[i])][index_of(p[i])];
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) EXPECT_EQ(cm.counts[a][b], tally[a][b]);
  EXPECT_EQ(cm.total(), 200u);
}

TEST(Confusion, Errors) {
  EXPECT_THROW(confusion(std::vector{Emotion::Joy}, std::vector<Emotion>{}), EvalError);
  EXPECT_THROW(confusion(std::vector<Emotion>{}, std::vector<Emotion>{}), EvalError);
  EXPECT_THROW(report(ConfusionMatrix{}), EvalError);
}

TEST(Report, TableSevenJoyRowArithmetic) {
  EXPECT_NEAR(f1_score(0.96, 0.92), 2 * 0.96 * 0.92 / 1.88, 1e-15);
  EXPECT_EQ(std::round(f1_score(0.96, 0.92) * 100) / 100, 0.94);
  EXPECT_EQ(f1_score(0, 0), 0.0);
}

TEST(Report, PerfectPredictionsAllOnes) {
  Rng r(9);
  const auto l = random_labels(r, 64);
  const auto rep = report(confusion(l, l));
  EXPECT_EQ(rep.macro.precision, 1.0);
  EXPECT_EQ(rep.macro.recall, 1.0);
  EXPECT_EQ(rep.macro.f1, 1.0);
  EXPECT_EQ(rep.macro.support, 64u);
}

TEST(Report, AbsentClassIsZero) {
  const std::vector<Emotion> l{Emotion::Joy, Emotion::Fear};
  const auto rep = report(confusion(l, l));
  const auto& trust = rep.per_class[index_of(Emotion::Trust)];
  EXPECT_EQ(trust.precision, 0.0);
  EXPECT_EQ(trust.recall, 0.0);
  EXPECT_EQ(trust.f1, 0.0);
  EXPECT_TRUE(rep.zero_division);
  EXPECT_NEAR(rep.macro.precision, 2.0 / 8.0, 1e-15);
}

TEST(Report, MatchesHandComputation) {
  Rng r(12);
  const auto t = random_labels(r, 150), p = random_labels(r, 150);
  const auto cm = confusion(t, p);
  const auto rep = report(cm);
  double macro_f1 = 0, lo = 1, hi = 0;
  for (std::size_t c = 0; c < 8; ++c) {
    const double d = static_cast<double>(cm.counts[c][c]);
    const double prec = cm.col_sum(c) ? d / cm.col_sum(c) : 0.0;
    const double rec = cm.row_sum(c) ? d / cm.row_sum(c) : 0.0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    EXPECT_NEAR(rep.per_class[c].precision, prec, 1e-15);
    EXPECT_NEAR(rep.per_class[c].recall, rec, 1e-15);
    EXPECT_NEAR(rep.per_class[c].f1, f1, 1e-15);
    EXPECT_EQ(rep.per_class[c].support, cm.row_sum(c));
    macro_f1 += f1 / 8;
    lo = std::min(lo, f1);
    hi = std::max(hi, f1);
  }
  EXPECT_NEAR(rep.macro.f1, macro_f1, 1e-15);
  EXPECT_GE(rep.macro.f1, lo);
  EXPECT_LE(rep.macro.f1, hi);
}

TEST(Report, PermutationInvariance) {
  Rng r(4);
  auto t = random_labels(r, 50), p = random_labels(r, 50);
  const auto before = confusion(t, p);
  std::vector<std::size_t> idx(50);
  for (std::size_t i = 0; i < 50; ++i) idx[i] = i;
  r.shuffle(idx);
  std::vector<Emotion> t2, p2;
  for (auto i : idx) {
    t2.push_back(t[i]);
    p2.push_back(p[i]);
  }
  EXPECT_EQ(confusion(t2, p2), before);
}

TEST(Report, TextAndCsvFormats) {
  const std::vector<Emotion> l{Emotion::Joy, Emotion::Fear};
  const auto rep = report(confusion(l, l));
  const auto text = format_report(rep);
  EXPECT_LT(text.find("Precision"), text.find("Recall"));
  EXPECT_LT(text.find("Recall"), text.find("F1-score"));
  EXPECT_LT(text.find("F1-score"), text.find("Support"));
  EXPECT_NE(text.find("Joy"), std::string::npos);
  const auto csv = confusion_csv(confusion(l, l));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "true\\predicted,Anticipation,Joy,Trust,Fear,Surprise,Sadness,Disgust,Anger");
}

TEST(Pearson, PerfectCorrelation) {
  const std::vector<double> x{1, 2, 3, 4, 5}, neg{-1, -2, -3, -4, -5};
  EXPECT_NEAR(pearson(x, x).r, 1.0, 1e-15);
  EXPECT_NEAR(pearson(x, neg).r, -1.0, 1e-15);
  EXPECT_EQ(pearson(x, x).p, 0.0);
}

TEST(Pearson, SmallExampleMatchesDirectFormula) {
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 1, 4, 3, 6};
  const auto got = pearson(x, y);
  const auto want = direct_pearson(x, y);
  EXPECT_NEAR(got.r, want.r, 1e-10);
  EXPECT_NEAR(got.p, want.p, 1e-10);
  EXPECT_EQ(got.n, 5u);
}

TEST(Pearson, RandomVectorsMatchDirectFormula) {
  Rng rng(20);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(20), y(20);
    for (std::size_t i = 0; i < 20; ++i) {
      x[i] = rng.uniform(-3, 3);
      y[i] = 0.4 * x[i] + rng.uniform(-3, 3);
    }
    const auto got = pearson(x, y);
    const auto want = direct_pearson(x, y);
    EXPECT_NEAR(got.r, want.r, 1e-10);
    EXPECT_NEAR(got.p, want.p, 1e-10);
  }
}

TEST(Pearson, SymmetricAndAffineInvariant) {
  const std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6}, y{2, 7, 1, 8, 2, 8, 1, 8};
  std::vector<double> ax;
  for (double v : x) ax.push_back(2.5 * v - 7);
  EXPECT_NEAR(pearson(x, y).r, pearson(y, x).r, 1e-15);
  EXPECT_NEAR(pearson(ax, y).r, pearson(x, y).r, 1e-12);
}

TEST(Pearson, DegenerateInputs) {
  const std::vector<double> a{1, 2}, flat{3, 3, 3}, b{1, 2, 3};
  EXPECT_THROW(pearson(a, a), EvalError);
  EXPECT_THROW(pearson(flat, b), EvalError);
  EXPECT_THROW(pearson(b, a), EvalError);
}

TEST(StudentT, MatchesFiniteSeries) {
  for (int dof : {1, 2, 3, 4, 7, 18, 25})
    for (double t : {0.0, 0.3, 1.0, 2.1, 4.5})
      EXPECT_NEAR(student_t_two_tailed(t, dof), t_tail_oracle(t, dof), 1e-10) << dof << " " << t;
}

TEST(IncompleteBeta, Endpoints) {
  EXPECT_EQ(incomplete_beta(2, 3, 0), 0.0);
  EXPECT_EQ(incomplete_beta(2, 3, 1), 1.0);
  // I_x(1, 1) = x and I_x(a, 1) = x^a
  EXPECT_NEAR(incomplete_beta(1, 1, 0.37), 0.37, 1e-12);
  EXPECT_NEAR(incomplete_beta(3, 1, 0.5), 0.125, 1e-12);
}
