#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "afeng/nn/layers.hpp"
#include "afeng/nn/model.hpp"
#include "afeng/nn/network.hpp"
#include "afeng/nn/optim.hpp"
#include "afeng/nn/trainer.hpp"

using namespace afeng;
using namespace afeng::nn;

namespace afeng::nn {
void PrintTo(LayerOrder o, std::ostream* os) { *os << to_string(o); }
}  // namespace afeng::nn

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double lo = -1, double hi = 1) {
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

ModelConfig tiny_config(LayerOrder order = LayerOrder::CnnLstm) {
  ModelConfig mc;
  mc.vocab_size = 10;
  mc.embedding_dim = 6;
  mc.max_len = 7;
  mc.kernel_widths = {2, 3};
  mc.filter_count = 3;
  mc.hidden_size = 5;
  mc.dense_size = 5;
  mc.dropout = 0.5;
  mc.order = order;
  return mc;
}

embed::EmbeddingMatrix random_embedding(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  embed::EmbeddingMatrix em;
  em.rows = rows;
  em.dim = dim;
  em.values.resize(rows * dim);
  Rng r(seed);
  for (auto& v : em.values) v = r.uniform(-0.5, 0.5);
  std::fill_n(em.values.begin(), dim, 0.0);
  return em;
}

CnnLstmModel randomized_model(const ModelConfig& mc) {
  auto m = init_model(mc, random_embedding(mc.vocab_size, mc.embedding_dim, 3), 7);
  Rng r(9);
  for (auto& nt : trainable_tensors(m))
    for (auto& v : nt.tensor->values()) v = r.uniform(-0.5, 0.5);
  std::fill_n(m.tunable_embedding.data(), mc.embedding_dim, 0.0);
  return m;
}

// Plain-loop forward for the CNN-then-LSTM order without dropout.
std::vector<double> oracle_forward(const CnnLstmModel& m, const text::EncodedSentence& s) {
  const auto& c = m.config;
  const std::size_t F = c.filter_count, H = c.hidden_size, D = c.embedding_dim;
  std::vector<std::vector<double>> seq;  // pooled steps x F
  for (const Tensor* table : {&m.static_embedding, &m.tunable_embedding}) {
    std::size_t step = 0;
    for (std::size_t w = 0; w < c.kernel_widths.size(); ++w) {
      const auto width = c.kernel_widths[w];
      const auto& k = m.conv[w];
      const std::size_t T = c.max_len - width + 1;
      for (std::size_t start = 0; start < T; start += c.pool_size, ++step) {
        if (seq.size() <= step) seq.emplace_back(F, 0.0);
        for (std::size_t f = 0; f < F; ++f) {
          double best = -1e300;
          for (std::size_t t = start; t < std::min(T, start + c.pool_size); ++t) {
            double acc = k.bias[f];
            for (std::size_t j = 0; j < width; ++j)
              for (std::size_t d = 0; d < D; ++d)
                acc += k.weight[(f * width + j) * D + d] * table->at(s.indices[t + j], d);
            best = std::max(best, std::max(0.0, acc));
          }
          seq[step][f] += best;
        }
      }
    }
  }
  std::vector<double> h(H, 0.0), cell(H, 0.0);
  for (const auto& x : seq) {
    std::vector<double> z(4 * H);
    for (std::size_t r = 0; r < 4 * H; ++r) {
      double acc = m.lstm.b[r];
      for (std::size_t i = 0; i < F; ++i) acc += m.lstm.wx.at(r, i) * x[i];
      for (std::size_t i = 0; i < H; ++i) acc += m.lstm.wh.at(r, i) * h[i];
      z[r] = acc;
    }
    for (std::size_t j = 0; j < H; ++j) {
      const double ig = sig(z[j]), fg = sig(z[H + j]), g = std::tanh(z[2 * H + j]),
                   og = sig(z[3 * H + j]);
      cell[j] = fg * cell[j] + ig * g;
      h[j] = og * std::tanh(cell[j]);
    }
  }
  std::vector<double> dense(c.dense_size);
  for (std::size_t r = 0; r < c.dense_size; ++r) {
    double acc = m.dense_b[r];
    for (std::size_t i = 0; i < H; ++i) acc += m.dense_w.at(r, i) * h[i];
    dense[r] = std::max(0.0, acc);
  }
  std::vector<double> logits(kNumEmotions);
  double mx = -1e300;
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    double acc = m.out_b[k];
    for (std::size_t i = 0; i < c.dense_size; ++i) acc += m.out_w.at(k, i) * dense[i];
    logits[k] = acc;
    mx = std::max(mx, acc);
  }
  double z = 0;
  for (auto& l : logits) z += (l = std::exp(l - mx));
  for (auto& l : logits) l /= z;
  return logits;
}

}  // namespace

TEST(Conv1d, MatchesBruteForce) {
  Rng rng(1);
  const Tensor in = random_tensor({9, 4}, rng);
  ConvKernels k{random_tensor({3, 3, 4}, rng), random_tensor({3}, rng)};
  const Tensor out = conv1d_forward(in, k);
  ASSERT_EQ(out.shape(), (std::vector<std::size_t>{7, 3}));
  for (std::size_t t = 0; t < 7; ++t)
    for (std::size_t f = 0; f < 3; ++f) {
      double acc = k.bias[f];
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t d = 0; d < 4; ++d) acc += k.weight[(f * 3 + j) * 4 + d] * in.at(t + j, d);
      EXPECT_NEAR(out.at(t, f), acc, 1e-12);
    }
}

TEST(MaxPool, ShortLastWindowAndEarliestTie) {
  const Tensor in({5, 2}, {1, 7, 3, 7, 2, 0, 9, 1, 4, 4});
  const auto p = maxpool1d(in, 2);
  ASSERT_EQ(p.output.shape(), (std::vector<std::size_t>{3, 2}));
  EXPECT_EQ(p.output, Tensor({3, 2}, {3, 7, 9, 1, 4, 4}));
  EXPECT_EQ(p.argmax[1], 0u);  // tie between rows 0 and 1 goes to row 0
  EXPECT_EQ(p.argmax[4], 4u);
  Tensor d({5, 2});
  maxpool1d_backward(p, Tensor({3, 2}, 1.0), d);
  EXPECT_EQ(d, Tensor({5, 2}, {0, 1, 1, 0, 0, 0, 1, 1, 1, 1}));
}

TEST(MaxPool, MatchesBruteForce) {
  Rng rng(2);
  const Tensor in = random_tensor({11, 3}, rng);
  const auto p = maxpool1d(in, 4);
  for (std::size_t w = 0; w < 3; ++w)
    for (std::size_t f = 0; f < 3; ++f) {
      double best = -1e300;
      for (std::size_t t = w * 4; t < std::min<std::size_t>(11, w * 4 + 4); ++t)
        best = std::max(best, in.at(t, f));
      EXPECT_NEAR(p.output.at(w, f), best, 1e-12);
    }
}

TEST(Lstm, SingleStepByHand) {
  // H = 1, in = 1: every gate pre-activation equals x.
  LstmParams p{Tensor({4, 1}, 1.0), Tensor({4, 1}, 0.0), Tensor({4}, 0.0)};
  const auto cache = lstm_forward(Tensor({1, 1}, {0.5}), p);
  const double i = sig(0.5), g = std::tanh(0.5), o = sig(0.5);
  EXPECT_NEAR(cache.cell.at(0, 0), i * g, 1e-12);
  EXPECT_NEAR(cache.hidden.at(0, 0), o * std::tanh(i * g), 1e-12);
}

TEST(Lstm, MatchesBruteForceRecurrence) {
  Rng rng(4);
  const std::size_t H = 3, I = 2, T = 5;
  LstmParams p{random_tensor({4 * H, I}, rng), random_tensor({4 * H, H}, rng),
               random_tensor({4 * H}, rng)};
  const Tensor x = random_tensor({T, I}, rng);
  const auto cache = lstm_forward(x, p);
  std::vector<double> h(H), c(H);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> z(4 * H);
    for (std::size_t r = 0; r < 4 * H; ++r) {
      z[r] = p.b[r];
      for (std::size_t i = 0; i < I; ++i) z[r] += p.wx.at(r, i) * x.at(t, i);
      for (std::size_t i = 0; i < H; ++i) z[r] += p.wh.at(r, i) * h[i];
    }
    for (std::size_t j = 0; j < H; ++j) {
      c[j] = sig(z[H + j]) * c[j] + sig(z[j]) * std::tanh(z[2 * H + j]);
      h[j] = sig(z[3 * H + j]) * std::tanh(c[j]);
      EXPECT_NEAR(cache.hidden.at(t, j), h[j], 1e-12);
      EXPECT_NEAR(cache.cell.at(t, j), c[j], 1e-12);
    }
  }
}

TEST(Softmax, StableAndInOpenInterval) {
  const std::vector<double> logits{1000, 999, -1000, 0, 3, 2, 1, -5};
  const auto p = softmax(logits);
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  const auto q = softmax(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
  for (double v : q) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(CrossEntropy, UniformLogitsGiveLnEight) {
  const std::vector<double> zeros(8, 0.0);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(cross_entropy(zeros, k), std::log(8.0), 1e-12);
}

TEST(Forward, MatchesStraightLineOracle) {
  const auto m = randomized_model(tiny_config());
  const std::vector<text::EncodedSentence> inputs{
      {{2, 3, 4, 5, 1, 0, 0}, 5}, {{6, 7, 8, 9, 2, 3, 4}, 7}, {{0, 0, 0, 0, 0, 0, 0}, 0}};
  for (const auto& s : inputs) {
    const auto got = predict(m, s);
    const auto want = oracle_forward(m, s);
    for (std::size_t k = 0; k < kNumEmotions; ++k) EXPECT_NEAR(got[k], want[k], 1e-12);
  }
}

TEST(Forward, DistributionIsProbability) {
  const auto m = randomized_model(tiny_config());
  const auto p = predict(m, {{2, 3, 4, 5, 1, 0, 0}, 5});
  ASSERT_EQ(p.size(), kNumEmotions);
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  for (double v : p) EXPECT_TRUE(v > 0.0 && v < 1.0);
}

TEST(Forward, RejectsWrongLength) {
  const auto m = randomized_model(tiny_config());
  EXPECT_THROW(predict(m, {{2, 3}, 2}), ShapeMismatch);
}

class GradientCheck : public ::testing::TestWithParam<LayerOrder> {};

TEST_P(GradientCheck, AnalyticMatchesCentralDifference) {
  auto m = randomized_model(tiny_config(GetParam()));
  const std::vector<text::EncodedSentence> in{{{2, 3, 4, 5, 1, 0, 0}, 5},
                                              {{6, 7, 8, 9, 2, 3, 4}, 7}};
  const std::vector<Emotion> lab{Emotion::Joy, Emotion::Anger};
  const Batch b{in, lab};
  Rng r0(5);
  const auto g = backward(m, b, true, r0);
  auto tens = trainable_tensors(m);
  const double h = 1e-5;
  for (std::size_t t = 0; t < tens.size(); ++t) {
    // The pad row of the tunable table is frozen, so its analytic gradient is zero by design.
    const std::size_t first = t == 0 ? m.config.embedding_dim : 0;
    for (std::size_t i = first; i < tens[t].tensor->size(); ++i) {
      double& p = (*tens[t].tensor)[i];
      const double orig = p;
      p = orig + h;
      Rng r1(5);
      const double lp = batch_loss(m, b, true, r1);
      p = orig - h;
      Rng r2(5);
      const double lm = batch_loss(m, b, true, r2);
      p = orig;
      const double num = (lp - lm) / (2 * h), an = g.grads[t][i];
      const double rel = std::abs(an - num) / std::max({std::abs(an), std::abs(num), 1e-6});
      EXPECT_LT(rel, 1e-4) << tens[t].name << "[" << i << "]";
    }
  }
}

INSTANTIATE_TEST_SUITE_P(BothOrders, GradientCheck,
                         ::testing::Values(LayerOrder::CnnLstm, LayerOrder::LstmCnn));

TEST(Backward, PadRowReceivesNoGradient) {
  const auto m = randomized_model(tiny_config());
  const std::vector<text::EncodedSentence> in{{{2, 3, 0, 0, 0, 0, 0}, 2}};
  const std::vector<Emotion> lab{Emotion::Fear};
  Rng r(1);
  const auto g = backward(m, {in, lab}, false, r);
  for (std::size_t d = 0; d < m.config.embedding_dim; ++d) EXPECT_EQ(g.grads[0][d], 0.0);
}

TEST(Adadelta, FirstStepMatchesFormula) {
  Tensor w({1}, {1.0});
  std::vector<Tensor*> params{&w};
  AdadeltaState st(params, {});
  const std::vector<Tensor> grads{Tensor({1}, {1.0})};
  adadelta_step(params, grads, st);
  // Eg2 = 0.05, dx = -sqrt(1e-6) / sqrt(0.05 + 1e-6)
  const double eg2 = 0.05;
  const double dx = -std::sqrt(1e-6) / std::sqrt(eg2 + 1e-6);
  EXPECT_NEAR(dx, -0.004472, 1e-6);
  EXPECT_NEAR(w[0], 1.0 + dx, 1e-12);
  EXPECT_NEAR(st.mean_sq_update[0][0], 0.05 * dx * dx, 1e-15);
}

TEST(Adadelta, TwoStepsMatchRecurrence) {
  Tensor w({2}, {0.3, -0.7});
  std::vector<Tensor*> params{&w};
  AdadeltaState st(params, {0.9, 1e-4});
  double eg[2] = {0, 0}, ex[2] = {0, 0}, ref[2] = {0.3, -0.7};
  const double gs[2][2] = {{0.5, -2.0}, {0.1, 3.0}};
  for (const auto& gv : gs) {
    adadelta_step(params, std::vector<Tensor>{Tensor({2}, {gv[0], gv[1]})}, st);
    for (int i = 0; i < 2; ++i) {
      eg[i] = 0.9 * eg[i] + 0.1 * gv[i] * gv[i];
      const double dx = -std::sqrt(ex[i] + 1e-4) / std::sqrt(eg[i] + 1e-4) * gv[i];
      ex[i] = 0.9 * ex[i] + 0.1 * dx * dx;
      ref[i] += dx;
      EXPECT_NEAR(w[i], ref[i], 1e-12);
    }
  }
}

TEST(ClipL2, RescalesOnlyLongRows) {
  Tensor w({2, 2}, {3, 4, 0.3, 0.4});
  clip_l2(w, 3.0);
  EXPECT_NEAR(w.at(0, 0), 1.8, 1e-12);
  EXPECT_NEAR(w.at(0, 1), 2.4, 1e-12);
  EXPECT_EQ(w.at(1, 0), 0.3);
  EXPECT_EQ(w.at(1, 1), 0.4);
}

TEST(Model, ConfigValidation) {
  auto mc = tiny_config();
  mc.kernel_widths = {8};
  EXPECT_THROW(mc.validate(), ShapeMismatch);
  mc = tiny_config();
  mc.hidden_size = 0;
  EXPECT_THROW(mc.validate(), ShapeMismatch);
  EXPECT_NO_THROW(tiny_config().validate());
}

TEST(Model, DefaultPooledSteps) {
  ModelConfig mc;
  // widths 2,3,5,6,8 over 40 tokens with pool 4: 10+10+9+9+9
  EXPECT_EQ(mc.pooled_steps(), 47u);
}

TEST(Model, InitIsSeededAndStaticMatchesTunable) {
  const auto mc = tiny_config();
  const auto em = random_embedding(mc.vocab_size, mc.embedding_dim, 11);
  const auto a = init_model(mc, em, 1), b = init_model(mc, em, 1), c = init_model(mc, em, 2);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  EXPECT_EQ(a.static_embedding, a.tunable_embedding);
  EXPECT_EQ(a.lstm.b[mc.hidden_size], 1.0);
  EXPECT_EQ(a.lstm.b[0], 0.0);
}

namespace {

EncodedDataset toy_dataset() {
  EncodedDataset d;
  for (std::uint32_t i = 0; i < 16; ++i) {
    const auto k = i % 8;
    d.inputs.push_back({{k + 2, static_cast<std::uint32_t>((i / 8) ? 1 : 0), 0, 0, 0, 0, 0}, 2});
    d.labels.push_back(emotion_from_index(k));
  }
  return d;
}

}  // namespace

TEST(Trainer, ZeroEpochsLeavesModelUnchanged) {
  const auto m = randomized_model(tiny_config());
  TrainConfig tc;
  tc.epochs = 0;
  const auto r = train(m, toy_dataset(), {}, tc);
  EXPECT_TRUE(r.model == m);
  EXPECT_TRUE(r.history.empty());
}

TEST(Trainer, DeterministicForSeed) {
  const auto m = randomized_model(tiny_config());
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 4;
  const auto a = train(m, toy_dataset(), {}, tc);
  const auto b = train(m, toy_dataset(), {}, tc);
  EXPECT_TRUE(a.model == b.model);
  ASSERT_EQ(a.history.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.history[i].loss, b.history[i].loss);
  EXPECT_TRUE(std::isnan(a.history[0].val_accuracy));
}

TEST(Trainer, StaticChannelFrozenAndPadRowZero) {
  const auto m = randomized_model(tiny_config());
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 4;
  const auto r = train(m, toy_dataset(), {}, tc);
  EXPECT_EQ(r.model.static_embedding, m.static_embedding);
  EXPECT_FALSE(r.model.tunable_embedding == m.tunable_embedding);
  for (std::size_t d = 0; d < m.config.embedding_dim; ++d) EXPECT_EQ(r.model.tunable_embedding[d], 0.0);
}

TEST(Trainer, LearnsSeparableToyTask) {
  auto mc = tiny_config();
  mc.dropout = 0.0;
  auto m = init_model(mc, random_embedding(mc.vocab_size, mc.embedding_dim, 3), 7);
  TrainConfig tc;
  tc.epochs = 200;
  tc.batch_size = 4;
  tc.target_train_accuracy = 1.0;
  const auto data = toy_dataset();
  const auto r = train(m, data, {}, tc);
  EXPECT_GT(accuracy(r.model, data), 0.9);
  EXPECT_LT(r.history.back().loss, r.history.front().loss);
}
