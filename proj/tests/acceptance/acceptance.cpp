// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "afeng/affect.hpp"
#include "afeng/baselines.hpp"
#include "afeng/bml.hpp"
#include "afeng/corpus.hpp"
#include "afeng/eval.hpp"
#include "afeng/nn/checkpoint.hpp"
#include "afeng/nn/layers.hpp"
#include "afeng/nn/network.hpp"
#include "afeng/nn/optim.hpp"
#include "afeng/pipeline.hpp"
#include "afeng/service.hpp"

using namespace afeng;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nn::Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng) {
  nn::Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(-1, 1);
  return t;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// --- gradient check --------------------------------------------------------

Outcome gradient_check() {
  const auto t0 = Clock::now();
  nn::ModelConfig mc;
  mc.vocab_size = 10;
  mc.embedding_dim = 6;
  mc.max_len = 7;
  mc.kernel_widths = {2, 3};
  mc.filter_count = 3;
  mc.hidden_size = 5;
  mc.dense_size = 5;
  embed::EmbeddingMatrix em{mc.vocab_size, mc.embedding_dim,
                            std::vector<double>(mc.vocab_size * mc.embedding_dim), false};
  Rng r(3);
  for (std::size_t i = mc.embedding_dim; i < em.values.size(); ++i) em.values[i] = r.uniform(-0.5, 0.5);
  auto m = nn::init_model(mc, em, 7);
  for (auto& nt : nn::trainable_tensors(m))
    for (auto& v : nt.tensor->values()) v = r.uniform(-0.5, 0.5);
  std::fill_n(m.tunable_embedding.data(), mc.embedding_dim, 0.0);

  const std::vector<text::EncodedSentence> in{{{2, 3, 4, 5, 1, 0, 0}, 5},
                                              {{6, 7, 8, 9, 2, 3, 4}, 7}};
  const std::vector<Emotion> lab{Emotion::Joy, Emotion::Anger};
  const nn::Batch b{in, lab};
  Rng r0(5);
  const auto g = nn::backward(m, b, true, r0);
  auto tens = nn::trainable_tensors(m);
  double worst = 0;
  std::size_t checked = 0;
  const double h = 1e-5;
  for (std::size_t t = 0; t < tens.size(); ++t) {
    // Row 0 of the tunable table is the frozen pad row.
    const std::size_t first = t == 0 ? mc.embedding_dim : 0;
    for (std::size_t i = first; i < tens[t].tensor->size(); ++i) {
      double& p = (*tens[t].tensor)[i];
      const double orig = p;
      p = orig + h;
      Rng r1(5);
      const double lp = nn::batch_loss(m, b, true, r1);
      p = orig - h;
      Rng r2(5);
      const double lm = nn::batch_loss(m, b, true, r2);
      p = orig;
      const double num = (lp - lm) / (2 * h), an = g.grads[t][i];
      worst = std::max(worst, std::abs(an - num) / std::max({std::abs(an), std::abs(num), 1e-6}));
      ++checked;
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 30,
          fmt("%zu parameters, max relative error %.2e, %.2f s", checked, worst, secs)};
}

// --- layer oracles ---------------------------------------------------------

Outcome layer_oracles() {
  Rng rng(101);
  double conv_err = 0, pool_err = 0, lstm_err = 0;
  for (int n = 0; n < 100; ++n) {
    const std::size_t T = 3 + rng.below(10), D = 1 + rng.below(5), F = 1 + rng.below(4),
                      W = 1 + rng.below(std::min<std::size_t>(T, 4));
    const auto in = random_tensor({T, D}, rng);
    nn::ConvKernels k{random_tensor({F, W, D}, rng), random_tensor({F}, rng)};
    const auto out = nn::conv1d_forward(in, k);
    for (std::size_t t = 0; t + W <= T; ++t)
      for (std::size_t f = 0; f < F; ++f) {
        double acc = k.bias[f];
        for (std::size_t j = 0; j < W; ++j)
          for (std::size_t d = 0; d < D; ++d) acc += k.weight[(f * W + j) * D + d] * in[(t + j) * D + d];
        conv_err = std::max(conv_err, std::abs(out[t * F + f] - acc));
      }

    const std::size_t P = 1 + rng.below(5);
    const auto pooled = nn::maxpool1d(in, P);
    for (std::size_t w = 0; w * P < T; ++w)
      for (std::size_t d = 0; d < D; ++d) {
        double best = -1e300;
        for (std::size_t t = w * P; t < std::min(T, w * P + P); ++t) best = std::max(best, in[t * D + d]);
        pool_err = std::max(pool_err, std::abs(pooled.output[w * D + d] - best));
      }

    const std::size_t H = 1 + rng.below(4);
    nn::LstmParams lp{random_tensor({4 * H, D}, rng), random_tensor({4 * H, H}, rng),
                      random_tensor({4 * H}, rng)};
    const auto cache = nn::lstm_forward(in, lp);
    std::vector<double> h(H, 0.0), c(H, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<double> z(4 * H);
      for (std::size_t row = 0; row < 4 * H; ++row) {
        z[row] = lp.b[row];
        for (std::size_t i = 0; i < D; ++i) z[row] += lp.wx[row * D + i] * in[t * D + i];
        for (std::size_t i = 0; i < H; ++i) z[row] += lp.wh[row * H + i] * h[i];
      }
      for (std::size_t j = 0; j < H; ++j) {
        c[j] = sig(z[H + j]) * c[j] + sig(z[j]) * std::tanh(z[2 * H + j]);
        h[j] = sig(z[3 * H + j]) * std::tanh(c[j]);
        lstm_err = std::max(lstm_err, std::abs(cache.hidden[t * H + j] - h[j]));
      }
    }
  }
  const bool ok = conv_err <= 1e-12 && pool_err <= 1e-12 && lstm_err <= 1e-12;
  return {ok, fmt("100 instances each: conv %.1e, pool %.1e, lstm %.1e", conv_err, pool_err, lstm_err)};
}

// --- adadelta --------------------------------------------------------------

Outcome adadelta() {
  const double rho = 0.95, eps = 1e-6;
  nn::Tensor w({3}, {1.0, -0.5, 2.0});
  std::vector<nn::Tensor*> params{&w};
  nn::AdadeltaState st(params, {rho, eps});
  double eg[3] = {}, ex[3] = {}, ref[3] = {1.0, -0.5, 2.0};
  const double grads[3][3] = {{1.0, 0.2, -3.0}, {0.5, -0.1, 2.0}, {-2.0, 0.0, 1.0}};
  double err = 0, first_delta = 0;
  for (int s = 0; s < 3; ++s) {
    nn::adadelta_step(params, std::vector<nn::Tensor>{nn::Tensor({3}, {grads[s][0], grads[s][1], grads[s][2]})}, st);
    for (int i = 0; i < 3; ++i) {
      const double g = grads[s][i];
      eg[i] = rho * eg[i] + (1 - rho) * g * g;
      const double dx = -std::sqrt(ex[i] + eps) / std::sqrt(eg[i] + eps) * g;
      ex[i] = rho * ex[i] + (1 - rho) * dx * dx;
      ref[i] += dx;
      if (s == 0 && i == 0) first_delta = w[0] - 1.0;
      err = std::max(err, std::abs(w[i] - ref[i]));
    }
  }
  const bool ok = err <= 1e-12 && std::abs(first_delta - (-0.004472)) < 5e-7;
  return {ok, fmt("max deviation %.1e, first step for g=1: %.6f", err, first_delta)};
}

// --- training runs ---------------------------------------------------------

pipeline::PipelineConfig acceptance_config() {
  pipeline::PipelineConfig cfg;
  cfg.model.embedding_dim = 32;
  cfg.model.max_len = 16;
  cfg.model.filter_count = 16;
  cfg.model.hidden_size = 32;
  cfg.model.dense_size = 32;
  cfg.train.epochs = 300;
  cfg.train.batch_size = 16;
  cfg.train.seed = 42;
  return cfg;
}

corpus::CorpusSplit acceptance_split() {
  return corpus::split(corpus::synthetic_corpus(20, 42), 42, 0.2);
}

struct RunArtifacts {
  pipeline::Classifier classifier;
  double train_accuracy = 0;
  eval::ClassificationReport report;
  double seconds = 0;
};

// Train, evaluate and run a short interaction session, writing every artifact into dir.
RunArtifacts full_run(const fs::path& dir) {
  const auto t0 = Clock::now();
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto s = acceptance_split();
  const auto cfg = acceptance_config();
  auto out = pipeline::train_classifier(s, cfg);
  pipeline::save_model_dir(dir / "model", out.classifier, out.history);
  const auto ev = pipeline::evaluate(out.classifier, s.test);
  std::ofstream(dir / "report.csv", std::ios::binary) << eval::report_csv(ev.report);
  std::ofstream(dir / "report.txt", std::ios::binary) << eval::format_report(ev.report);
  std::ofstream(dir / "confusion.csv", std::ios::binary) << eval::confusion_csv(ev.confusion);

  RunArtifacts a;
  a.train_accuracy = nn::accuracy(
      out.classifier.model,
      pipeline::encode_corpus(s.train, out.classifier.vocab, out.classifier.prep, cfg.model.max_len));
  a.report = ev.report;
  a.seconds = seconds_since(t0);
  {
    service::EngineOptions o;
    std::int64_t tick = 1'700'000'000'000;
    o.clock = [&tick] { return tick += 1000; };
    service::Engine engine(out.classifier, dir / "interactions.log", o);
    for (const char* text : {"THANK YOU FOR MY OBAMA CUT OUT!!!!!! I am elated that he's back home",
                             "I am terrified of the dark", "what a wonderful surprise"})
      engine.interact(text);
  }
  a.classifier = std::move(out.classifier);
  return a;
}

Outcome synthetic_learning(const RunArtifacts& run) {
  const double p = run.report.macro.precision;
  const bool ok = run.train_accuracy >= 0.95 && p >= 0.85 && run.seconds < 600;
  return {ok, fmt("train accuracy %.3f, held-out macro precision %.3f, %.1f s", run.train_accuracy,
                  p, run.seconds)};
}

Outcome directional(const RunArtifacts& run) {
  const auto s = acceptance_split();
  const auto prep = run.classifier.prep;
  const auto grid = baselines::default_grid();
  const auto rows = baselines::run_comparison(pipeline::labeled_tokens(s.train, prep),
                                              pipeline::labeled_tokens(s.test, prep), grid);
  const auto cnn = pipeline::comparison_row(run.classifier, s.test);
  double best = 0;
  std::string best_name;
  for (const auto& r : rows) {
    if (r.macro_precision > best) {
      best = r.macro_precision;
      best_name = r.classifier + " / " + r.vectorizer;
    }
  }
  return {cnn.macro_precision >= best,
          fmt("CNN-LSTM %.3f vs best baseline %.3f (%s)", cnn.macro_precision, best,
              best_name.c_str())};
}

Outcome determinism(const fs::path& a, const fs::path& b) {
  std::vector<std::string> differing;
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), a);
    ++compared;
    if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) differing.push_back(rel.string());
  }
  std::size_t in_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) ++in_b;
  const bool ok = differing.empty() && in_b == compared && compared >= 7;
  std::string detail = fmt("%zu artifacts compared byte for byte", compared);
  for (const auto& d : differing) detail += ", differs: " + d;
  return {ok, detail};
}

// --- metrics ---------------------------------------------------------------

Outcome metrics() {
  const double f1 = eval::f1_score(0.96, 0.92);
  const double oracle = 2 * 0.96 * 0.92 / (0.96 + 0.92);
  bool ok = std::abs(f1 - oracle) < 1e-15 && std::round(f1 * 100) == 94;

  std::vector<Emotion> labels;
  Rng r(8);
  for (int i = 0; i < 400; ++i) labels.push_back(emotion_from_index(r.below(8)));
  const auto perfect = eval::report(eval::confusion(labels, labels));
  for (const auto& c : perfect.per_class) ok = ok && c.precision == 1 && c.recall == 1 && c.f1 == 1;
  ok = ok && perfect.macro.precision == 1 && perfect.macro.recall == 1 && perfect.macro.f1 == 1;

  std::vector<Emotion> pred;
  for (int i = 0; i < 400; ++i) pred.push_back(emotion_from_index(r.below(8)));
  const auto cm = eval::confusion(labels, pred);
  std::uint64_t row_total = 0, col_total = 0;
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    row_total += cm.row_sum(k);
    col_total += cm.col_sum(k);
  }
  const auto rep = eval::report(cm);
  std::uint64_t support = 0;
  for (const auto& c : rep.per_class) support += c.support;
  ok = ok && cm.total() == 400 && row_total == 400 && col_total == 400 && support == 400 &&
       rep.macro.support == 400;
  return {ok, fmt("F1(0.96, 0.92) = %.4f, perfect predictions all 1.0, totals 400/400", f1)};
}

// --- affect tables ---------------------------------------------------------

Outcome mapping() {
  std::set<std::pair<std::string, std::string>> pairs;
  std::set<std::string> labels;
  int pos = 0, neu = 0, neg = 0;
  bool nonempty = true;
  for (auto e : kAllEmotions) {
    const auto b = affect::derive_behaviors(e);
    const auto [agent, valence] = affect::map_agent_emotion(e);
    nonempty = nonempty && !agent.empty() && !b.goal_behavior.empty() && !b.self_behavior.empty() &&
               !b.other_behavior.empty();
    pairs.insert({b.self_behavior, b.other_behavior});
    labels.insert(b.self_behavior);
    labels.insert(b.other_behavior);
    const bool positive = e == Emotion::Anticipation || e == Emotion::Joy || e == Emotion::Trust;
    const bool neutral = e == Emotion::Surprise;
    if (valence == affect::Valence::Positive && positive) ++pos;
    else if (valence == affect::Valence::Neutral && neutral) ++neu;
    else if (valence == affect::Valence::Negative && !positive && !neutral) ++neg;
  }
  const bool ok = nonempty && pairs.size() == 8 && labels.size() == 16 && pos == 3 && neu == 1 && neg == 4;
  return {ok, fmt("8/8 emotions mapped, %zu distinct pairs, %zu behaviors, valence %d/%d/%d", pairs.size(),
                  labels.size(), pos, neu, neg)};
}

// --- bml -------------------------------------------------------------------

Outcome bml_round_trip() {
  int good = 0;
  std::string bad;
  for (auto e : kAllEmotions) {
    const auto a = affect::appraise(affect::EmotionDistribution::peaked(e));
    const auto doc = bml::compose(a, affect::derive_behaviors(a.dominant));
    const auto xml = bml::serialize(doc);
    std::string name(name_of(e));
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    const auto golden = slurp(fs::path(AFENG_GOLDEN_DIR) / (name + ".xml"));
    const auto v = bml::validate(xml);
    if (xml == golden && v.ok() && *v.document == doc) ++good;
    else bad += " " + name;
  }
  return {good == 8, fmt("%d/8 documents match golden files and parse back equal%s", good,
                         bad.empty() ? "" : (";" + bad).c_str())};
}

// --- checkpoint ------------------------------------------------------------

Outcome checkpoint_round_trip(const fs::path& dir) {
  nn::ModelConfig mc;
  mc.vocab_size = 40;
  mc.embedding_dim = 10;
  mc.max_len = 12;
  mc.kernel_widths = {2, 3, 5};
  mc.filter_count = 5;
  mc.hidden_size = 7;
  mc.dense_size = 6;
  embed::EmbeddingMatrix em{mc.vocab_size, mc.embedding_dim,
                            std::vector<double>(mc.vocab_size * mc.embedding_dim), false};
  Rng r(55);
  for (std::size_t i = mc.embedding_dim; i < em.values.size(); ++i) em.values[i] = r.uniform(-1, 1);
  auto m = nn::init_model(mc, em, 55);
  for (auto& nt : nn::trainable_tensors(m))
    for (auto& v : nt.tensor->values()) v += r.uniform(-0.1, 0.1);
  std::fill_n(m.tunable_embedding.data(), mc.embedding_dim, 0.0);
  const auto path = dir / "roundtrip.ckpt";
  fs::create_directories(dir);
  nn::save_checkpoint(m, {123, 42}, path);
  const auto loaded = nn::load_checkpoint(path, &mc);
  int equal = 0;
  for (int n = 0; n < 100; ++n) {
    text::EncodedSentence s;
    s.true_length = 1 + r.below(mc.max_len);
    for (std::size_t t = 0; t < mc.max_len; ++t)
      s.indices.push_back(t < s.true_length ? static_cast<std::uint32_t>(1 + r.below(mc.vocab_size - 1)) : 0);
    if (nn::predict(m, s) == nn::predict(loaded.model, s)) ++equal;
  }
  return {equal == 100, fmt("%d/100 forward outputs bit-identical after reload", equal)};
}

// --- pearson ---------------------------------------------------------------

// Two-tailed Student-t tail from the finite series for integer degrees of freedom.
double t_tail(double t, int dof) {
  const double theta = std::atan(std::abs(t) / std::sqrt(static_cast<double>(dof)));
  const double s = std::sin(theta), c2 = std::cos(theta) * std::cos(theta);
  double term = 1.0, sum = 1.0;
  if (dof % 2 == 0) {
    for (int k = 2; k <= dof - 2; k += 2) sum += (term *= c2 * (k - 1) / k);
    return 1.0 - s * sum;
  }
  if (dof == 1) return 1.0 - 2.0 * theta / std::numbers::pi;
  for (int k = 3; k <= dof - 2; k += 2) sum += (term *= c2 * (k - 1) / k);
  return 1.0 - 2.0 / std::numbers::pi * (theta + s * std::cos(theta) * sum);
}

Outcome pearson() {
  std::vector<double> x(20), y(20), neg(20);
  Rng r(2024);
  for (std::size_t i = 0; i < 20; ++i) {
    x[i] = r.uniform(-5, 5);
    neg[i] = -3 * x[i] + 1;
  }
  const double r_pos = eval::pearson(x, x).r, r_neg = eval::pearson(x, neg).r;
  bool ok = std::abs(r_pos - 1) < 1e-12 && std::abs(r_neg + 1) < 1e-12;
  double err_r = 0, err_p = 0;
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t i = 0; i < 20; ++i) {
      x[i] = r.uniform(-5, 5);
      y[i] = 0.3 * x[i] + r.uniform(-5, 5);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      mx += x[i] / 20;
      my += y[i] / 20;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    const double rr = sxy / std::sqrt(sxx * syy);
    const double p = t_tail(rr * std::sqrt(18 / (1 - rr * rr)), 18);
    const auto got = eval::pearson(x, y);
    err_r = std::max(err_r, std::abs(got.r - rr));
    err_p = std::max(err_p, std::abs(got.p - p));
  }
  ok = ok && err_r <= 1e-10 && err_p <= 1e-10;
  return {ok, fmt("r(x,x) = %.12f, r(x,-x) = %.12f, n=20 max error r %.1e p %.1e", r_pos, r_neg, err_r, err_p)};
}

}  // namespace

int main() {
  const auto work = fs::temp_directory_path() / ("afeng_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  int failures = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  };

  report("gradient correctness", gradient_check);
  report("layer oracle equivalence", layer_oracles);
  report("adadelta update", adadelta);

  RunArtifacts first, second;
  bool trained = false;
  try {
    first = full_run(work / "run1");
    second = full_run(work / "run2");
    trained = true;
    const auto fig5 = first.classifier.predict(
        "THANK YOU FOR MY OBAMA CUT OUT!!!!!! I am elated that he's back home");
    std::printf("      example sentence predicted as %s\n", std::string(name_of(fig5)).c_str());
  } catch (const std::exception& e) {
    std::printf("      training failed: %s\n", e.what());
  }
  report("synthetic corpus learning", [&] { return trained ? synthetic_learning(first) : Outcome{false, "no run"}; });
  report("baseline comparison", [&] { return trained ? directional(first) : Outcome{false, "no run"}; });
  report("metrics oracle", metrics);
  report("affect mapping totality", mapping);
  report("bml round trip", bml_round_trip);
  report("checkpoint round trip", [&] { return checkpoint_round_trip(work / "ckpt"); });
  report("pearson utility", pearson);
  report("run determinism",
         [&] { return trained ? determinism(work / "run1", work / "run2") : Outcome{false, "no run"}; });

  fs::remove_all(work);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
