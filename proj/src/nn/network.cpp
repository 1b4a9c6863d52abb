#include "afeng/nn/network.hpp"

#include <algorithm>
#include <cmath>

namespace afeng::nn {
namespace {

struct WidthCache {
  Tensor pre;        // conv output before ReLU
  PoolResult pooled; // max-pool over ReLU(pre)
};

struct ExampleCache {
  const text::EncodedSentence* sentence = nullptr;
  // CnnLstm: one embedded input per channel. LstmCnn: a single summed input.
  std::vector<Tensor> embedded;
  std::vector<std::vector<WidthCache>> conv;  // [channel][width]
  LstmCache lstm;
  std::vector<double> dense_in;
  Tensor dense_pre;
  std::vector<double> dense_out;  // after ReLU and dropout
  std::vector<double> mask;       // dropout multipliers
  std::vector<double> logits;
  std::vector<double> probs;
};

Tensor embed_rows(const Tensor& table, const text::EncodedSentence& s, std::size_t max_len) {
  const auto dim = table.dim(1);
  if (s.indices.size() != max_len) {
    throw ShapeMismatch("encoded sentence length " + std::to_string(s.indices.size()) +
                        " != model max_len " + std::to_string(max_len));
  }
  Tensor out({max_len, dim});
  for (std::size_t t = 0; t < max_len; ++t) {
    const auto idx = s.indices[t];
    if (idx >= table.dim(0)) throw ShapeMismatch("token index beyond vocabulary");
    const auto src = table.row(idx);
    std::copy(src.begin(), src.end(), out.row(t).begin());
  }
  return out;
}

std::vector<WidthCache> conv_stack(const CnnLstmModel& m, const Tensor& input) {
  std::vector<WidthCache> out;
  out.reserve(m.conv.size());
  for (const auto& k : m.conv) {
    Tensor pre = conv1d_forward(input, k);
    Tensor act = pre;
    relu_inplace(act);
    auto pooled = maxpool1d(act, m.config.pool_size);
    out.push_back({std::move(pre), std::move(pooled)});
  }
  return out;
}

// Concatenates pooled maps along time, summing across channels.
Tensor join_pooled(const std::vector<std::vector<WidthCache>>& conv, std::size_t steps,
                   std::size_t filters) {
  Tensor seq({steps, filters});
  for (const auto& channel : conv) {
    std::size_t offset = 0;
    for (const auto& wc : channel) {
      const auto& p = wc.pooled.output;
      for (std::size_t i = 0; i < p.size(); ++i) seq[offset * filters + i] += p[i];
      offset += p.dim(0);
    }
  }
  return seq;
}

ExampleCache run_forward(const CnnLstmModel& m, const text::EncodedSentence& s, bool train_mode,
                         Rng& rng) {
  const auto& c = m.config;
  ExampleCache x;
  x.sentence = &s;
  const auto steps = c.pooled_steps();
  if (c.order == LayerOrder::CnnLstm) {
    x.embedded.push_back(embed_rows(m.static_embedding, s, c.max_len));
    x.embedded.push_back(embed_rows(m.tunable_embedding, s, c.max_len));
    for (const auto& e : x.embedded) x.conv.push_back(conv_stack(m, e));
    const Tensor seq = join_pooled(x.conv, steps, c.filter_count);
    x.lstm = lstm_forward(seq, m.lstm);
    const auto last = x.lstm.hidden.row(steps - 1);
    x.dense_in.assign(last.begin(), last.end());
  } else {
    Tensor summed = embed_rows(m.static_embedding, s, c.max_len);
    const Tensor tun = embed_rows(m.tunable_embedding, s, c.max_len);
    for (std::size_t i = 0; i < summed.size(); ++i) summed[i] += tun[i];
    x.embedded.push_back(std::move(summed));
    x.lstm = lstm_forward(x.embedded[0], m.lstm);
    x.conv.push_back(conv_stack(m, x.lstm.hidden));
    const Tensor seq = join_pooled(x.conv, steps, c.filter_count);
    x.dense_in.assign(seq.values().begin(), seq.values().end());
  }

  x.dense_pre = Tensor({c.dense_size});
  linear_forward(m.dense_w, m.dense_b, x.dense_in, x.dense_pre.values());
  x.dense_out.resize(c.dense_size);
  x.mask.assign(c.dense_size, 1.0);
  if (train_mode && c.dropout > 0.0) {
    const double keep_scale = 1.0 / (1.0 - c.dropout);
    for (auto& v : x.mask) v = rng.uniform() < c.dropout ? 0.0 : keep_scale;
  }
  for (std::size_t i = 0; i < c.dense_size; ++i) {
    x.dense_out[i] = std::max(0.0, x.dense_pre[i]) * x.mask[i];
  }
  x.logits.resize(kNumEmotions);
  linear_forward(m.out_w, m.out_b, x.dense_out, x.logits);
  x.probs = softmax(x.logits);
  return x;
}

void scatter_rows(const Tensor& d_embedded, const text::EncodedSentence& s, Tensor& d_table) {
  const auto dim = d_table.dim(1);
  for (std::size_t t = 0; t < s.indices.size(); ++t) {
    const auto idx = s.indices[t];
    if (idx == text::Vocabulary::kPad) continue;
    double* dst = d_table.data() + idx * dim;
    const double* src = d_embedded.data() + t * dim;
    for (std::size_t d = 0; d < dim; ++d) dst[d] += src[d];
  }
}

// Backprop of one width stack: d_pooled_seq holds d(loss)/d(joined sequence).
void conv_stack_backward(const CnnLstmModel& m, const Tensor& input,
                         const std::vector<WidthCache>& stack, const Tensor& d_seq,
                         std::vector<Tensor>& grads, std::size_t conv_grad_base,
                         Tensor* d_input) {
  const auto filters = m.config.filter_count;
  std::size_t offset = 0;
  for (std::size_t w = 0; w < stack.size(); ++w) {
    const auto& wc = stack[w];
    const auto rows = wc.pooled.output.dim(0);
    Tensor d_pool({rows, filters});
    std::copy_n(d_seq.data() + offset * filters, rows * filters, d_pool.data());
    offset += rows;
    Tensor d_pre({wc.pre.dim(0), filters});
    maxpool1d_backward(wc.pooled, d_pool, d_pre);
    relu_backward(wc.pre, d_pre);
    conv1d_backward(input, m.conv[w], d_pre, grads[conv_grad_base + 2 * w],
                    grads[conv_grad_base + 2 * w + 1], d_input);
  }
}

void backprop_example(const CnnLstmModel& m, const ExampleCache& x, std::size_t label,
                      double scale, std::vector<Tensor>& grads) {
  const auto& c = m.config;
  // Indices into trainable_tensors order.
  const std::size_t g_emb = 0;
  const std::size_t g_conv = 1;
  const std::size_t g_lstm = g_conv + 2 * m.conv.size();
  const std::size_t g_dense = g_lstm + 3;
  const std::size_t g_out = g_dense + 2;

  std::vector<double> d_logits(kNumEmotions);
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    d_logits[k] = scale * (x.probs[k] - (k == label ? 1.0 : 0.0));
  }
  std::vector<double> d_dense_out(c.dense_size);
  linear_backward(m.out_w, x.dense_out, d_logits, grads[g_out], grads[g_out + 1], d_dense_out);
  std::vector<double> d_dense_pre(c.dense_size);
  for (std::size_t i = 0; i < c.dense_size; ++i) {
    d_dense_pre[i] = x.dense_pre[i] > 0.0 ? d_dense_out[i] * x.mask[i] : 0.0;
  }
  std::vector<double> d_dense_in(x.dense_in.size());
  linear_backward(m.dense_w, x.dense_in, d_dense_pre, grads[g_dense], grads[g_dense + 1],
                  d_dense_in);

  LstmParams lstm_grads{std::move(grads[g_lstm]), std::move(grads[g_lstm + 1]),
                        std::move(grads[g_lstm + 2])};
  const auto steps = c.pooled_steps();
  if (c.order == LayerOrder::CnnLstm) {
    Tensor d_hidden({steps, c.hidden_size});
    std::copy(d_dense_in.begin(), d_dense_in.end(), d_hidden.row(steps - 1).begin());
    Tensor d_seq({steps, c.filter_count});
    lstm_backward(x.lstm, m.lstm, d_hidden, lstm_grads, &d_seq);
    // Static channel: conv weights still receive gradient, the table does not.
    conv_stack_backward(m, x.embedded[0], x.conv[0], d_seq, grads, g_conv, nullptr);
    Tensor d_tunable({c.max_len, c.embedding_dim});
    conv_stack_backward(m, x.embedded[1], x.conv[1], d_seq, grads, g_conv, &d_tunable);
    scatter_rows(d_tunable, *x.sentence, grads[g_emb]);
  } else {
    Tensor d_seq({steps, c.filter_count}, std::move(d_dense_in));
    Tensor d_hidden({c.max_len, c.hidden_size});
    conv_stack_backward(m, x.lstm.hidden, x.conv[0], d_seq, grads, g_conv, &d_hidden);
    Tensor d_input({c.max_len, c.embedding_dim});
    lstm_backward(x.lstm, m.lstm, d_hidden, lstm_grads, &d_input);
    scatter_rows(d_input, *x.sentence, grads[g_emb]);
  }
  grads[g_lstm] = std::move(lstm_grads.wx);
  grads[g_lstm + 1] = std::move(lstm_grads.wh);
  grads[g_lstm + 2] = std::move(lstm_grads.b);
}

void check_batch(const Batch& batch) {
  if (batch.inputs.empty()) throw std::invalid_argument("empty batch");
  if (batch.inputs.size() != batch.labels.size()) {
    throw std::invalid_argument("batch inputs and labels differ in length");
  }
}

}  // namespace

double cross_entropy(std::span<const double> logits, std::size_t label) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  return mx + std::log(sum) - logits[label];
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

Probabilities forward(const CnnLstmModel& model, const text::EncodedSentence& sentence,
                      bool train_mode, Rng& rng) {
  return run_forward(model, sentence, train_mode, rng).probs;
}

Probabilities predict(const CnnLstmModel& model, const text::EncodedSentence& sentence) {
  Rng unused(0);
  return run_forward(model, sentence, false, unused).probs;
}

BatchGradients backward(const CnnLstmModel& model, const Batch& batch, bool train_mode, Rng& rng) {
  check_batch(batch);
  BatchGradients out;
  for (const auto& t : trainable_tensors(model)) out.grads.emplace_back(t.tensor->shape());
  const double scale = 1.0 / static_cast<double>(batch.inputs.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.inputs.size(); ++i) {
    const auto x = run_forward(model, batch.inputs[i], train_mode, rng);
    const auto label = index_of(batch.labels[i]);
    loss += cross_entropy(x.logits, label);
    if (argmax(x.probs) == label) ++out.correct;
    backprop_example(model, x, label, scale, out.grads);
  }
  out.loss = loss * scale;
  return out;
}

double batch_loss(const CnnLstmModel& model, const Batch& batch, bool train_mode, Rng& rng) {
  check_batch(batch);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.inputs.size(); ++i) {
    const auto x = run_forward(model, batch.inputs[i], train_mode, rng);
    loss += cross_entropy(x.logits, index_of(batch.labels[i]));
  }
  return loss / static_cast<double>(batch.inputs.size());
}

}  // namespace afeng::nn
