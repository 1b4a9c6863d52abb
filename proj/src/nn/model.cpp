#include "afeng/nn/model.hpp"

#include <cmath>

#include "afeng/random.hpp"

namespace afeng::nn {

std::string to_string(LayerOrder order) {
  return order == LayerOrder::CnnLstm ? "cnn-lstm" : "lstm-cnn";
}

LayerOrder layer_order_from_string(const std::string& s) {
  if (s == "cnn-lstm") return LayerOrder::CnnLstm;
  if (s == "lstm-cnn") return LayerOrder::LstmCnn;
  throw std::invalid_argument("unknown layer order '" + s + "'");
}

std::size_t ModelConfig::pooled_steps() const {
  std::size_t steps = 0;
  for (auto w : kernel_widths) steps += (max_len - w + 1 + pool_size - 1) / pool_size;
  return steps;
}

std::size_t ModelConfig::lstm_input_dim() const {
  return order == LayerOrder::CnnLstm ? filter_count : embedding_dim;
}

std::size_t ModelConfig::conv_input_dim() const {
  return order == LayerOrder::CnnLstm ? embedding_dim : hidden_size;
}

std::size_t ModelConfig::dense_input_dim() const {
  return order == LayerOrder::CnnLstm ? hidden_size : pooled_steps() * filter_count;
}

void ModelConfig::validate() const {
  if (vocab_size < 2 || embedding_dim == 0 || max_len == 0 || filter_count == 0 ||
      pool_size == 0 || hidden_size == 0 || dense_size == 0 || kernel_widths.empty()) {
    throw ShapeMismatch("model configuration has a zero extent");
  }
  for (auto w : kernel_widths) {
    if (w == 0 || w > max_len) {
      throw ShapeMismatch("kernel width " + std::to_string(w) + " incompatible with max_len " +
                          std::to_string(max_len));
    }
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ShapeMismatch("dropout must lie in [0,1)");
  if (!(max_norm > 0.0)) throw ShapeMismatch("max_norm must be positive");
}

bool CnnLstmModel::operator==(const CnnLstmModel& other) const {
  if (!(config == other.config)) return false;
  const auto a = all_tensors(*this);
  const auto b = all_tensors(other);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(*a[i].tensor == *b[i].tensor)) return false;
  }
  return true;
}

namespace {

template <typename Model, typename Out>
void collect(Model& m, bool include_static, Out& out) {
  if (include_static) out.push_back({"embedding.static", &m.static_embedding});
  out.push_back({"embedding.tunable", &m.tunable_embedding});
  for (std::size_t i = 0; i < m.conv.size(); ++i) {
    const auto w = std::to_string(m.config.kernel_widths[i]);
    out.push_back({"conv" + w + ".weight", &m.conv[i].weight});
    out.push_back({"conv" + w + ".bias", &m.conv[i].bias});
  }
  out.push_back({"lstm.wx", &m.lstm.wx});
  out.push_back({"lstm.wh", &m.lstm.wh});
  out.push_back({"lstm.b", &m.lstm.b});
  out.push_back({"dense.weight", &m.dense_w});
  out.push_back({"dense.bias", &m.dense_b});
  out.push_back({"output.weight", &m.out_w});
  out.push_back({"output.bias", &m.out_b});
}

void glorot(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : t.values()) v = rng.uniform(-limit, limit);
}

}  // namespace

std::vector<NamedTensor> trainable_tensors(CnnLstmModel& m) {
  std::vector<NamedTensor> out;
  collect(m, false, out);
  return out;
}

std::vector<ConstNamedTensor> trainable_tensors(const CnnLstmModel& m) {
  std::vector<ConstNamedTensor> out;
  collect(m, false, out);
  return out;
}

std::vector<ConstNamedTensor> all_tensors(const CnnLstmModel& m) {
  std::vector<ConstNamedTensor> out;
  collect(m, true, out);
  return out;
}

std::vector<NamedTensor> all_tensors(CnnLstmModel& m) {
  std::vector<NamedTensor> out;
  collect(m, true, out);
  return out;
}

CnnLstmModel zero_model(const ModelConfig& c) {
  c.validate();
  CnnLstmModel m;
  m.config = c;
  m.static_embedding = Tensor({c.vocab_size, c.embedding_dim});
  m.tunable_embedding = Tensor({c.vocab_size, c.embedding_dim});
  for (auto w : c.kernel_widths) {
    m.conv.push_back({Tensor({c.filter_count, w, c.conv_input_dim()}), Tensor({c.filter_count})});
  }
  const auto h = c.hidden_size;
  m.lstm = {Tensor({4 * h, c.lstm_input_dim()}), Tensor({4 * h, h}), Tensor({4 * h})};
  m.dense_w = Tensor({c.dense_size, c.dense_input_dim()});
  m.dense_b = Tensor({c.dense_size});
  m.out_w = Tensor({kNumEmotions, c.dense_size});
  m.out_b = Tensor({kNumEmotions});
  return m;
}

CnnLstmModel init_model(const ModelConfig& c, const embed::EmbeddingMatrix& embedding,
                        std::uint64_t seed) {
  auto m = zero_model(c);
  if (embedding.rows != c.vocab_size || embedding.dim != c.embedding_dim) {
    throw ShapeMismatch("embedding matrix " + std::to_string(embedding.rows) + "x" +
                        std::to_string(embedding.dim) + " does not match model config");
  }
  std::copy(embedding.values.begin(), embedding.values.end(), m.static_embedding.values().begin());
  std::copy(embedding.values.begin(), embedding.values.end(), m.tunable_embedding.values().begin());
  for (auto& v : m.static_embedding.row(0)) v = 0.0;
  for (auto& v : m.tunable_embedding.row(0)) v = 0.0;

  Rng rng(seed);
  for (auto& k : m.conv) {
    const auto fan_in = k.width() * k.in_dim();
    glorot(k.weight, fan_in, k.filters() * k.width(), rng);
  }
  const auto h = c.hidden_size;
  glorot(m.lstm.wx, c.lstm_input_dim(), 4 * h, rng);
  glorot(m.lstm.wh, h, 4 * h, rng);
  for (std::size_t j = 0; j < h; ++j) m.lstm.b[h + j] = 1.0;
  glorot(m.dense_w, c.dense_input_dim(), c.dense_size, rng);
  glorot(m.out_w, c.dense_size, kNumEmotions, rng);
  return m;
}

}  // namespace afeng::nn
