#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "afeng/emotion.hpp"
#include "afeng/embeddings.hpp"
#include "afeng/nn/layers.hpp"
#include "afeng/nn/tensor.hpp"

namespace afeng::nn {

enum class LayerOrder { CnnLstm, LstmCnn };

std::string to_string(LayerOrder order);
LayerOrder layer_order_from_string(const std::string& s);

struct ModelConfig {
  std::size_t vocab_size = 2;
  std::size_t embedding_dim = 200;
  std::size_t max_len = 40;
  std::vector<std::size_t> kernel_widths{2, 3, 5, 6, 8};
  std::size_t filter_count = 64;
  std::size_t pool_size = 4;
  std::size_t hidden_size = 128;
  std::size_t dense_size = 128;
  double dropout = 0.5;
  double max_norm = 3.0;
  LayerOrder order = LayerOrder::CnnLstm;

  bool operator==(const ModelConfig&) const = default;

  // Length of the pooled sequence after concatenating every width group.
  std::size_t pooled_steps() const;
  std::size_t lstm_input_dim() const;
  std::size_t conv_input_dim() const;
  std::size_t dense_input_dim() const;
  // Throws ShapeMismatch on an unusable configuration.
  void validate() const;
};

// Every learnable tensor of the classifier plus the frozen static channel.
struct CnnLstmModel {
  ModelConfig config;
  Tensor static_embedding;   // [V x D], never updated
  Tensor tunable_embedding;  // [V x D], row 0 stays zero
  std::vector<ConvKernels> conv;
  LstmParams lstm;
  Tensor dense_w, dense_b;
  Tensor out_w, out_b;  // [8 x dense_size], canonical emotion order

  bool operator==(const CnnLstmModel& other) const;
};

struct NamedTensor {
  std::string name;
  Tensor* tensor;
};
struct ConstNamedTensor {
  std::string name;
  const Tensor* tensor;
};

// Trainable tensors in a fixed order (tunable embedding first). The static
// channel is excluded.
std::vector<NamedTensor> trainable_tensors(CnnLstmModel& m);
std::vector<ConstNamedTensor> trainable_tensors(const CnnLstmModel& m);
// All tensors including the static channel; this is the checkpoint order.
std::vector<ConstNamedTensor> all_tensors(const CnnLstmModel& m);
std::vector<NamedTensor> all_tensors(CnnLstmModel& m);

// Zero-valued model with the shapes implied by `config`.
CnnLstmModel zero_model(const ModelConfig& config);

// Glorot-uniform weights, zero biases except forget-gate bias 1. Both channels
// start from `embedding`.
CnnLstmModel init_model(const ModelConfig& config, const embed::EmbeddingMatrix& embedding,
                        std::uint64_t seed);

}  // namespace afeng::nn
