#pragma once

#include <span>
#include <vector>

#include "afeng/emotion.hpp"
#include "afeng/nn/model.hpp"
#include "afeng/random.hpp"
#include "afeng/textprep.hpp"

namespace afeng::nn {

using Probabilities = std::vector<double>;

// Class probabilities in canonical emotion order. In train mode dropout draws
// its mask from `rng` (inverted scaling); otherwise `rng` is untouched.
Probabilities forward(const CnnLstmModel& model, const text::EncodedSentence& sentence,
                      bool train_mode, Rng& rng);

// Inference: forward with dropout disabled.
Probabilities predict(const CnnLstmModel& model, const text::EncodedSentence& sentence);

struct Batch {
  std::span<const text::EncodedSentence> inputs;
  std::span<const Emotion> labels;
};

// Gradients aligned with trainable_tensors(model).
struct BatchGradients {
  std::vector<Tensor> grads;
  double loss = 0.0;          // mean cross-entropy
  std::size_t correct = 0;    // argmax hits, for training accuracy
};

// Gradients of the mean cross-entropy over the batch. Examples are processed
// in order, each drawing its dropout mask from `rng` when train_mode is set.
BatchGradients backward(const CnnLstmModel& model, const Batch& batch, bool train_mode, Rng& rng);

// Mean cross-entropy only, consuming `rng` exactly as backward() does.
double batch_loss(const CnnLstmModel& model, const Batch& batch, bool train_mode, Rng& rng);

// -log p[label], computed from logits with log-sum-exp.
double cross_entropy(std::span<const double> logits, std::size_t label);

std::size_t argmax(std::span<const double> values);

}  // namespace afeng::nn
