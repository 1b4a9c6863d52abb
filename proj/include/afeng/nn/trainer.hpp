#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "afeng/emotion.hpp"
#include "afeng/nn/model.hpp"
#include "afeng/nn/optim.hpp"
#include "afeng/textprep.hpp"

namespace afeng::nn {

struct EncodedDataset {
  std::vector<text::EncodedSentence> inputs;
  std::vector<Emotion> labels;

  std::size_t size() const { return inputs.size(); }
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;          // mean training cross-entropy over the epoch
  double val_accuracy = 0.0;  // NaN when there is no validation data
};

struct TrainConfig {
  std::size_t epochs = 400;
  std::size_t batch_size = 128;
  std::uint64_t seed = 42;
  AdadeltaConfig adadelta;
  // Stop after this many epochs without validation-accuracy improvement.
  // 0 disables early stopping.
  std::size_t patience = 0;
  // Stop as soon as inference-mode training accuracy reaches this value.
  // Values > 1 disable the check (default).
  double target_train_accuracy = 2.0;
  std::function<void(const EpochStats&)> on_epoch;
};

struct TrainResult {
  CnnLstmModel model;
  std::vector<EpochStats> history;
};

TrainResult train(CnnLstmModel model, const EncodedDataset& train_set,
                  const EncodedDataset& validation, const TrainConfig& config);

// Fraction of examples whose argmax prediction equals the label.
double accuracy(const CnnLstmModel& model, const EncodedDataset& data);

std::vector<Emotion> predict_labels(const CnnLstmModel& model, const EncodedDataset& data);

// `epoch,loss,val_accuracy` with a header row.
void write_history_csv(std::ostream& out, const std::vector<EpochStats>& history);

}  // namespace afeng::nn
