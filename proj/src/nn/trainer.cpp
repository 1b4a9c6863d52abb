#include "afeng/nn/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "afeng/nn/network.hpp"
#include "afeng/random.hpp"

namespace afeng::nn {

std::vector<Emotion> predict_labels(const CnnLstmModel& model, const EncodedDataset& data) {
  std::vector<Emotion> out;
  out.reserve(data.size());
  for (const auto& x : data.inputs) out.push_back(emotion_from_index(argmax(predict(model, x))));
  return out;
}

double accuracy(const CnnLstmModel& model, const EncodedDataset& data) {
  if (data.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  const auto pred = predict_labels(model, data);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == data.labels[i];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

TrainResult train(CnnLstmModel model, const EncodedDataset& train_set,
                  const EncodedDataset& validation, const TrainConfig& config) {
  if (train_set.inputs.size() != train_set.labels.size()) {
    throw std::invalid_argument("training inputs and labels differ in length");
  }
  if (config.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  TrainResult result{std::move(model), {}};
  if (config.epochs == 0 || train_set.size() == 0) return result;

  auto params = trainable_tensors(result.model);
  std::vector<Tensor*> ptrs;
  for (auto& p : params) ptrs.push_back(p.tensor);
  AdadeltaState state(ptrs, config.adadelta);

  Rng shuffle_rng(mix_seed(config.seed, 0));
  Rng dropout_rng(mix_seed(config.seed, 1));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  double best_val = -1.0;
  std::size_t since_best = 0;
  std::vector<text::EncodedSentence> xs;
  std::vector<Emotion> ys;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto end = std::min(order.size(), start + config.batch_size);
      xs.clear();
      ys.clear();
      for (std::size_t i = start; i < end; ++i) {
        xs.push_back(train_set.inputs[order[i]]);
        ys.push_back(train_set.labels[order[i]]);
      }
      auto g = backward(result.model, {xs, ys}, true, dropout_rng);
      loss_sum += g.loss * static_cast<double>(end - start);
      adadelta_step(ptrs, g.grads, state);
      clip_l2(result.model.dense_w, result.model.config.max_norm);
      clip_l2(result.model.out_w, result.model.config.max_norm);
    }
    EpochStats stats{epoch, loss_sum / static_cast<double>(order.size()),
                     accuracy(result.model, validation)};
    result.history.push_back(stats);
    if (config.on_epoch) config.on_epoch(stats);

    if (config.patience > 0 && !std::isnan(stats.val_accuracy)) {
      if (stats.val_accuracy > best_val) {
        best_val = stats.val_accuracy;
        since_best = 0;
      } else if (++since_best >= config.patience) {
        break;
      }
    }
    if (config.target_train_accuracy <= 1.0 &&
        accuracy(result.model, train_set) >= config.target_train_accuracy) {
      break;
    }
  }
  return result;
}

void write_history_csv(std::ostream& out, const std::vector<EpochStats>& history) {
  out << "epoch,loss,val_accuracy\n";
  char buf[96];
  for (const auto& h : history) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", h.epoch, h.loss, h.val_accuracy);
    out << buf;
  }
}

}  // namespace afeng::nn
