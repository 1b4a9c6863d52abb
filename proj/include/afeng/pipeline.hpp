#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "afeng/affect.hpp"
#include "afeng/baselines.hpp"
#include "afeng/corpus.hpp"
#include "afeng/embeddings.hpp"
#include "afeng/eval.hpp"
#include "afeng/nn/checkpoint.hpp"
#include "afeng/nn/model.hpp"
#include "afeng/nn/trainer.hpp"
#include "afeng/textprep.hpp"

// Glue from raw sentences to trained classifier and back.
namespace afeng::pipeline {

struct PipelineConfig {
  nn::ModelConfig model;  // vocab_size is filled in from the built vocabulary
  nn::TrainConfig train;
  text::PrepOptions prep;
  std::size_t min_count = 1;
};

// A trained model together with everything needed to encode new text.
struct Classifier {
  nn::CnnLstmModel model;
  text::Vocabulary vocab;
  text::PrepOptions prep;
  nn::CheckpointMeta meta;
  bool pretrained_vectors = false;  // channels initialized from a vectors file

  text::EncodedSentence encode(std::string_view sentence) const;
  affect::EmotionDistribution distribution(std::string_view sentence) const;
  Emotion predict(std::string_view sentence) const;
};

std::vector<text::Tokens> preprocess_all(const corpus::Corpus& rows, const text::PrepOptions& prep);

nn::EncodedDataset encode_corpus(const corpus::Corpus& rows, const text::Vocabulary& vocab,
                                 const text::PrepOptions& prep, std::size_t max_len);

struct TrainOutcome {
  Classifier classifier;
  std::vector<nn::EpochStats> history;
};

// Builds the vocabulary from split.train only, initializes both channels from
// `vectors` (random rows when null or missing) and trains.
TrainOutcome train_classifier(const corpus::CorpusSplit& split, const PipelineConfig& config,
                              const embed::VectorMap* vectors = nullptr);

struct Evaluation {
  eval::ConfusionMatrix confusion;
  eval::ClassificationReport report;
  std::vector<Emotion> predicted;
};

Evaluation evaluate(const Classifier& clf, const corpus::Corpus& rows);

// The CNN-LSTM line of the comparison table.
baselines::ComparisonRow comparison_row(const Classifier& clf, const corpus::Corpus& test);

baselines::LabeledTokens labeled_tokens(const corpus::Corpus& rows, const text::PrepOptions& prep);

// Model directory layout: model.ckpt, vocab.tsv, pipeline.json and (when
// history is non-empty) history.csv.
void save_model_dir(const std::filesystem::path& dir, const Classifier& clf,
                    const std::vector<nn::EpochStats>& history);
Classifier load_model_dir(const std::filesystem::path& dir);

}  // namespace afeng::pipeline
