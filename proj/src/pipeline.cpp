#include "afeng/pipeline.hpp"

#include <fstream>
#include <json.hpp>

#include "afeng/nn/network.hpp"

namespace afeng::pipeline {

text::EncodedSentence Classifier::encode(std::string_view sentence) const {
  return text::encode(text::preprocess(sentence, prep), vocab, model.config.max_len);
}

affect::EmotionDistribution Classifier::distribution(std::string_view sentence) const {
  const auto probs = nn::predict(model, encode(sentence));
  affect::EmotionDistribution d;
  std::copy(probs.begin(), probs.end(), d.probs.begin());
  return d;
}

Emotion Classifier::predict(std::string_view sentence) const {
  const auto probs = nn::predict(model, encode(sentence));
  return emotion_from_index(nn::argmax(probs));
}

std::vector<text::Tokens> preprocess_all(const corpus::Corpus& rows, const text::PrepOptions& prep) {
  std::vector<text::Tokens> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(text::preprocess(r.text, prep));
  return out;
}

nn::EncodedDataset encode_corpus(const corpus::Corpus& rows, const text::Vocabulary& vocab,
                                 const text::PrepOptions& prep, std::size_t max_len) {
  nn::EncodedDataset ds;
  ds.inputs.reserve(rows.size());
  for (const auto& r : rows) {
    ds.inputs.push_back(text::encode(text::preprocess(r.text, prep), vocab, max_len));
    ds.labels.push_back(r.label);
  }
  return ds;
}

TrainOutcome train_classifier(const corpus::CorpusSplit& split, const PipelineConfig& config,
                              const embed::VectorMap* vectors) {
  const auto docs = preprocess_all(split.train, config.prep);
  auto vocab = text::Vocabulary::build(docs, config.min_count);

  auto mc = config.model;
  mc.vocab_size = vocab.size();
  const embed::VectorMap empty;
  const auto seed = config.train.seed;
  const auto matrix =
      embed::build_matrix(vocab, vectors ? *vectors : empty, mc.embedding_dim, mix_seed(seed, 2));
  auto model = nn::init_model(mc, matrix, mix_seed(seed, 3));

  const auto train_set = encode_corpus(split.train, vocab, config.prep, mc.max_len);
  const auto val_set = encode_corpus(split.validation, vocab, config.prep, mc.max_len);
  auto result = nn::train(std::move(model), train_set, val_set, config.train);

  TrainOutcome out;
  out.classifier.model = std::move(result.model);
  out.classifier.meta = {vocab.fingerprint(), seed};
  out.classifier.vocab = std::move(vocab);
  out.classifier.prep = config.prep;
  out.classifier.pretrained_vectors = vectors != nullptr && !vectors->empty();
  out.history = std::move(result.history);
  return out;
}

Evaluation evaluate(const Classifier& clf, const corpus::Corpus& rows) {
  Evaluation ev;
  std::vector<Emotion> truth;
  for (const auto& r : rows) {
    truth.push_back(r.label);
    ev.predicted.push_back(clf.predict(r.text));
  }
  ev.confusion = eval::confusion(truth, ev.predicted);
  ev.report = eval::report(ev.confusion);
  return ev;
}

baselines::ComparisonRow comparison_row(const Classifier& clf, const corpus::Corpus& test) {
  const auto ev = evaluate(clf, test);
  return {"CNN-LSTM", "Layered Model",
          clf.pretrained_vectors ? "pretrained GloVe Vectors" : "randomly initialized vectors",
          ev.report.macro.precision};
}

baselines::LabeledTokens labeled_tokens(const corpus::Corpus& rows, const text::PrepOptions& prep) {
  baselines::LabeledTokens out;
  out.docs = preprocess_all(rows, prep);
  for (const auto& r : rows) out.labels.push_back(r.label);
  return out;
}

void save_model_dir(const std::filesystem::path& dir, const Classifier& clf,
                    const std::vector<nn::EpochStats>& history) {
  std::filesystem::create_directories(dir);
  nn::save_checkpoint(clf.model, clf.meta, dir / "model.ckpt");
  clf.vocab.save(dir / "vocab.tsv");
  {
    const nlohmann::json j = {{"remove_stopwords", clf.prep.remove_stopwords},
                              {"stem", clf.prep.stem},
                              {"pretrained_vectors", clf.pretrained_vectors}};
    std::ofstream out(dir / "pipeline.json", std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + (dir / "pipeline.json").string());
  }
  if (!history.empty()) {
    std::ofstream out(dir / "history.csv", std::ios::binary);
    nn::write_history_csv(out, history);
    if (!out) throw std::runtime_error("cannot write " + (dir / "history.csv").string());
  }
}

Classifier load_model_dir(const std::filesystem::path& dir) {
  Classifier clf;
  auto ckpt = nn::load_checkpoint(dir / "model.ckpt");
  clf.model = std::move(ckpt.model);
  clf.meta = ckpt.meta;
  clf.vocab = text::Vocabulary::load(dir / "vocab.tsv");
  if (clf.vocab.fingerprint() != clf.meta.vocab_fingerprint) {
    throw std::runtime_error("vocab.tsv does not match the checkpoint in " + dir.string());
  }
  if (clf.vocab.size() != clf.model.config.vocab_size) {
    throw std::runtime_error("vocabulary size differs from the checkpoint in " + dir.string());
  }
  std::ifstream in(dir / "pipeline.json");
  if (in) {
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (!j.is_object()) throw std::runtime_error("malformed pipeline.json in " + dir.string());
    clf.prep.remove_stopwords = j.value("remove_stopwords", true);
    clf.prep.stem = j.value("stem", true);
    clf.pretrained_vectors = j.value("pretrained_vectors", false);
  }
  return clf;
}

}  // namespace afeng::pipeline
