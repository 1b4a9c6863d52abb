#include "afeng/service.hpp"

#include <chrono>

#include "afeng/bml.hpp"
#include "afeng/hash.hpp"
#include "afeng/nn/checkpoint.hpp"

namespace afeng::service {
namespace {

using nlohmann::json;

json distribution_json(const affect::EmotionDistribution& d) {
  json out = json::object();
  for (Emotion e : kAllEmotions) out[std::string(name_of(e))] = d[e];
  return out;
}

json behaviors_json(const affect::BehaviorSet& b) {
  return {{"goal", b.goal_behavior}, {"self", b.self_behavior}, {"other", b.other_behavior}};
}

bool blank(std::string_view s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::int64_t system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

json to_json(const InteractResponse& r) {
  return {
      {"text", r.text},
      {"distribution", distribution_json(r.distribution)},
      {"dominant", std::string(name_of(r.appraisal.dominant))},
      {"intensity", r.appraisal.intensity},
      {"valence", std::string(affect::to_string(r.appraisal.valence))},
      {"agent_emotion", r.appraisal.agent_emotion},
      {"event_goal", r.appraisal.event_goal},
      {"behaviors", behaviors_json(r.behaviors)},
      {"bml", r.bml},
      {"record_id", r.record_id},
      {"timestamp", memory::format_utc(r.timestamp_ms)},
  };
}

json to_json(const memory::InteractionRecord& r) {
  return {
      {"id", r.id},
      {"timestamp", memory::format_utc(r.timestamp_ms)},
      {"text", r.text},
      {"distribution", distribution_json(r.distribution)},
      {"dominant", std::string(name_of(r.appraisal.dominant))},
      {"intensity", r.appraisal.intensity},
      {"valence", std::string(affect::to_string(r.appraisal.valence))},
      {"agent_emotion", r.appraisal.agent_emotion},
      {"behaviors", behaviors_json(r.behaviors)},
      {"bml_id", r.bml_id},
  };
}

InteractResponse respond(std::string text, const affect::EmotionDistribution& dist,
                         std::uint64_t record_id, std::int64_t timestamp_ms,
                         const std::string& character) {
  InteractResponse resp;
  resp.text = std::move(text);
  resp.distribution = dist;
  resp.appraisal = affect::appraise(dist);
  resp.behaviors = affect::derive_behaviors(resp.appraisal.dominant);
  resp.record_id = record_id;
  resp.timestamp_ms = timestamp_ms;
  resp.bml = bml::serialize(bml::compose(resp.appraisal, resp.behaviors,
                                         "bml-" + std::to_string(record_id), character));
  return resp;
}

Engine::Engine(std::optional<pipeline::Classifier> classifier, std::filesystem::path log_path,
               EngineOptions options)
    : classifier_(std::move(classifier)),
      options_(std::move(options)),
      store_(std::move(log_path)),
      buffer_(options_.buffer_capacity) {
  if (classifier_) {
    checkpoint_hash_ = hex64(nn::checkpoint_fingerprint(classifier_->model, classifier_->meta));
  }
  auto replayed = store_.replay();
  replay_warnings_ = std::move(replayed.warnings);
  buffer_ = memory::SessionBuffer::from_log(replayed.records, options_.buffer_capacity);
}

InteractResponse Engine::interact(std::string_view text) {
  if (blank(text)) throw ServiceError(400, "EmptyText", "text is empty");
  if (utf8_length(text) > kMaxTextLength) {
    throw ServiceError(400, "TooLong",
                       "text exceeds " + std::to_string(kMaxTextLength) + " characters");
  }
  if (!classifier_) throw ServiceError(503, "ModelNotLoaded", "no model is loaded");

  // The model is immutable, so inference runs outside the lock.
  auto dist = classifier_->distribution(text);

  std::lock_guard lock(mutex_);
  if (options_.blend_weight > 0.0) {
    std::vector<affect::EmotionDistribution> past;
    for (const auto& r : buffer_.recent(options_.blend_window)) past.push_back(r.distribution);
    dist = affect::blend_with_history(dist, past, options_.blend_weight);
  }
  auto resp = respond(std::string(text), dist, store_.last_id() + 1, options_.clock(),
                      options_.character);
  memory::InteractionRecord rec{resp.record_id, resp.timestamp_ms, resp.text,
                                resp.distribution, resp.appraisal, resp.behaviors,
                                "bml-" + std::to_string(resp.record_id)};
  memory::record(store_, buffer_, rec);
  return resp;
}

std::vector<memory::InteractionRecord> Engine::history(std::size_t n) const {
  std::lock_guard lock(mutex_);
  return buffer_.recent(n);
}

json Engine::model_info() const {
  if (!classifier_) throw ServiceError(503, "ModelNotLoaded", "no model is loaded");
  const auto& c = classifier_->model.config;
  json order = json::array();
  for (Emotion e : kAllEmotions) order.push_back(std::string(name_of(e)));
  return {
      {"checkpoint_hash", checkpoint_hash_},
      {"emotion_order", order},
      {"seed", classifier_->meta.seed},
      {"vocab_fingerprint", hex64(classifier_->meta.vocab_fingerprint)},
      {"hyperparameters",
       {{"vocab_size", c.vocab_size},
        {"embedding_dim", c.embedding_dim},
        {"max_len", c.max_len},
        {"kernel_widths", c.kernel_widths},
        {"filter_count", c.filter_count},
        {"pool_size", c.pool_size},
        {"hidden_size", c.hidden_size},
        {"dense_size", c.dense_size},
        {"dropout", c.dropout},
        {"max_norm", c.max_norm},
        {"layer_order", nn::to_string(c.order)}}},
      {"preprocessing",
       {{"remove_stopwords", classifier_->prep.remove_stopwords}, {"stem", classifier_->prep.stem}}},
  };
}

}  // namespace afeng::service
