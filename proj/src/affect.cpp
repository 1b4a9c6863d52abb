#include "afeng/affect.hpp"

#include <cmath>
#include <json.hpp>

#include "afeng/resources.hpp"

namespace afeng::affect {

std::string_view to_string(Valence v) {
  switch (v) {
    case Valence::Positive: return "Positive";
    case Valence::Neutral: return "Neutral";
    case Valence::Negative: return "Negative";
  }
  return "Neutral";
}

Valence valence_from_string(std::string_view s) {
  if (s == "Positive") return Valence::Positive;
  if (s == "Neutral") return Valence::Neutral;
  if (s == "Negative") return Valence::Negative;
  throw AffectError("unknown valence '" + std::string(s) + "'");
}

EmotionDistribution EmotionDistribution::from(std::span<const double> values) {
  if (values.size() != kNumEmotions) {
    throw InvalidDistribution("distribution needs 8 values, got " + std::to_string(values.size()));
  }
  EmotionDistribution d;
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    const double v = values[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidDistribution("probability out of [0,1] for " + std::string(kEmotionNames[i]));
    }
    d.probs[i] = v;
    sum += v;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw InvalidDistribution("probabilities sum to " + std::to_string(sum));
  }
  return d;
}

EmotionDistribution EmotionDistribution::peaked(Emotion e) {
  EmotionDistribution d;
  d.probs[index_of(e)] = 1.0;
  return d;
}

EmotionDistribution EmotionDistribution::uniform() {
  EmotionDistribution d;
  d.probs.fill(1.0 / kNumEmotions);
  return d;
}

AffectTable AffectTable::parse(std::string_view json_text) {
  AffectTable t;
  std::array<bool, kNumEmotions> seen{};
  try {
    const auto j = nlohmann::json::parse(json_text);
    t.version_ = j.at("version").get<int>();
    for (const auto& row : j.at("emotions")) {
      const auto name = row.at("emotion").get<std::string>();
      const auto e = parse_emotion(name);
      if (!e) throw AffectError("unknown emotion '" + name + "' in affect table");
      if (seen[index_of(*e)]) throw AffectError("duplicate emotion '" + name + "' in affect table");
      seen[index_of(*e)] = true;
      t.entries_[index_of(*e)] = AffectEntry{
          *e,
          row.at("event").get<std::string>(),
          row.at("agent_emotion").get<std::string>(),
          valence_from_string(row.at("valence").get<std::string>()),
          row.at("goal_behavior").get<std::string>(),
          row.at("self_behavior").get<std::string>(),
          row.at("other_behavior").get<std::string>(),
      };
    }
  } catch (const nlohmann::json::exception& e) {
    throw AffectError(std::string("malformed affect table: ") + e.what());
  }
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    if (!seen[i]) throw AffectError("affect table lacks " + std::string(kEmotionNames[i]));
  }
  return t;
}

const AffectTable& AffectTable::builtin() {
  static const AffectTable table = parse(resources::affect_tables_json());
  return table;
}

AppraisalResult appraise(const EmotionDistribution& dist, const AffectTable& table) {
  // Re-validate: callers may have built the struct by hand.
  EmotionDistribution::from(dist.probs);
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumEmotions; ++k) {
    const double p = dist.probs[k];
    if (p > dist.probs[best]) {
      best = k;
    } else if (p == dist.probs[best] &&
               table.entry(kAllEmotions[k]).valence < table.entry(kAllEmotions[best]).valence) {
      best = k;
    }
  }
  const auto& row = table.entry(kAllEmotions[best]);
  return {row.emotion, dist.probs[best], row.valence, row.agent_emotion, row.event};
}

std::pair<std::string, Valence> map_agent_emotion(Emotion human, const AffectTable& table) {
  const auto& row = table.entry(human);
  return {row.agent_emotion, row.valence};
}

BehaviorSet derive_behaviors(Emotion dominant, const AffectTable& table) {
  const auto& row = table.entry(dominant);
  return {row.goal_behavior, row.self_behavior, row.other_behavior};
}

EmotionDistribution blend_with_history(const EmotionDistribution& current,
                                       std::span<const EmotionDistribution> history,
                                       double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw AffectError("blend weight must lie in [0,1]");
  if (weight == 0.0 || history.empty()) return current;
  std::array<double, kNumEmotions> mean{};
  for (const auto& h : history) {
    for (std::size_t k = 0; k < kNumEmotions; ++k) mean[k] += h.probs[k];
  }
  EmotionDistribution out;
  double sum = 0.0;
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    out.probs[k] = (1.0 - weight) * current.probs[k] +
                   weight * mean[k] / static_cast<double>(history.size());
    sum += out.probs[k];
  }
  for (auto& p : out.probs) p /= sum;
  return out;
}

}  // namespace afeng::affect
