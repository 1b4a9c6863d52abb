#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "afeng/emotion.hpp"

namespace afeng::affect {

enum class Valence { Positive, Neutral, Negative };

std::string_view to_string(Valence v);
Valence valence_from_string(std::string_view s);

class AffectError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDistribution : public AffectError {
 public:
  using AffectError::AffectError;
};

// Probabilities in canonical emotion order.
struct EmotionDistribution {
  std::array<double, kNumEmotions> probs{};

  // Throws InvalidDistribution unless every value is in [0,1] and the sum is
  // within 1e-9 of 1.
  static EmotionDistribution from(std::span<const double> values);
  static EmotionDistribution peaked(Emotion e);
  static EmotionDistribution uniform();

  double operator[](Emotion e) const { return probs[index_of(e)]; }
  bool operator==(const EmotionDistribution&) const = default;
};

// One row of the agent-emotion and behavior tables.
struct AffectEntry {
  Emotion emotion;
  std::string event;          // motivational goal of the triggering event
  std::string agent_emotion;  // verbatim, may be compound ("Pity, Trust")
  Valence valence;
  std::string goal_behavior;
  std::string self_behavior;
  std::string other_behavior;
};

struct BehaviorSet {
  std::string goal_behavior;
  std::string self_behavior;
  std::string other_behavior;

  bool operator==(const BehaviorSet&) const = default;
};

struct AppraisalResult {
  Emotion dominant = Emotion::Anticipation;
  double intensity = 0.0;
  Valence valence = Valence::Positive;
  std::string agent_emotion;
  std::string event_goal;

  bool operator==(const AppraisalResult&) const = default;
};

class AffectTable {
 public:
  // The table shipped in resources/affect_tables.json.
  static const AffectTable& builtin();
  // Parses the same JSON schema; every emotion must appear exactly once.
  static AffectTable parse(std::string_view json_text);

  const AffectEntry& entry(Emotion e) const { return entries_[index_of(e)]; }
  int version() const { return version_; }

 private:
  std::array<AffectEntry, kNumEmotions> entries_{};
  int version_ = 0;
};

// Dominant emotion = argmax; ties prefer Positive over Neutral over Negative
// valence, then canonical order.
AppraisalResult appraise(const EmotionDistribution& dist,
                         const AffectTable& table = AffectTable::builtin());

std::pair<std::string, Valence> map_agent_emotion(
    Emotion human, const AffectTable& table = AffectTable::builtin());

BehaviorSet derive_behaviors(Emotion dominant, const AffectTable& table = AffectTable::builtin());

// (1 - weight) * current + weight * mean(history); identity when weight is 0
// or history is empty.
EmotionDistribution blend_with_history(const EmotionDistribution& current,
                                       std::span<const EmotionDistribution> history,
                                       double weight);

}  // namespace afeng::affect
