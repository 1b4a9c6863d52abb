#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace afeng {

// Plutchik's eight basic emotions. The integer codes are part of the
// checkpoint format and the confusion-matrix axes; do not reorder.
enum class Emotion : std::uint8_t {
  Anticipation = 0,
  Joy = 1,
  Trust = 2,
  Fear = 3,
  Surprise = 4,
  Sadness = 5,
  Disgust = 6,
  Anger = 7,
};

inline constexpr std::size_t kNumEmotions = 8;

inline constexpr std::array<Emotion, kNumEmotions> kAllEmotions = {
    Emotion::Anticipation, Emotion::Joy,     Emotion::Trust,   Emotion::Fear,
    Emotion::Surprise,     Emotion::Sadness, Emotion::Disgust, Emotion::Anger,
};

inline constexpr std::array<std::string_view, kNumEmotions> kEmotionNames = {
    "Anticipation", "Joy", "Trust", "Fear", "Surprise", "Sadness", "Disgust", "Anger",
};

constexpr std::size_t index_of(Emotion e) { return static_cast<std::size_t>(e); }

constexpr std::string_view name_of(Emotion e) { return kEmotionNames[index_of(e)]; }

// Throws std::out_of_range for i >= 8.
Emotion emotion_from_index(std::size_t i);

// Case-insensitive match against the eight names; nullopt otherwise.
std::optional<Emotion> parse_emotion(std::string_view text);

std::string upper_name(Emotion e);

}  // namespace afeng
