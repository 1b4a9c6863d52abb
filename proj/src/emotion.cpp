#include "afeng/emotion.hpp"

#include <cctype>
#include <stdexcept>

namespace afeng {

Emotion emotion_from_index(std::size_t i) {
  if (i >= kNumEmotions) {
    throw std::out_of_range("emotion index " + std::to_string(i) + " out of range");
  }
  return kAllEmotions[i];
}

std::optional<Emotion> parse_emotion(std::string_view text) {
  for (Emotion e : kAllEmotions) {
    const auto name = name_of(e);
    if (name.size() != text.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < name.size() && same; ++i) {
      same = std::tolower(static_cast<unsigned char>(name[i])) ==
             std::tolower(static_cast<unsigned char>(text[i]));
    }
    if (same) return e;
  }
  return std::nullopt;
}

std::string upper_name(Emotion e) {
  std::string out(name_of(e));
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace afeng
