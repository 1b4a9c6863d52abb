#include <string>
#include <string_view>

#include "afeng/corpus.hpp"
#include "afeng/random.hpp"

namespace afeng::corpus {
namespace {

constexpr std::array<std::array<std::string_view, 5>, kNumEmotions> kKeywords = {{
    {"waiting", "eager", "hopeful", "expecting", "countdown"},          // Anticipation
    {"elated", "joyful", "delighted", "cheerful", "thrilled"},          // Joy
    {"trust", "rely", "loyal", "faithful", "dependable"},               // Trust
    {"scared", "afraid", "terrified", "frightened", "panic"},           // Fear
    {"surprised", "shocked", "unexpected", "astonished", "stunned"},    // Surprise
    {"sad", "heartbroken", "lonely", "miserable", "grieving"},          // Sadness
    {"disgusting", "gross", "nasty", "revolting", "vile"},              // Disgust
    {"angry", "furious", "outraged", "livid", "rage"},                  // Anger
}};

constexpr std::array<std::string_view, 12> kTopics = {
    "the game",    "my job",       "the weather", "this city",   "the news",  "my family",
    "the concert", "our neighbor", "the exam",    "the airport", "that movie", "the meeting",
};

constexpr std::array<std::string_view, 6> kTemplates = {
    "I feel so {k} about {t}",
    "{t} left me {k} today",
    "honestly {k} after {t} and still {k2}",
    "why am I this {k} about {t}",
    "{t} makes everyone {k}",
    "so {k} right now, {t} was {k2}",
};

std::string fill(std::string_view tpl, std::string_view k, std::string_view k2, std::string_view t) {
  std::string out;
  for (std::size_t i = 0; i < tpl.size();) {
    if (tpl.substr(i, 4) == "{k2}") {
      out += k2;
      i += 4;
    } else if (tpl.substr(i, 3) == "{k}") {
      out += k;
      i += 3;
    } else if (tpl.substr(i, 3) == "{t}") {
      out += t;
      i += 3;
    } else {
      out += tpl[i++];
    }
  }
  return out;
}

}  // namespace

Corpus synthetic_corpus(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  Corpus out;
  out.reserve(per_class * kNumEmotions);
  for (std::size_t i = 0; i < per_class; ++i) {
    for (Emotion e : kAllEmotions) {
      const auto& kw = kKeywords[index_of(e)];
      const auto k = kw[rng.below(kw.size())];
      const auto k2 = kw[rng.below(kw.size())];
      const auto t = kTopics[rng.below(kTopics.size())];
      const auto tpl = kTemplates[rng.below(kTemplates.size())];
      out.push_back({fill(tpl, k, k2, t), e, "synthetic"});
    }
  }
  return out;
}

}  // namespace afeng::corpus
