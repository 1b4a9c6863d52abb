#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "afeng/affect.hpp"

// Minimal Behavioral Markup Language documents: one facial expression for the
// appraised emotion and two gestures for the self- and other-directed
// behaviors.
namespace afeng::bml {

enum class GestureMode { Self, Other };

std::string_view to_string(GestureMode m);

struct FaceDirective {
  std::string id = "f1";
  std::string lexeme;  // uppercase emotion name
  double amount = 0.0;
  double start = 0.0;
  double end = 2.0;

  bool operator==(const FaceDirective&) const = default;
};

struct GestureDirective {
  std::string id;
  std::string lexeme;       // uppercase, words joined by '_'
  GestureMode mode = GestureMode::Self;
  std::string description;  // behavior label as written in the affect table
  double start = 0.0;
  double end = 2.5;

  bool operator==(const GestureDirective&) const = default;
};

struct BmlDocument {
  std::string id = "bml-1";
  std::string character = "agent";
  FaceDirective face;
  std::vector<GestureDirective> gestures;

  bool operator==(const BmlDocument&) const = default;
};

inline constexpr double kFaceStart = 0.0, kFaceEnd = 2.0;
inline constexpr double kSelfStart = 0.0, kSelfEnd = 2.5;
inline constexpr double kOtherStart = 0.5, kOtherEnd = 2.5;

// "Defend, Protect" -> "DEFEND"; "Approach and Attack" -> "APPROACH_AND_ATTACK".
std::string gesture_lexeme(std::string_view behavior_label);

// The 16 gesture lexemes derived from the affect table's self/other columns.
const std::set<std::string>& gesture_lexicon();

BmlDocument compose(const affect::AppraisalResult& appraisal, const affect::BehaviorSet& behaviors,
                    std::string doc_id = "bml-1", std::string character = "agent");

// Canonical XML: declaration, fixed element and attribute order, two-space
// indentation, trailing newline.
std::string serialize(const BmlDocument& doc);

// Shortest round-trip decimal with at least one fractional digit.
std::string format_number(double v);

struct Issue {
  enum class Kind { Malformed, UnknownLexeme, BadTiming, BadAmount, DuplicateId };
  Kind kind;
  std::string detail;  // offending lexeme or element id, or a parser message
};

std::string_view to_string(Issue::Kind k);

struct Validation {
  std::optional<BmlDocument> document;  // set when the markup could be read
  std::vector<Issue> issues;            // every violation found

  bool ok() const { return document.has_value() && issues.empty(); }
};

Validation validate(std::string_view xml);

// Structural checks on an in-memory document (lexicon, timing, amount, ids).
std::vector<Issue> check(const BmlDocument& doc);

}  // namespace afeng::bml
