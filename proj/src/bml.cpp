#include "afeng/bml.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace afeng::bml {
namespace {

namespace pt = boost::property_tree;

void append_escaped(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
}

void attr(std::string& out, std::string_view name, std::string_view value) {
  out += ' ';
  out += name;
  out += "=\"";
  append_escaped(out, value);
  out += '"';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::set<std::string> face_lexicon() {
  std::set<std::string> out;
  for (Emotion e : kAllEmotions) out.insert(upper_name(e));
  return out;
}

// Reads the attributes of one element into a map, flagging unknown or missing
// ones.
class Attrs {
 public:
  Attrs(const pt::ptree& node, std::string element, std::vector<Issue>& issues)
      : element_(std::move(element)), issues_(issues) {
    if (const auto a = node.get_child_optional("<xmlattr>")) {
      for (const auto& [k, v] : *a) values_[k] = v.data();
    }
  }

  std::string text(const std::string& name) {
    used_.insert(name);
    const auto it = values_.find(name);
    if (it == values_.end()) {
      issues_.push_back({Issue::Kind::Malformed, element_ + ": missing attribute '" + name + "'"});
      return {};
    }
    return it->second;
  }

  double number(const std::string& name) {
    const auto s = text(name);
    if (s.empty()) return std::nan("");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      issues_.push_back(
          {Issue::Kind::Malformed, element_ + ": attribute '" + name + "' is not a number"});
      return std::nan("");
    }
    return v;
  }

  void reject_unknown() {
    for (const auto& [k, v] : values_) {
      if (!used_.contains(k)) {
        issues_.push_back({Issue::Kind::Malformed, element_ + ": unknown attribute '" + k + "'"});
      }
    }
  }

 private:
  std::string element_;
  std::vector<Issue>& issues_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

}  // namespace

std::string_view to_string(GestureMode m) { return m == GestureMode::Self ? "SELF" : "OTHER"; }

std::string_view to_string(Issue::Kind k) {
  switch (k) {
    case Issue::Kind::Malformed: return "Malformed";
    case Issue::Kind::UnknownLexeme: return "UnknownLexeme";
    case Issue::Kind::BadTiming: return "BadTiming";
    case Issue::Kind::BadAmount: return "BadAmount";
    case Issue::Kind::DuplicateId: return "DuplicateId";
  }
  return "Malformed";
}

std::string gesture_lexeme(std::string_view label) {
  const auto comma = label.find(',');
  const auto head = trim(label.substr(0, comma));
  std::string out;
  bool pending_space = false;
  for (char c : head) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += '_';
    pending_space = false;
    out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

const std::set<std::string>& gesture_lexicon() {
  static const std::set<std::string> lexicon = [] {
    std::set<std::string> s;
    const auto& table = affect::AffectTable::builtin();
    for (Emotion e : kAllEmotions) {
      s.insert(gesture_lexeme(table.entry(e).self_behavior));
      s.insert(gesture_lexeme(table.entry(e).other_behavior));
    }
    return s;
  }();
  return lexicon;
}

BmlDocument compose(const affect::AppraisalResult& appraisal, const affect::BehaviorSet& behaviors,
                    std::string doc_id, std::string character) {
  BmlDocument doc;
  doc.id = std::move(doc_id);
  doc.character = std::move(character);
  doc.face = {"f1", upper_name(appraisal.dominant), appraisal.intensity, kFaceStart, kFaceEnd};
  doc.gestures.push_back({"g1", gesture_lexeme(behaviors.self_behavior), GestureMode::Self,
                          behaviors.self_behavior, kSelfStart, kSelfEnd});
  doc.gestures.push_back({"g2", gesture_lexeme(behaviors.other_behavior), GestureMode::Other,
                          behaviors.other_behavior, kOtherStart, kOtherEnd});
  return doc;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ec == std::errc() ? ptr : buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string serialize(const BmlDocument& doc) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<bml";
  attr(out, "id", doc.id);
  attr(out, "character", doc.character);
  out += ">\n  <face";
  attr(out, "id", doc.face.id);
  attr(out, "lexeme", doc.face.lexeme);
  attr(out, "amount", format_number(doc.face.amount));
  attr(out, "start", format_number(doc.face.start));
  attr(out, "end", format_number(doc.face.end));
  out += "/>\n";
  for (const auto& g : doc.gestures) {
    out += "  <gesture";
    attr(out, "id", g.id);
    attr(out, "lexeme", g.lexeme);
    attr(out, "mode", to_string(g.mode));
    attr(out, "description", g.description);
    attr(out, "start", format_number(g.start));
    attr(out, "end", format_number(g.end));
    out += "/>\n";
  }
  out += "</bml>\n";
  return out;
}

std::vector<Issue> check(const BmlDocument& doc) {
  std::vector<Issue> issues;
  static const auto faces = face_lexicon();
  const auto timing_ok = [](double s, double e) {
    return std::isfinite(s) && std::isfinite(e) && s >= 0.0 && s < e;
  };

  std::set<std::string> ids{doc.id};
  const auto note_id = [&](const std::string& id) {
    if (!ids.insert(id).second) issues.push_back({Issue::Kind::DuplicateId, id});
  };

  note_id(doc.face.id);
  if (!faces.contains(doc.face.lexeme)) {
    issues.push_back({Issue::Kind::UnknownLexeme, doc.face.lexeme});
  }
  if (!(doc.face.amount > 0.0 && doc.face.amount <= 1.0)) {
    issues.push_back({Issue::Kind::BadAmount, doc.face.id});
  }
  if (!timing_ok(doc.face.start, doc.face.end)) {
    issues.push_back({Issue::Kind::BadTiming, doc.face.id});
  }

  std::size_t self = 0, other = 0;
  for (const auto& g : doc.gestures) {
    note_id(g.id);
    (g.mode == GestureMode::Self ? self : other)++;
    if (!gesture_lexicon().contains(g.lexeme)) {
      issues.push_back({Issue::Kind::UnknownLexeme, g.lexeme});
    }
    if (!timing_ok(g.start, g.end)) issues.push_back({Issue::Kind::BadTiming, g.id});
  }
  if (self != 1 || other != 1) {
    issues.push_back({Issue::Kind::Malformed, "expected exactly one SELF and one OTHER gesture"});
  }
  return issues;
}

Validation validate(std::string_view xml) {
  Validation result;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    result.issues.push_back({Issue::Kind::Malformed, e.what()});
    return result;
  }

  auto& issues = result.issues;
  if (tree.size() != 1 || tree.begin()->first != "bml") {
    issues.push_back({Issue::Kind::Malformed, "document root must be a single <bml> element"});
    return result;
  }
  const auto& root = tree.begin()->second;
  BmlDocument doc;
  Attrs root_attrs(root, "bml", issues);
  doc.id = root_attrs.text("id");
  doc.character = root_attrs.text("character");
  root_attrs.reject_unknown();

  std::size_t faces = 0;
  for (const auto& [name, node] : root) {
    if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
    if (name == "face") {
      ++faces;
      Attrs a(node, "face", issues);
      doc.face.id = a.text("id");
      doc.face.lexeme = a.text("lexeme");
      doc.face.amount = a.number("amount");
      doc.face.start = a.number("start");
      doc.face.end = a.number("end");
      a.reject_unknown();
    } else if (name == "gesture") {
      Attrs a(node, "gesture", issues);
      GestureDirective g;
      g.id = a.text("id");
      g.lexeme = a.text("lexeme");
      const auto mode = a.text("mode");
      if (mode == "SELF") {
        g.mode = GestureMode::Self;
      } else if (mode == "OTHER") {
        g.mode = GestureMode::Other;
      } else if (!mode.empty()) {
        issues.push_back({Issue::Kind::Malformed, "gesture " + g.id + ": bad mode '" + mode + "'"});
      }
      g.description = a.text("description");
      g.start = a.number("start");
      g.end = a.number("end");
      a.reject_unknown();
      doc.gestures.push_back(std::move(g));
    } else {
      issues.push_back({Issue::Kind::Malformed, "unexpected element <" + name + ">"});
    }
    if (!trim(node.data()).empty()) {
      issues.push_back({Issue::Kind::Malformed, "<" + name + "> must be empty"});
    }
  }
  if (!trim(root.data()).empty()) issues.push_back({Issue::Kind::Malformed, "stray text in <bml>"});
  if (faces != 1) issues.push_back({Issue::Kind::Malformed, "expected exactly one <face>"});

  auto more = check(doc);
  issues.insert(issues.end(), more.begin(), more.end());
  result.document = std::move(doc);
  return result;
}

}  // namespace afeng::bml
