#pragma once

// Regex-based location annotation of event descriptions. Junction patterns
// are tested before the general intersection pattern, and a junction match
// suppresses the intersection label.

#include <istream>
#include <ostream>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "dap/common.hpp"

namespace dap {

enum class AnnotationTarget : int { intersection = 0, junction = 1 };

inline std::string_view to_string(AnnotationTarget t) {
  return t == AnnotationTarget::intersection ? "intersection" : "junction";
}

inline bool parse_annotation_target(std::string_view s, AnnotationTarget& out) {
  if (s == "intersection") {
    out = AnnotationTarget::intersection;
    return true;
  }
  if (s == "junction") {
    out = AnnotationTarget::junction;
    return true;
  }
  return false;
}

struct Pattern {
  std::string regex_text;
  AnnotationTarget target = AnnotationTarget::intersection;
  std::string family;  // source family the pattern was derived from
  std::regex compiled;
};

struct AnnotationSet {
  bool intersection = false;
  bool junction = false;

  bool empty() const { return !intersection && !junction; }
  bool has(AnnotationTarget t) const {
    return t == AnnotationTarget::intersection ? intersection : junction;
  }
  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

class PatternSet {
public:
  void add(std::string regex_text, AnnotationTarget target, std::string family) {
    Pattern p;
    p.regex_text = std::move(regex_text);
    p.target = target;
    p.family = std::move(family);
    try {
      p.compiled = std::regex(p.regex_text, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      fail(Errc::config, "pattern does not compile: '" + p.regex_text + "': " + e.what());
    }
    patterns_.push_back(std::move(p));
  }

  const std::vector<Pattern>& patterns() const { return patterns_; }

  // The pattern schemas evidenced in the sources' phrasing:
  //   mapquest  "... on ... at exit ..."  -> junction
  //   mapquest  "... on ... at ..."       -> intersection
  //   bing      "at ... exit ..."         -> junction
  //   bing      "ramp to ..."             -> junction
  static PatternSet defaults() {
    PatternSet ps;
    ps.add(R"(\bon\b.*\bat\s+exit\b)", AnnotationTarget::junction, "mapquest");
    ps.add(R"(\bat\b.*\bexit\b)", AnnotationTarget::junction, "bing");
    ps.add(R"(\bramp\s+to\b)", AnnotationTarget::junction, "bing");
    ps.add(R"(\bon\b.*\bat\b)", AnnotationTarget::intersection, "mapquest");
    return ps;
  }

  // One pattern per line: regex \t target \t family.
  static PatternSet load(std::istream& in) {
    PatternSet ps;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto t1 = line.find('\t');
      const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
      if (t2 == std::string::npos)
        fail(Errc::config, "pattern file line " + std::to_string(line_no) +
                               ": expected regex<TAB>target<TAB>family");
      AnnotationTarget target;
      if (!parse_annotation_target(line.substr(t1 + 1, t2 - t1 - 1), target))
        fail(Errc::config, "pattern file line " + std::to_string(line_no) + ": unknown target");
      ps.add(line.substr(0, t1), target, line.substr(t2 + 1));
    }
    return ps;
  }

  void save(std::ostream& out) const {
    for (const auto& p : patterns_)
      out << p.regex_text << '\t' << to_string(p.target) << '\t' << p.family << '\n';
  }

private:
  std::vector<Pattern> patterns_;
};

inline AnnotationSet match_patterns(const std::string& description, const PatternSet& ps) {
  AnnotationSet out;
  // Junction patterns first; a junction hit suppresses the intersection label.
  for (const auto& p : ps.patterns()) {
    if (p.target != AnnotationTarget::junction) continue;
    if (std::regex_search(description, p.compiled)) {
      out.junction = true;
      return out;
    }
  }
  for (const auto& p : ps.patterns()) {
    if (p.target != AnnotationTarget::intersection) continue;
    if (std::regex_search(description, p.compiled)) {
      out.intersection = true;
      break;
    }
  }
  return out;
}

}  // namespace dap
