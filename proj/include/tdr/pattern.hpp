#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tdr/graph.hpp"

namespace tdr {

// Propositional formula over edge labels. Leaves carry the label text and,
// once bound, a label id. And/Or always have at least two children; Not has
// exactly one.
struct Pattern {
  enum class Kind : std::uint8_t { Label, Not, And, Or };

  static constexpr LabelId kUnbound = ~LabelId{0};

  Kind kind = Kind::Label;
  std::string name;
  LabelId label = kUnbound;
  std::vector<Pattern> children;

  static Pattern leaf(std::string name, LabelId id = kUnbound);
  static Pattern negate(Pattern child);
  static Pattern all(std::vector<Pattern> children);
  static Pattern any(std::vector<Pattern> children);

  bool bound() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

// Grammar (precedence NOT > AND > OR):
//   Or    := And (("OR" | "|") And)*
//   And   := Unary (("AND" | "&") Unary)*
//   Unary := ("NOT" | "!") Unary | "(" Or ")" | LABEL | Sugar
//   Sugar := ("ALL_OF" | "ANY_OF" | "NONE_OF") "{" LABEL ("," LABEL)* "}"
// Throws SyntaxError with the byte offset of the offending token.
Pattern parse_pattern(std::string_view text);

// Canonical text form; parse_pattern(to_string(p)) == p for unbound ASTs.
std::string to_string(const Pattern& pattern);

// Result of resolving leaf names against a graph's dictionary. Labels the
// graph does not know get ids from `known_label_count` upwards, so they stay
// distinct propositions during normalisation.
struct BoundPattern {
  Pattern ast;
  std::size_t known_label_count = 0;
  std::vector<std::string> unknown_labels;
};

BoundPattern bind(const Pattern& pattern, const LabelDictionary& labels);

// Sorted, duplicate-free label set.
using LabelSet = std::vector<LabelId>;

// Label(l) is true iff l is in `labels` (sorted).
bool eval(const Pattern& pattern, const LabelSet& labels);

// DNF term: every label of `required` present, none of `excluded`.
struct Clause {
  LabelSet required;
  LabelSet excluded;

  bool satisfied_by(const LabelSet& labels) const;
  friend auto operator<=>(const Clause&, const Clause&) = default;
};

struct ClauseSet {
  std::vector<Clause> clauses;  // sorted

  bool satisfied_by(const LabelSet& labels) const;
  friend bool operator==(const ClauseSet&, const ClauseSet&) = default;
};

inline constexpr std::size_t kDefaultMaxClauses = 256;

// NNF by De Morgan, then DNF by distribution. Contradictory clauses are
// dropped, duplicates and subsumed clauses removed. Throws
// PatternTooComplex when more than `max_clauses` clauses remain.
ClauseSet normalize(const Pattern& pattern,
                    std::size_t max_clauses = kDefaultMaxClauses);

// Re-expresses a clause set as a bound AST over `names` (indexed by id).
// The empty set becomes `l0 AND NOT l0`, the empty clause `l0 OR NOT l0`.
Pattern to_pattern(const ClauseSet& clauses, const std::vector<std::string>& names);

// Drops clauses requiring a label id >= known_label_count and strips such
// ids from exclusion lists: absent labels never occur on a path.
ClauseSet restrict_to_known(ClauseSet clauses, std::size_t known_label_count);

}  // namespace tdr
