#include "tdr/pattern.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <unordered_map>

#include "tdr/errors.hpp"

namespace tdr {

Pattern Pattern::leaf(std::string name, LabelId id) {
  Pattern p;
  p.kind = Kind::Label;
  p.name = std::move(name);
  p.label = id;
  return p;
}

Pattern Pattern::negate(Pattern child) {
  Pattern p;
  p.kind = Kind::Not;
  p.children.push_back(std::move(child));
  return p;
}

Pattern Pattern::all(std::vector<Pattern> children) {
  if (children.size() == 1) return std::move(children.front());
  Pattern p;
  p.kind = Kind::And;
  p.children = std::move(children);
  return p;
}

Pattern Pattern::any(std::vector<Pattern> children) {
  if (children.size() == 1) return std::move(children.front());
  Pattern p;
  p.kind = Kind::Or;
  p.children = std::move(children);
  return p;
}

bool Pattern::bound() const {
  if (kind == Kind::Label) return label != kUnbound;
  return std::all_of(children.begin(), children.end(),
                     [](const Pattern& c) { return c.bound(); });
}

// ---------------------------------------------------------------- parsing

namespace {

enum class Tok { Label, And, Or, Not, AllOf, AnyOf, NoneOf, LParen, RParen, LBrace, RBrace, Comma, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t offset;
};

bool is_label_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Tok single = Tok::End;
    switch (c) {
      case '&': single = Tok::And; break;
      case '|': single = Tok::Or; break;
      case '!': single = Tok::Not; break;
      case '(': single = Tok::LParen; break;
      case ')': single = Tok::RParen; break;
      case '{': single = Tok::LBrace; break;
      case '}': single = Tok::RBrace; break;
      case ',': single = Tok::Comma; break;
      default: break;
    }
    if (single != Tok::End) {
      out.push_back({single, text.substr(i, 1), i});
      ++i;
      continue;
    }
    if (!is_label_char(c))
      throw SyntaxError(i, std::string("unexpected character '") + c + "'");
    std::size_t end = i;
    while (end < text.size() && is_label_char(text[end])) ++end;
    std::string_view word = text.substr(i, end - i);
    Tok kind = Tok::Label;
    if (word == "AND") kind = Tok::And;
    else if (word == "OR") kind = Tok::Or;
    else if (word == "NOT") kind = Tok::Not;
    else if (word == "ALL_OF") kind = Tok::AllOf;
    else if (word == "ANY_OF") kind = Tok::AnyOf;
    else if (word == "NONE_OF") kind = Tok::NoneOf;
    out.push_back({kind, word, i});
    i = end;
  }
  out.push_back({Tok::End, {}, text.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

  Pattern parse() {
    Pattern p = parse_or();
    if (peek().kind != Tok::End) fail("expected operator or end of pattern");
    return p;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string near = t.kind == Tok::End ? "end of input" : "'" + std::string(t.text) + "'";
    throw SyntaxError(t.offset, what + " near " + near);
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    ++pos_;
  }

  Pattern parse_or() {
    std::vector<Pattern> parts;
    parts.push_back(parse_and());
    while (peek().kind == Tok::Or) {
      ++pos_;
      parts.push_back(parse_and());
    }
    return Pattern::any(std::move(parts));
  }

  Pattern parse_and() {
    std::vector<Pattern> parts;
    parts.push_back(parse_unary());
    while (peek().kind == Tok::And) {
      ++pos_;
      parts.push_back(parse_unary());
    }
    return Pattern::all(std::move(parts));
  }

  Pattern parse_unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not:
        ++pos_;
        return Pattern::negate(parse_unary());
      case Tok::LParen: {
        ++pos_;
        Pattern inner = parse_or();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Label:
        ++pos_;
        return Pattern::leaf(std::string(t.text));
      case Tok::AllOf:
      case Tok::AnyOf:
      case Tok::NoneOf:
        return parse_sugar();
      default:
        fail("expected label, NOT, '(' or set operator");
    }
  }

  Pattern parse_sugar() {
    Tok op = take().kind;
    expect(Tok::LBrace, "'{'");
    std::vector<Pattern> items;
    do {
      if (peek().kind != Tok::Label) fail("expected label");
      Pattern leaf = Pattern::leaf(std::string(take().text));
      items.push_back(op == Tok::NoneOf ? Pattern::negate(std::move(leaf)) : std::move(leaf));
    } while (peek().kind == Tok::Comma && (++pos_, true));
    expect(Tok::RBrace, "'}'");
    return op == Tok::AnyOf ? Pattern::any(std::move(items)) : Pattern::all(std::move(items));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void print(const Pattern& p, std::string& out);

void print_operand(const Pattern& p, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(p, out);
  if (wrap) out += ')';
}

void print(const Pattern& p, std::string& out) {
  using K = Pattern::Kind;
  switch (p.kind) {
    case K::Label:
      out += p.name;
      break;
    case K::Not:
      out += "NOT ";
      print_operand(p.children[0], p.children[0].kind == K::And || p.children[0].kind == K::Or, out);
      break;
    case K::And:
    case K::Or: {
      const char* sep = p.kind == K::And ? " AND " : " OR ";
      for (std::size_t i = 0; i < p.children.size(); ++i) {
        if (i) out += sep;
        const Pattern& c = p.children[i];
        bool wrap = c.kind == K::Or || (p.kind == K::And && c.kind == K::And);
        print_operand(c, wrap, out);
      }
      break;
    }
  }
}

}  // namespace

Pattern parse_pattern(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Pattern& pattern) {
  std::string out;
  print(pattern, out);
  return out;
}

// ---------------------------------------------------------------- binding

BoundPattern bind(const Pattern& pattern, const LabelDictionary& labels) {
  BoundPattern result;
  result.known_label_count = labels.size();
  std::unordered_map<std::string, LabelId> unknown;

  auto walk = [&](auto&& self, const Pattern& p) -> Pattern {
    if (p.kind != Pattern::Kind::Label) {
      Pattern copy;
      copy.kind = p.kind;
      copy.children.reserve(p.children.size());
      for (const Pattern& c : p.children) copy.children.push_back(self(self, c));
      return copy;
    }
    if (auto id = labels.find(p.name)) return Pattern::leaf(p.name, *id);
    auto [it, fresh] = unknown.emplace(
        p.name, static_cast<LabelId>(labels.size() + result.unknown_labels.size()));
    if (fresh) result.unknown_labels.push_back(p.name);
    return Pattern::leaf(p.name, it->second);
  };
  result.ast = walk(walk, pattern);
  return result;
}

bool eval(const Pattern& p, const LabelSet& labels) {
  using K = Pattern::Kind;
  switch (p.kind) {
    case K::Label:
      return std::binary_search(labels.begin(), labels.end(), p.label);
    case K::Not:
      return !eval(p.children[0], labels);
    case K::And:
      return std::all_of(p.children.begin(), p.children.end(),
                         [&](const Pattern& c) { return eval(c, labels); });
    case K::Or:
      return std::any_of(p.children.begin(), p.children.end(),
                         [&](const Pattern& c) { return eval(c, labels); });
  }
  return false;
}

// ---------------------------------------------------------------- DNF

bool Clause::satisfied_by(const LabelSet& labels) const {
  if (!std::includes(labels.begin(), labels.end(), required.begin(), required.end()))
    return false;
  for (LabelId x : excluded)
    if (std::binary_search(labels.begin(), labels.end(), x)) return false;
  return true;
}

bool ClauseSet::satisfied_by(const LabelSet& labels) const {
  return std::any_of(clauses.begin(), clauses.end(),
                     [&](const Clause& c) { return c.satisfied_by(labels); });
}

namespace {

bool subsumes(const Clause& a, const Clause& b) {
  return std::includes(b.required.begin(), b.required.end(), a.required.begin(), a.required.end()) &&
         std::includes(b.excluded.begin(), b.excluded.end(), a.excluded.begin(), a.excluded.end());
}

bool disjoint(const LabelSet& a, const LabelSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return false;
    if (*i < *j) ++i;
    else ++j;
  }
  return true;
}

LabelSet set_union(const LabelSet& a, const LabelSet& b) {
  LabelSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void reduce(std::vector<Clause>& clauses) {
  std::sort(clauses.begin(), clauses.end());
  clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
  std::stable_sort(clauses.begin(), clauses.end(), [](const Clause& a, const Clause& b) {
    return a.required.size() + a.excluded.size() < b.required.size() + b.excluded.size();
  });
  std::vector<Clause> kept;
  for (Clause& c : clauses) {
    bool dominated = std::any_of(kept.begin(), kept.end(),
                                 [&](const Clause& k) { return subsumes(k, c); });
    if (!dominated) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end());
  clauses = std::move(kept);
}

// (R + l, X) OR (R, X + l) is just (R, X).
std::optional<Clause> merge(const Clause& a, const Clause& b) {
  if (a.required.size() != b.required.size() + 1 || b.excluded.size() != a.excluded.size() + 1)
    return std::nullopt;
  LabelSet r_extra;
  LabelSet x_extra;
  std::set_difference(a.required.begin(), a.required.end(), b.required.begin(), b.required.end(),
                      std::back_inserter(r_extra));
  std::set_difference(b.excluded.begin(), b.excluded.end(), a.excluded.begin(), a.excluded.end(),
                      std::back_inserter(x_extra));
  // The size checks make both differences exact.
  if (r_extra.size() != 1 || x_extra != r_extra) return std::nullopt;
  return Clause{b.required, a.excluded};
}

void merge_complements(std::vector<Clause>& clauses) {
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < clauses.size() && !changed; ++i) {
      for (std::size_t j = 0; j < clauses.size() && !changed; ++j) {
        if (auto m = merge(clauses[i], clauses[j])) {
          clauses.push_back(std::move(*m));
          reduce(clauses);
          changed = true;
        }
      }
    }
  }
}

class Normalizer {
 public:
  explicit Normalizer(std::size_t max_clauses) : max_(max_clauses) {}

  std::vector<Clause> dnf(const Pattern& p, bool negated) {
    using K = Pattern::Kind;
    switch (p.kind) {
      case K::Label: {
        Clause c;
        (negated ? c.excluded : c.required).push_back(p.label);
        return {c};
      }
      case K::Not:
        return dnf(p.children[0], !negated);
      case K::And:
      case K::Or: {
        // De Morgan: a negated AND distributes like an OR and vice versa.
        bool conjunction = (p.kind == K::And) != negated;
        std::vector<Clause> acc = dnf(p.children[0], negated);
        for (std::size_t i = 1; i < p.children.size(); ++i) {
          std::vector<Clause> next = dnf(p.children[i], negated);
          acc = conjunction ? product(acc, next) : concat(std::move(acc), std::move(next));
        }
        return acc;
      }
    }
    return {};
  }

 private:
  std::vector<Clause> concat(std::vector<Clause> a, std::vector<Clause> b) {
    a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
    reduce(a);
    check(a.size());
    return a;
  }

  std::vector<Clause> product(const std::vector<Clause>& a, const std::vector<Clause>& b) {
    // Bounds the quadratic subsumption pass on pathological inputs.
    if (a.size() * b.size() > max_ * max_) check(a.size() * b.size());
    std::vector<Clause> out;
    out.reserve(a.size() * b.size());
    for (const Clause& x : a) {
      for (const Clause& y : b) {
        Clause c{set_union(x.required, y.required), set_union(x.excluded, y.excluded)};
        if (disjoint(c.required, c.excluded)) out.push_back(std::move(c));
      }
    }
    reduce(out);
    check(out.size());
    return out;
  }

  void check(std::size_t count) const {
    if (count > max_)
      throw PatternTooComplex("pattern expands to " + std::to_string(count) +
                              " clauses (limit " + std::to_string(max_) + ")");
  }

  std::size_t max_;
};

}  // namespace

ClauseSet normalize(const Pattern& pattern, std::size_t max_clauses) {
  if (!pattern.bound()) throw InvalidParam("pattern must be bound before normalisation");
  Normalizer n(max_clauses);
  std::vector<Clause> clauses = n.dnf(pattern, false);
  // Leaves produce a single clause that never passed through reduce().
  reduce(clauses);
  if (clauses.size() > max_clauses)
    throw PatternTooComplex("pattern expands to " + std::to_string(clauses.size()) + " clauses");
  merge_complements(clauses);
  if (clauses.size() > max_clauses)
    throw PatternTooComplex("pattern expands to " + std::to_string(clauses.size()) + " clauses");
  return ClauseSet{std::move(clauses)};
}

Pattern to_pattern(const ClauseSet& set, const std::vector<std::string>& names) {
  auto leaf = [&](LabelId id) { return Pattern::leaf(names.at(id), id); };
  if (set.clauses.empty()) {
    if (names.empty()) throw InvalidParam("need at least one label name");
    return Pattern::all({leaf(0), Pattern::negate(leaf(0))});
  }
  std::vector<Pattern> terms;
  for (const Clause& c : set.clauses) {
    if (c.required.empty() && c.excluded.empty()) {
      if (names.empty()) throw InvalidParam("need at least one label name");
      terms.push_back(Pattern::any({leaf(0), Pattern::negate(leaf(0))}));
      continue;
    }
    std::vector<Pattern> literals;
    for (LabelId r : c.required) literals.push_back(leaf(r));
    for (LabelId x : c.excluded) literals.push_back(Pattern::negate(leaf(x)));
    terms.push_back(Pattern::all(std::move(literals)));
  }
  return Pattern::any(std::move(terms));
}

ClauseSet restrict_to_known(ClauseSet set, std::size_t known_label_count) {
  std::vector<Clause> out;
  for (Clause& c : set.clauses) {
    if (!c.required.empty() && c.required.back() >= known_label_count) continue;
    std::erase_if(c.excluded, [&](LabelId x) { return x >= known_label_count; });
    out.push_back(std::move(c));
  }
  reduce(out);
  return ClauseSet{std::move(out)};
}

}  // namespace tdr
