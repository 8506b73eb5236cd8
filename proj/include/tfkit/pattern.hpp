#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tfkit::rx {

// The supported pattern dialect: literals, character classes, alternation,
// grouping, bounded and unbounded repetition, and the usual escapes.
// Anchors are accepted only at the pattern boundaries and are stripped, so
// that anchored and unanchored user patterns compile identically.
// Backreferences and lookaround are rejected: every accepted pattern
// denotes a regular language. Semantics are byte-oriented; `.` matches any
// byte except line breaks, as in the ECMAScript grammar used for matching.

class PatternError : public std::runtime_error {
public:
  PatternError(std::string message, std::size_t position)
      : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

// Set of bytes, stored as sorted disjoint inclusive ranges. Negation is
// resolved at construction time.
struct CharSet {
  std::vector<std::pair<unsigned char, unsigned char>> ranges;

  void add(unsigned char lo, unsigned char hi) { ranges.emplace_back(lo, hi); }
  void add(unsigned char c) { add(c, c); }

  void normalize() {
    if (ranges.empty()) return;
    std::sort(ranges.begin(), ranges.end());
    std::vector<std::pair<unsigned char, unsigned char>> merged;
    for (auto [lo, hi] : ranges) {
      if (!merged.empty() && lo <= static_cast<unsigned>(merged.back().second) + 1) {
        if (hi > merged.back().second) merged.back().second = hi;
      } else {
        merged.emplace_back(lo, hi);
      }
    }
    ranges = std::move(merged);
  }

  CharSet complement() const {
    CharSet out;
    unsigned next = 0;
    for (auto [lo, hi] : ranges) {
      if (lo > next) out.add(static_cast<unsigned char>(next), static_cast<unsigned char>(lo - 1));
      next = static_cast<unsigned>(hi) + 1;
    }
    if (next <= 255) out.add(static_cast<unsigned char>(next), 255);
    return out;
  }

  bool contains(unsigned char c) const {
    for (auto [lo, hi] : ranges)
      if (c >= lo && c <= hi) return true;
    return false;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto [lo, hi] : ranges) n += static_cast<std::size_t>(hi) - lo + 1;
    return n;
  }

  bool empty() const { return ranges.empty(); }
};

struct Node {
  enum class Kind { Literal, Class, Concat, Alternate, Repeat };

  Kind kind = Kind::Literal;
  std::string literal;          // Literal
  CharSet cls;                  // Class
  std::vector<Node> children;   // Concat / Alternate parts; Repeat has one child
  std::size_t rep_min = 0;      // Repeat
  std::optional<std::size_t> rep_max;
};

struct Pattern {
  Node root;
  std::string normalized;  // source with boundary anchors stripped
};

namespace detail {

inline CharSet predefined_class(char c, std::size_t pos) {
  CharSet s;
  switch (c) {
    case 'd': s.add('0', '9'); break;
    case 'w':
      s.add('0', '9');
      s.add('A', 'Z');
      s.add('a', 'z');
      s.add('_');
      break;
    case 's':
      s.add(' ');
      s.add('\t');
      s.add('\n');
      s.add('\r');
      s.add('\f');
      s.add('\v');
      break;
    default: throw PatternError("unsupported escape class", pos);
  }
  s.normalize();
  return s;
}

inline CharSet dot_class() {
  CharSet s;
  s.add('\n');
  s.add('\r');
  s.normalize();
  return s.complement();
}

class PatternParser {
public:
  explicit PatternParser(std::string_view src) : src_(src) {}

  Node parse() {
    Node n = parse_alternation();
    if (pos_ != src_.size()) throw PatternError("unbalanced ')'", pos_);
    return n;
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;

  bool at_end() const { return pos_ >= src_.size(); }
  char cur() const { return src_[pos_]; }

  Node parse_alternation() {
    std::vector<Node> branches;
    branches.push_back(parse_concat());
    while (!at_end() && cur() == '|') {
      ++pos_;
      branches.push_back(parse_concat());
    }
    if (branches.size() == 1) return std::move(branches.front());
    Node n;
    n.kind = Node::Kind::Alternate;
    n.children = std::move(branches);
    return n;
  }

  Node parse_concat() {
    std::vector<Node> parts;
    while (!at_end() && cur() != '|' && cur() != ')') {
      Node atom = parse_atom();
      apply_quantifier(atom);
      // merge adjacent single-char literals for compact analysis
      if (atom.kind == Node::Kind::Literal && !parts.empty() &&
          parts.back().kind == Node::Kind::Literal) {
        parts.back().literal += atom.literal;
      } else {
        parts.push_back(std::move(atom));
      }
    }
    if (parts.size() == 1) return std::move(parts.front());
    Node n;
    n.kind = Node::Kind::Concat;
    n.children = std::move(parts);
    if (n.children.empty()) {
      n.kind = Node::Kind::Literal;
      n.literal.clear();
    }
    return n;
  }

  Node parse_atom() {
    char c = cur();
    switch (c) {
      case '^':
      case '$':
        throw PatternError("anchors are only supported at the pattern boundaries", pos_);
      case '*':
      case '+':
      case '?':
        throw PatternError("quantifier without preceding atom", pos_);
      case '{': throw PatternError("repetition braces without preceding atom", pos_);
      case '(': return parse_group();
      case '[': return parse_class();
      case '.': {
        ++pos_;
        Node n;
        n.kind = Node::Kind::Class;
        n.cls = dot_class();
        return n;
      }
      case '\\': return parse_escape();
      default: {
        ++pos_;
        Node n;
        n.literal = std::string(1, c);
        return n;
      }
    }
  }

  Node parse_group() {
    std::size_t open = pos_;
    ++pos_;  // '('
    if (!at_end() && cur() == '?') {
      ++pos_;
      if (at_end()) throw PatternError("unterminated group", open);
      char k = cur();
      if (k == ':') {
        ++pos_;
      } else if (k == '=' || k == '!') {
        throw PatternError("lookahead is not supported", open);
      } else if (k == '<') {
        throw PatternError("lookbehind and named groups are not supported", open);
      } else {
        throw PatternError("unsupported group modifier", open);
      }
    }
    Node inner = parse_alternation();
    if (at_end() || cur() != ')') throw PatternError("unbalanced '('", open);
    ++pos_;
    return inner;
  }

  Node parse_escape() {
    std::size_t esc = pos_;
    ++pos_;  // '\'
    if (at_end()) throw PatternError("dangling backslash", esc);
    char c = cur();
    ++pos_;
    if (c >= '1' && c <= '9') throw PatternError("backreferences are not supported", esc);
    if (c == 'b' || c == 'B') throw PatternError("word boundaries are not supported", esc);
    Node n;
    switch (c) {
      case 'd':
      case 'w':
      case 's':
        n.kind = Node::Kind::Class;
        n.cls = predefined_class(c, esc);
        return n;
      case 'D':
      case 'W':
      case 'S':
        n.kind = Node::Kind::Class;
        n.cls = predefined_class(static_cast<char>(c + 32), esc).complement();
        return n;
      case 'n': n.literal = "\n"; return n;
      case 't': n.literal = "\t"; return n;
      case 'r': n.literal = "\r"; return n;
      case 'f': n.literal = "\f"; return n;
      case 'v': n.literal = "\v"; return n;
      case '0': n.literal = std::string(1, '\0'); return n;
      default:
        if (std::isalnum(static_cast<unsigned char>(c)))
          throw PatternError(std::string("unsupported escape '\\") + c + "'", esc);
        n.literal = std::string(1, c);
        return n;
    }
  }

  Node parse_class() {
    std::size_t open = pos_;
    ++pos_;  // '['
    bool negated = false;
    if (!at_end() && cur() == '^') {
      negated = true;
      ++pos_;
    }
    CharSet set;
    bool any = false;
    while (true) {
      if (at_end()) throw PatternError("unterminated character class", open);
      if (cur() == ']') {
        if (!any) throw PatternError("empty character class", open);
        ++pos_;
        break;
      }
      auto first = parse_class_char();
      any = true;
      if (first.second) {  // predefined class escape inside [...]
        for (auto r : first.first.ranges) set.add(r.first, r.second);
        continue;
      }
      unsigned char lo = static_cast<unsigned char>(first.first.ranges.front().first);
      if (!at_end() && cur() == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] != ']') {
        ++pos_;
        auto second = parse_class_char();
        if (second.second) throw PatternError("invalid range endpoint", pos_);
        unsigned char hi = static_cast<unsigned char>(second.first.ranges.front().first);
        if (hi < lo) throw PatternError("reversed character range", pos_);
        set.add(lo, hi);
      } else {
        set.add(lo);
      }
    }
    set.normalize();
    Node n;
    n.kind = Node::Kind::Class;
    n.cls = negated ? set.complement() : set;
    if (n.cls.empty()) throw PatternError("character class matches nothing", open);
    return n;
  }

  // Returns ({set}, is_multichar_class). Single characters come back as a
  // one-element set.
  std::pair<CharSet, bool> parse_class_char() {
    char c = cur();
    if (c == '\\') {
      std::size_t esc = pos_;
      ++pos_;
      if (at_end()) throw PatternError("dangling backslash in class", esc);
      char e = cur();
      ++pos_;
      CharSet s;
      switch (e) {
        case 'd':
        case 'w':
        case 's': return {predefined_class(e, esc), true};
        case 'D':
        case 'W':
        case 'S': return {predefined_class(static_cast<char>(e + 32), esc).complement(), true};
        case 'n': s.add('\n'); return {s, false};
        case 't': s.add('\t'); return {s, false};
        case 'r': s.add('\r'); return {s, false};
        case 'f': s.add('\f'); return {s, false};
        case 'v': s.add('\v'); return {s, false};
        case '0': s.add('\0'); return {s, false};
        default:
          if (std::isalnum(static_cast<unsigned char>(e)))
            throw PatternError(std::string("unsupported escape '\\") + e + "' in class", esc);
          s.add(static_cast<unsigned char>(e));
          return {s, false};
      }
    }
    if (c == ']') throw PatternError("']' must be escaped inside a class", pos_);
    ++pos_;
    CharSet s;
    s.add(static_cast<unsigned char>(c));
    return {s, false};
  }

  void apply_quantifier(Node& atom) {
    if (at_end()) return;
    char c = cur();
    std::size_t min = 0;
    std::optional<std::size_t> max;
    if (c == '*') {
      ++pos_;
    } else if (c == '+') {
      min = 1;
      ++pos_;
    } else if (c == '?') {
      max = 1;
      ++pos_;
    } else if (c == '{') {
      std::size_t open = pos_;
      ++pos_;
      auto num = parse_number();
      if (!num) throw PatternError("expected number in repetition", open);
      min = *num;
      if (!at_end() && cur() == ',') {
        ++pos_;
        max = parse_number();  // absent -> unbounded
      } else {
        max = min;
      }
      if (at_end() || cur() != '}') throw PatternError("unterminated repetition braces", open);
      ++pos_;
      if (max && *max < min) throw PatternError("repetition bounds out of order", open);
    } else {
      return;
    }
    if (!at_end() && cur() == '?') ++pos_;  // lazy marker: same language
    // quantifying a multi-char literal applies to the last char in regex
    // syntax; our parser merged nothing yet, so the atom is exact
    Node rep;
    rep.kind = Node::Kind::Repeat;
    rep.rep_min = min;
    rep.rep_max = max;
    rep.children.push_back(std::move(atom));
    atom = std::move(rep);
  }

  std::optional<std::size_t> parse_number() {
    if (at_end() || !std::isdigit(static_cast<unsigned char>(cur()))) return std::nullopt;
    std::size_t n = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(cur()))) {
      n = n * 10 + static_cast<std::size_t>(cur() - '0');
      if (n > 100000) throw PatternError("repetition bound too large", pos_);
      ++pos_;
    }
    return n;
  }
};

}  // namespace detail

// Strips a leading '^' and a trailing unescaped '$'.
inline std::string strip_anchors(std::string_view src) {
  std::string_view s = src;
  if (!s.empty() && s.front() == '^') s.remove_prefix(1);
  if (!s.empty() && s.back() == '$') {
    std::size_t backslashes = 0;
    for (std::size_t i = s.size() - 1; i-- > 0 && s[i] == '\\';) ++backslashes;
    if (backslashes % 2 == 0) s.remove_suffix(1);
  }
  return std::string(s);
}

// Parses a user pattern, throwing PatternError on anything outside the
// supported dialect.
inline Pattern parse_pattern(std::string_view src) {
  Pattern p;
  p.normalized = strip_anchors(src);
  p.root = detail::PatternParser(p.normalized).parse();
  return p;
}

// ok -> nullopt; otherwise a description of the offending construct.
inline std::optional<std::string> user_pattern_check(std::string_view src) {
  try {
    parse_pattern(src);
    return std::nullopt;
  } catch (const PatternError& e) {
    return std::string(e.what());
  }
}

// Returns a pattern matching exactly the literal string s.
inline std::string escape_literal(std::string_view s) {
  static constexpr std::string_view meta = "\\^$.|?*+()[]{}";
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (meta.find(c) != std::string_view::npos) out += '\\';
    out += c;
  }
  return out;
}

// --- language analyses ---

inline bool matches_empty(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Literal: return n.literal.empty();
    case Node::Kind::Class: return false;
    case Node::Kind::Concat:
      for (const auto& c : n.children)
        if (!matches_empty(c)) return false;
      return true;
    case Node::Kind::Alternate:
      for (const auto& c : n.children)
        if (matches_empty(c)) return true;
      return false;
    case Node::Kind::Repeat:
      return n.rep_min == 0 || matches_empty(n.children.front());
  }
  return false;
}

// If the language contains exactly one string, returns it.
inline std::optional<std::string> singleton_string(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Literal: return n.literal;
    case Node::Kind::Class: {
      if (n.cls.count() == 1)
        return std::string(1, static_cast<char>(n.cls.ranges.front().first));
      return std::nullopt;
    }
    case Node::Kind::Concat: {
      std::string out;
      for (const auto& c : n.children) {
        auto s = singleton_string(c);
        if (!s) return std::nullopt;
        out += *s;
      }
      return out;
    }
    case Node::Kind::Alternate: {
      std::optional<std::string> common;
      for (const auto& c : n.children) {
        auto s = singleton_string(c);
        if (!s) return std::nullopt;
        if (common && *common != *s) return std::nullopt;
        common = std::move(s);
      }
      return common;
    }
    case Node::Kind::Repeat: {
      auto s = singleton_string(n.children.front());
      if (!s) return std::nullopt;
      if (s->empty()) return std::string();
      if (n.rep_max && n.rep_min == *n.rep_max) {
        std::string out;
        for (std::size_t i = 0; i < n.rep_min; ++i) out += *s;
        return out;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace detail {

// Thompson NFA over CharSet-labelled edges, used for the substring
// reachability question below.
struct Nfa {
  struct Edge {
    CharSet set;
    std::size_t to;
  };
  struct State {
    std::vector<Edge> edges;
    std::vector<std::size_t> eps;
  };
  std::vector<State> states;
  std::size_t start = 0, accept = 0;

  std::size_t add_state() {
    states.emplace_back();
    return states.size() - 1;
  }
};

constexpr std::size_t kNfaStateCap = 20000;

// Builds states for `n` between entry and exit. Returns false if the
// expansion (bounded repeats are unrolled) exceeds the state cap.
inline bool build_nfa(const Node& n, Nfa& nfa, std::size_t entry, std::size_t exit) {
  if (nfa.states.size() > kNfaStateCap) return false;
  switch (n.kind) {
    case Node::Kind::Literal: {
      std::size_t at = entry;
      for (std::size_t i = 0; i < n.literal.size(); ++i) {
        std::size_t next = (i + 1 == n.literal.size()) ? exit : nfa.add_state();
        CharSet s;
        s.add(static_cast<unsigned char>(n.literal[i]));
        nfa.states[at].edges.push_back({s, next});
        at = next;
      }
      if (n.literal.empty()) nfa.states[entry].eps.push_back(exit);
      return true;
    }
    case Node::Kind::Class:
      nfa.states[entry].edges.push_back({n.cls, exit});
      return true;
    case Node::Kind::Concat: {
      std::size_t at = entry;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        std::size_t next = (i + 1 == n.children.size()) ? exit : nfa.add_state();
        if (!build_nfa(n.children[i], nfa, at, next)) return false;
        at = next;
      }
      if (n.children.empty()) nfa.states[entry].eps.push_back(exit);
      return true;
    }
    case Node::Kind::Alternate:
      for (const auto& c : n.children)
        if (!build_nfa(c, nfa, entry, exit)) return false;
      return true;
    case Node::Kind::Repeat: {
      const Node& child = n.children.front();
      std::size_t at = entry;
      for (std::size_t i = 0; i < n.rep_min; ++i) {
        std::size_t next = nfa.add_state();
        if (!build_nfa(child, nfa, at, next)) return false;
        at = next;
      }
      if (!n.rep_max) {
        // at -> exit, with a loop through the child
        nfa.states[at].eps.push_back(exit);
        std::size_t back = nfa.add_state();
        if (!build_nfa(child, nfa, at, back)) return false;
        nfa.states[back].eps.push_back(at);
        return true;
      }
      for (std::size_t i = n.rep_min; i < *n.rep_max; ++i) {
        nfa.states[at].eps.push_back(exit);
        std::size_t next = nfa.add_state();
        if (!build_nfa(child, nfa, at, next)) return false;
        at = next;
      }
      nfa.states[at].eps.push_back(exit);
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Whether some string of the language contains `needle` as a substring.
// Exact (product of the NFA with the KMP automaton of the needle), except
// that patterns whose unrolled NFA would be enormous conservatively return
// false. Used to validate that a tagname regex cannot produce the internal
// separator.
inline bool can_contain(const Node& pattern, std::string_view needle) {
  if (needle.empty()) return true;
  detail::Nfa nfa;
  nfa.start = nfa.add_state();
  nfa.accept = nfa.add_state();
  if (!detail::build_nfa(pattern, nfa, nfa.start, nfa.accept)) return false;

  // KMP failure table
  std::vector<std::size_t> fail(needle.size(), 0);
  for (std::size_t i = 1; i < needle.size(); ++i) {
    std::size_t j = fail[i - 1];
    while (j > 0 && needle[i] != needle[j]) j = fail[j - 1];
    if (needle[i] == needle[j]) ++j;
    fail[i] = j;
  }
  const std::size_t found = needle.size();
  auto kmp_step = [&](std::size_t j, char c) -> std::size_t {
    if (j == found) return found;
    while (true) {
      if (needle[j] == c) return j + 1;
      if (j == 0) return 0;
      j = fail[j - 1];
    }
  };

  std::size_t nk = needle.size() + 1;
  std::vector<char> seen(nfa.states.size() * nk, 0);
  std::vector<std::pair<std::size_t, std::size_t>> queue;
  auto push = [&](std::size_t q, std::size_t j) {
    if (!seen[q * nk + j]) {
      seen[q * nk + j] = 1;
      queue.emplace_back(q, j);
    }
  };
  push(nfa.start, 0);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    auto [q, j] = queue[i];
    if (q == nfa.accept && j == found) return true;
    for (std::size_t t : nfa.states[q].eps) push(t, j);
    for (const auto& e : nfa.states[q].edges) {
      // chars of the needle step precisely; any other char resets to 0
      bool other = false;
      for (auto [lo, hi] : e.set.ranges) {
        for (unsigned c = lo; c <= hi; ++c) {
          if (needle.find(static_cast<char>(c)) != std::string_view::npos) {
            push(e.to, kmp_step(j, static_cast<char>(c)));
          } else {
            other = true;
          }
          if (c == 255) break;
        }
      }
      if (other) push(e.to, j == found ? found : 0);
    }
  }
  return false;
}

// Random member of the language. Unbounded repetitions are capped at
// `rep_slack` iterations past the minimum. Character picks prefer the
// printable range when the class allows it.
template <class Rng>
std::string sample(const Node& n, Rng& rng, std::size_t rep_slack = 3) {
  switch (n.kind) {
    case Node::Kind::Literal: return n.literal;
    case Node::Kind::Class: {
      std::vector<unsigned char> printable, all;
      for (auto [lo, hi] : n.cls.ranges) {
        for (unsigned c = lo; c <= hi; ++c) {
          all.push_back(static_cast<unsigned char>(c));
          if (c >= 0x20 && c < 0x7f) printable.push_back(static_cast<unsigned char>(c));
          if (all.size() > 512 || c == 255) break;
        }
      }
      const auto& pool = printable.empty() ? all : printable;
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      return std::string(1, static_cast<char>(pool[pick(rng)]));
    }
    case Node::Kind::Concat: {
      std::string out;
      for (const auto& c : n.children) out += sample(c, rng, rep_slack);
      return out;
    }
    case Node::Kind::Alternate: {
      std::uniform_int_distribution<std::size_t> pick(0, n.children.size() - 1);
      return sample(n.children[pick(rng)], rng, rep_slack);
    }
    case Node::Kind::Repeat: {
      std::size_t hi = n.rep_max ? *n.rep_max
                                 : n.rep_min + rep_slack;
      hi = std::min(hi, n.rep_min + rep_slack);
      hi = std::max(hi, n.rep_min);
      std::uniform_int_distribution<std::size_t> pick(n.rep_min, hi);
      std::size_t k = pick(rng);
      std::string out;
      for (std::size_t i = 0; i < k; ++i) out += sample(n.children.front(), rng, rep_slack);
      return out;
    }
  }
  return {};
}

}  // namespace tfkit::rx
