#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace tfkit::yaml {

// Parsed YAML node. Scalars keep their literal text plus a `quoted` flag so
// the loader can distinguish the string "1" from the integer 1.
struct Node {
  enum class Kind { Scalar, Sequence, Mapping };

  Kind kind = Kind::Scalar;
  std::string scalar;
  bool quoted = false;
  std::vector<Node> items;
  std::vector<std::pair<std::string, Node>> pairs;
  std::size_t line = 0;

  bool is_scalar() const { return kind == Kind::Scalar; }
  bool is_sequence() const { return kind == Kind::Sequence; }
  bool is_mapping() const { return kind == Kind::Mapping; }

  const Node* find(std::string_view key) const {
    for (const auto& [k, v] : pairs)
      if (k == key) return &v;
    return nullptr;
  }

  static Node make_scalar(std::string text, bool quoted, std::size_t line) {
    Node n;
    n.kind = Kind::Scalar;
    n.scalar = std::move(text);
    n.quoted = quoted;
    n.line = line;
    return n;
  }
};

namespace detail {

// Recursive-descent parser for the YAML subset used by specification
// files: block and flow mappings/sequences, plain and quoted scalars,
// comments, and flow collections spanning several lines. Flow sequences
// accept single `key: value` pairs as items (they become one-pair
// mappings). Anchors, tags, directives, block scalars and multi-document
// streams are rejected.
class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  Node parse_document() {
    skip_blank_lines();
    if (at_end()) fail("empty document");
    // tolerate a leading document marker
    if (peek_line().substr(0, 3) == "---" && trimmed_rest(3).empty()) {
      next_line();
      skip_blank_lines();
      if (at_end()) fail("empty document");
    }
    Node root = parse_block_node(current_indent());
    skip_blank_lines();
    if (!at_end()) fail("trailing content after document root");
    return root;
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;

  [[noreturn]] void fail(const std::string& message) const {
    throw SpecError(SpecErrorKind::YamlSyntax, {"line " + std::to_string(line_)}, message);
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char cur() const { return src_[pos_]; }

  void advance() {
    if (src_[pos_] == '\n') ++line_;
    ++pos_;
  }

  // --- line-oriented helpers (block context) ---

  std::size_t line_end(std::size_t from) const {
    std::size_t e = src_.find('\n', from);
    return e == std::string_view::npos ? src_.size() : e;
  }

  std::string_view peek_line() const {
    return src_.substr(pos_, line_end(pos_) - pos_);
  }

  std::string_view trimmed_rest(std::size_t offset) const {
    std::string_view l = peek_line();
    if (offset > l.size()) return {};
    l = l.substr(offset);
    while (!l.empty() && (l.front() == ' ' || l.front() == '\t')) l.remove_prefix(1);
    return l;
  }

  void next_line() {
    pos_ = line_end(pos_);
    if (pos_ < src_.size()) advance();  // consume '\n'
  }

  // Positions the cursor at the first content line, skipping blanks and
  // whole-line comments.
  void skip_blank_lines() {
    while (!at_end()) {
      std::size_t p = pos_;
      std::size_t e = line_end(p);
      while (p < e && src_[p] == ' ') ++p;
      if (p < e && src_[p] == '\t') fail("tab characters are not allowed in indentation");
      if (p == e || src_[p] == '#') {
        pos_ = e;
        if (pos_ < src_.size()) advance();
        continue;
      }
      return;
    }
  }

  std::size_t current_indent() const {
    std::size_t p = pos_, n = 0;
    while (p < src_.size() && src_[p] == ' ') {
      ++p;
      ++n;
    }
    return n;
  }

  void reject_directives(std::string_view content) {
    if (content.empty()) return;
    switch (content.front()) {
      case '%': fail("directives are not supported");
      case '&': fail("anchors are not supported");
      case '*': fail("alias nodes are not supported");
      case '!': fail("tags are not supported");
      case '|':
      case '>': fail("block scalars are not supported");
      default: break;
    }
  }

  // --- block context ---

  Node parse_block_node(std::size_t indent) {
    skip_blank_lines();
    if (at_end() || current_indent() < indent) fail("expected a value");
    if (current_indent() > indent) indent = current_indent();
    pos_ += indent;
    return parse_block_node_here(indent);
  }

  // Parses a node whose first content character is at the cursor; `indent`
  // is the column of that character. Used both for normal lines and for
  // sequence items continuing after "- ".
  Node parse_block_node_here(std::size_t indent) {
    std::size_t start_line = line_;
    std::string_view rest = src_.substr(pos_, line_end(pos_) - pos_);
    reject_directives(rest);
    if (rest.empty()) fail("expected a value");
    if (rest.front() == '-' && (rest.size() == 1 || rest[1] == ' ')) {
      return parse_block_sequence(indent);
    }
    if (rest.front() == '{' || rest.front() == '[') {
      Node n = parse_flow_node();
      finish_line();
      return n;
    }
    // scalar or `key: value` mapping; decide by scanning for a key
    auto key = try_parse_key();
    if (key) return parse_block_mapping(indent, std::move(*key), start_line);
    Node s = parse_plain_or_quoted_to_eol();
    finish_line();
    return s;
  }

  // Attempts to read `key:` at the cursor (quoted or plain). On success the
  // cursor sits after the colon. Returns nullopt (cursor unchanged) if the
  // line is not a mapping entry.
  std::optional<std::string> try_parse_key() {
    std::size_t saved = pos_, saved_line = line_;
    std::string key;
    if (cur() == '"' || cur() == '\'') {
      key = parse_quoted();
      if (!at_end() && cur() == ':' &&
          (pos_ + 1 >= src_.size() || src_[pos_ + 1] == ' ' || src_[pos_ + 1] == '\n')) {
        advance();
        return key;
      }
      pos_ = saved;
      line_ = saved_line;
      return std::nullopt;
    }
    std::size_t e = line_end(pos_);
    std::size_t p = pos_;
    while (p < e) {
      if (src_[p] == ':' && (p + 1 >= e || src_[p + 1] == ' ')) {
        key.assign(src_.substr(pos_, p - pos_));
        while (!key.empty() && key.back() == ' ') key.pop_back();
        if (key.empty()) return std::nullopt;
        pos_ = p + 1;
        return key;
      }
      if (src_[p] == '#' && p > pos_ && src_[p - 1] == ' ') break;
      ++p;
    }
    return std::nullopt;
  }

  Node parse_block_mapping(std::size_t indent, std::string first_key, std::size_t start_line) {
    Node map;
    map.kind = Node::Kind::Mapping;
    map.line = start_line;
    std::string key = std::move(first_key);
    while (true) {
      map_insert(map, std::move(key), parse_mapping_value(indent));
      skip_blank_lines();
      if (at_end() || current_indent() != indent) break;
      std::size_t saved = pos_;
      pos_ += indent;
      std::string_view rest = src_.substr(pos_, line_end(pos_) - pos_);
      if (!rest.empty() && rest.front() == '-') {
        pos_ = saved;
        break;
      }
      auto k = try_parse_key();
      if (!k) fail("expected 'key:' at mapping indentation");
      key = std::move(*k);
    }
    return map;
  }

  // Parses the value after `key:`. Either inline on the same line, or a
  // nested block on the following deeper-indented lines, or null/empty.
  Node parse_mapping_value(std::size_t indent) {
    skip_inline_space();
    std::string_view rest = src_.substr(pos_, line_end(pos_) - pos_);
    if (!rest.empty() && rest.front() != '#') {
      reject_directives(rest);
      if (rest.front() == '{' || rest.front() == '[') {
        Node n = parse_flow_node();
        finish_line();
        return n;
      }
      Node s = parse_plain_or_quoted_to_eol();
      finish_line();
      return s;
    }
    next_line();
    skip_blank_lines();
    if (!at_end()) {
      std::size_t ci = current_indent();
      if (ci > indent) return parse_block_node(ci);
      // block sequences may sit at the key's own indentation
      if (ci == indent) {
        std::size_t p = pos_ + ci;
        if (p < src_.size() && src_[p] == '-' &&
            (p + 1 >= src_.size() || src_[p + 1] == ' ' || src_[p + 1] == '\n'))
          return parse_block_node(ci);
      }
    }
    return Node::make_scalar("", false, line_);  // empty value -> null scalar
  }

  Node parse_block_sequence(std::size_t indent) {
    Node seq;
    seq.kind = Node::Kind::Sequence;
    seq.line = line_;
    while (true) {
      advance();  // '-'
      if (!at_end() && cur() == ' ') {
        skip_inline_space();
        std::string_view rest = src_.substr(pos_, line_end(pos_) - pos_);
        if (!rest.empty() && rest.front() != '#') {
          std::size_t item_indent = pos_ - line_start_offset();
          seq.items.push_back(parse_block_node_here(item_indent));
        } else {
          next_line();
          seq.items.push_back(parse_block_node(indent + 1));
        }
      } else {
        // bare '-' with the value on following lines
        finish_line();
        seq.items.push_back(parse_block_node(indent + 1));
      }
      skip_blank_lines();
      if (at_end() || current_indent() != indent) break;
      std::size_t saved = pos_;
      pos_ += indent;
      if (at_end() || cur() != '-' || (pos_ + 1 < src_.size() && src_[pos_ + 1] != ' ' &&
                                       src_[pos_ + 1] != '\n')) {
        pos_ = saved;
        break;
      }
    }
    return seq;
  }

  std::size_t line_start_offset() const {
    std::size_t p = pos_;
    while (p > 0 && src_[p - 1] != '\n') --p;
    return p;
  }

  void skip_inline_space() {
    while (!at_end() && cur() == ' ') advance();
  }

  // Consumes trailing spaces and an optional comment, then the newline.
  void finish_line() {
    skip_inline_space();
    if (!at_end() && cur() != '\n') {
      if (cur() != '#') fail("unexpected trailing content");
    }
    next_line();
  }

  // --- scalars ---

  std::string parse_quoted() {
    char q = cur();
    advance();
    std::string out;
    while (true) {
      if (at_end() || cur() == '\n') fail("unterminated quoted string");
      char c = cur();
      if (q == '\'' && c == '\'') {
        advance();
        if (!at_end() && cur() == '\'') {
          out += '\'';
          advance();
          continue;
        }
        return out;
      }
      if (q == '"' && c == '"') {
        advance();
        return out;
      }
      if (q == '"' && c == '\\') {
        advance();
        if (at_end()) fail("unterminated escape");
        char e = cur();
        advance();
        switch (e) {
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '0': out += '\0'; break;
          default: fail(std::string("unsupported escape '\\") + e + "' in double-quoted string");
        }
        continue;
      }
      out += c;
      advance();
    }
  }

  Node parse_plain_or_quoted_to_eol() {
    std::size_t start_line = line_;
    if (cur() == '"' || cur() == '\'') {
      std::string s = parse_quoted();
      return Node::make_scalar(std::move(s), true, start_line);
    }
    std::size_t e = line_end(pos_);
    std::size_t p = pos_;
    std::size_t end = e;
    while (p < e) {
      if (src_[p] == '#' && p > pos_ && src_[p - 1] == ' ') {
        end = p;
        break;
      }
      ++p;
    }
    std::string text(src_.substr(pos_, end - pos_));
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.pop_back();
    pos_ = end;
    return Node::make_scalar(std::move(text), false, start_line);
  }

  // --- flow context (newlines act as spaces) ---

  void skip_flow_space() {
    while (!at_end()) {
      if (cur() == ' ' || cur() == '\n' || cur() == '\r' || cur() == '\t') {
        advance();
      } else if (cur() == '#') {
        while (!at_end() && cur() != '\n') advance();
      } else {
        return;
      }
    }
  }

  Node parse_flow_node() {
    skip_flow_space();
    if (at_end()) fail("unterminated flow collection");
    if (cur() == '{') return parse_flow_mapping();
    if (cur() == '[') return parse_flow_sequence();
    return parse_flow_scalar();
  }

  Node parse_flow_mapping() {
    Node map;
    map.kind = Node::Kind::Mapping;
    map.line = line_;
    advance();  // '{'
    skip_flow_space();
    if (!at_end() && cur() == '}') {
      advance();
      return map;
    }
    while (true) {
      skip_flow_space();
      Node key = parse_flow_scalar();
      skip_flow_space();
      if (at_end() || cur() != ':') fail("expected ':' in flow mapping");
      advance();
      Node value = parse_flow_node();
      map_insert(map, std::move(key.scalar), std::move(value));
      skip_flow_space();
      if (at_end()) fail("unterminated flow mapping");
      if (cur() == ',') {
        advance();
        continue;
      }
      if (cur() == '}') {
        advance();
        return map;
      }
      fail("expected ',' or '}' in flow mapping");
    }
  }

  Node parse_flow_sequence() {
    Node seq;
    seq.kind = Node::Kind::Sequence;
    seq.line = line_;
    advance();  // '['
    skip_flow_space();
    if (!at_end() && cur() == ']') {
      advance();
      return seq;
    }
    while (true) {
      Node item = parse_flow_node();
      skip_flow_space();
      // `key: value` inside a flow sequence forms a one-pair mapping
      if (!at_end() && cur() == ':' && item.is_scalar()) {
        advance();
        Node value = parse_flow_node();
        Node pair;
        pair.kind = Node::Kind::Mapping;
        pair.line = item.line;
        map_insert(pair, std::move(item.scalar), std::move(value));
        item = std::move(pair);
        skip_flow_space();
      }
      seq.items.push_back(std::move(item));
      if (at_end()) fail("unterminated flow sequence");
      if (cur() == ',') {
        advance();
        skip_flow_space();
        continue;
      }
      if (cur() == ']') {
        advance();
        return seq;
      }
      fail("expected ',' or ']' in flow sequence");
    }
  }

  Node parse_flow_scalar() {
    skip_flow_space();
    if (at_end()) fail("expected scalar");
    std::size_t start_line = line_;
    if (cur() == '"' || cur() == '\'') {
      std::string s = parse_quoted();
      return Node::make_scalar(std::move(s), true, start_line);
    }
    reject_directives(src_.substr(pos_, 1));
    std::string out;
    while (!at_end()) {
      char c = cur();
      if (c == ',' || c == '}' || c == ']' || c == '{' || c == '[' || c == '\n') break;
      if (c == ':') {
        char la = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\n';
        if (la == ' ' || la == ',' || la == '}' || la == ']' || la == '\n') break;
      }
      out += c;
      advance();
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    if (out.empty()) fail("expected scalar");
    return Node::make_scalar(std::move(out), false, start_line);
  }

  void map_insert(Node& map, std::string key, Node value) {
    if (map.find(key) != nullptr) fail("duplicate mapping key '" + key + "'");
    map.pairs.emplace_back(std::move(key), std::move(value));
  }
};

}  // namespace detail

inline Node parse(std::string_view text) { return detail::Parser(text).parse_document(); }

}  // namespace tfkit::yaml
