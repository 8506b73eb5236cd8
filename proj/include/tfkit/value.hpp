#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace tfkit {

class Value;
struct MapItem;

// Insertion-ordered association of text keys to values. Keys are unique;
// the order is preserved because composed_of decoding and JSON output
// depend on it.
class Mapping {
public:
  Mapping() = default;
  Mapping(std::initializer_list<std::pair<std::string, Value>> init);

  // Returns false (and leaves the mapping unchanged) on a duplicate key.
  bool insert(std::string key, Value value);
  const Value* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  std::size_t size() const;
  bool empty() const;
  const std::vector<MapItem>& items() const { return items_; }

private:
  std::vector<MapItem> items_;
};

// The decoded value universe: null, boolean, 64-bit integer, 64-bit float,
// text, sequence, mapping. Integer and Float are distinct alternatives and
// never compare equal. Values are immutable in spirit: the engine never
// mutates one after construction, so they are safe to share across threads.
class Value {
public:
  using Sequence = std::vector<Value>;

  Value() : v_(std::monostate{}) {}
  Value(bool b) : v_(b) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(long i) : v_(static_cast<std::int64_t>(i)) {}
  Value(long long i) : v_(static_cast<std::int64_t>(i)) {}
  Value(double d) : v_(d) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(std::string_view s) : v_(std::string(s)) {}
  Value(Sequence s) : v_(std::move(s)) {}
  Value(Mapping m) : v_(std::move(m)) {}

  static Value null() { return Value(); }

  bool is_null() const { return std::holds_alternative<std::monostate>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_float() const { return std::holds_alternative<double>(v_); }
  bool is_text() const { return std::holds_alternative<std::string>(v_); }
  bool is_sequence() const { return std::holds_alternative<Sequence>(v_); }
  bool is_mapping() const { return std::holds_alternative<Mapping>(v_); }

  bool as_bool() const { return std::get<bool>(v_); }
  std::int64_t as_integer() const { return std::get<std::int64_t>(v_); }
  double as_float() const { return std::get<double>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }
  const Sequence& as_sequence() const { return std::get<Sequence>(v_); }
  const Mapping& as_mapping() const { return std::get<Mapping>(v_); }

  std::size_t alternative_index() const { return v_.index(); }

  const char* type_name() const {
    switch (v_.index()) {
      case 0: return "null";
      case 1: return "boolean";
      case 2: return "integer";
      case 3: return "float";
      case 4: return "text";
      case 5: return "sequence";
      case 6: return "mapping";
    }
    return "?";
  }

private:
  std::variant<std::monostate, bool, std::int64_t, double, std::string, Sequence, Mapping> v_;
};

struct MapItem {
  std::string key;
  Value value;
};

inline Mapping::Mapping(std::initializer_list<std::pair<std::string, Value>> init) {
  for (const auto& [k, v] : init) insert(k, v);
}

inline bool Mapping::insert(std::string key, Value value) {
  if (find(key) != nullptr) return false;
  items_.push_back(MapItem{std::move(key), std::move(value)});
  return true;
}

inline const Value* Mapping::find(std::string_view key) const {
  for (const auto& it : items_)
    if (it.key == key) return &it.value;
  return nullptr;
}

inline std::size_t Mapping::size() const { return items_.size(); }
inline bool Mapping::empty() const { return items_.empty(); }

// Deep structural equality. Integer(n) and Float(x) are never equal, even
// when numerically identical. Sequences respect order; mappings ignore key
// order. NaN compares unequal to everything, including itself.
inline bool values_equal(const Value& a, const Value& b) {
  if (a.alternative_index() != b.alternative_index()) return false;
  if (a.is_null()) return true;
  if (a.is_bool()) return a.as_bool() == b.as_bool();
  if (a.is_integer()) return a.as_integer() == b.as_integer();
  if (a.is_float()) return a.as_float() == b.as_float();
  if (a.is_text()) return a.as_text() == b.as_text();
  if (a.is_sequence()) {
    const auto& sa = a.as_sequence();
    const auto& sb = b.as_sequence();
    if (sa.size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i)
      if (!values_equal(sa[i], sb[i])) return false;
    return true;
  }
  const auto& ma = a.as_mapping();
  const auto& mb = b.as_mapping();
  if (ma.size() != mb.size()) return false;
  for (const auto& it : ma.items()) {
    const Value* other = mb.find(it.key);
    if (other == nullptr || !values_equal(it.value, *other)) return false;
  }
  return true;
}

inline bool operator==(const Value& a, const Value& b) { return values_equal(a, b); }
inline bool operator!=(const Value& a, const Value& b) { return !values_equal(a, b); }

namespace detail {

inline void write_json_string(std::string& out, std::string_view s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

inline void write_json_integer(std::string& out, std::int64_t i) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, i);
  out.append(buf, r.ptr);
}

// Shortest decimal that parses back to the same double, with a fraction or
// exponent forced so the text re-reads as a float rather than an integer.
inline void write_json_float(std::string& out, double d) {
  if (!std::isfinite(d)) {
    out += "null";
    return;
  }
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, d);
  std::string_view s(buf, static_cast<std::size_t>(r.ptr - buf));
  out += s;
  if (s.find_first_of(".eE") == std::string_view::npos) out += ".0";
}

inline void write_json(std::string& out, const Value& v, bool pretty, int depth) {
  auto newline_indent = [&](int d) {
    out += '\n';
    out.append(static_cast<std::size_t>(d) * 2, ' ');
  };
  if (v.is_null()) {
    out += "null";
  } else if (v.is_bool()) {
    out += v.as_bool() ? "true" : "false";
  } else if (v.is_integer()) {
    write_json_integer(out, v.as_integer());
  } else if (v.is_float()) {
    write_json_float(out, v.as_float());
  } else if (v.is_text()) {
    write_json_string(out, v.as_text());
  } else if (v.is_sequence()) {
    const auto& seq = v.as_sequence();
    if (seq.empty()) {
      out += "[]";
      return;
    }
    out += '[';
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) out += ',';
      if (pretty) newline_indent(depth + 1);
      write_json(out, seq[i], pretty, depth + 1);
    }
    if (pretty) newline_indent(depth);
    out += ']';
  } else {
    const auto& map = v.as_mapping();
    if (map.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    for (const auto& it : map.items()) {
      if (!first) out += ',';
      first = false;
      if (pretty) newline_indent(depth + 1);
      write_json_string(out, it.key);
      out += ':';
      if (pretty) out += ' ';
      write_json(out, it.value, pretty, depth + 1);
    }
    if (pretty) newline_indent(depth);
    out += '}';
  }
}

// SAX handler that builds a Value tree. Numbers without fraction or
// exponent become Integer; anything else becomes Float. Integer literals
// outside the signed 64-bit range are an overflow error.
class ValueSax {
public:
  Value result;

  bool null() { return emit(Value()); }
  bool boolean(bool b) { return emit(Value(b)); }
  bool number_integer(std::int64_t i) { return emit(Value(i)); }

  bool number_unsigned(std::uint64_t u) {
    if (u > static_cast<std::uint64_t>(INT64_MAX)) {
      error_ = JsonError(JsonErrorKind::Overflow,
                         "integer literal exceeds signed 64-bit range");
      return false;
    }
    return emit(Value(static_cast<std::int64_t>(u)));
  }

  bool number_float(double d, const std::string& raw) {
    if (raw.find_first_of(".eE") == std::string::npos) {
      // the lexer fell back to float because the integer literal overflowed
      error_ = JsonError(JsonErrorKind::Overflow,
                         "integer literal exceeds signed 64-bit range");
      return false;
    }
    if (!std::isfinite(d)) {
      error_ = JsonError(JsonErrorKind::Overflow, "float literal out of range");
      return false;
    }
    return emit(Value(d));
  }

  bool string(std::string& s) { return emit(Value(s)); }
  bool binary(nlohmann::json::binary_t&) {
    error_ = JsonError(JsonErrorKind::Syntax, "binary values not supported");
    return false;
  }

  bool start_object(std::size_t) {
    stack_.push_back(Frame{Mapping{}, {}, {}, true});
    return true;
  }
  bool key(std::string& k) {
    stack_.back().pending_key = k;
    return true;
  }
  bool end_object() {
    Frame f = std::move(stack_.back());
    stack_.pop_back();
    return emit(Value(std::move(f.map)));
  }
  bool start_array(std::size_t) {
    stack_.push_back(Frame{{}, Value::Sequence{}, {}, false});
    return true;
  }
  bool end_array() {
    Frame f = std::move(stack_.back());
    stack_.pop_back();
    return emit(Value(std::move(f.seq)));
  }

  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::json::exception& ex) {
    if (!error_)
      error_ = JsonError(JsonErrorKind::Syntax,
                         "JSON syntax error at byte " + std::to_string(position) + ": " +
                             ex.what());
    return false;
  }

  void throw_if_failed() const {
    if (error_) throw *error_;
  }

private:
  struct Frame {
    Mapping map;
    Value::Sequence seq;
    std::string pending_key;
    bool is_object;
  };

  bool emit(Value v) {
    if (stack_.empty()) {
      result = std::move(v);
      return true;
    }
    Frame& f = stack_.back();
    if (f.is_object) {
      if (!f.map.insert(std::move(f.pending_key), std::move(v))) {
        error_ = JsonError(JsonErrorKind::Syntax, "duplicate object key");
        return false;
      }
    } else {
      f.seq.push_back(std::move(v));
    }
    return true;
  }

  std::vector<Frame> stack_;
  std::optional<JsonError> error_;
};

}  // namespace detail

inline std::string value_to_json_text(const Value& v, bool pretty = false) {
  std::string out;
  detail::write_json(out, v, pretty, 0);
  return out;
}

inline Value json_text_to_value(std::string_view text) {
  detail::ValueSax sax;
  bool ok = nlohmann::json::sax_parse(text, &sax);
  sax.throw_if_failed();
  if (!ok) throw JsonError(JsonErrorKind::Syntax, "invalid JSON document");
  return std::move(sax.result);
}

}  // namespace tfkit
