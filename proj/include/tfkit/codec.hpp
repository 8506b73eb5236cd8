#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "compiler.hpp"
#include "errors.hpp"
#include "value.hpp"

namespace tfkit {

namespace detail {

inline bool full_match(const std::regex& re, std::string_view s) {
  return std::regex_match(s.begin(), s.end(), re);
}

struct Slice {
  std::size_t pos = 0, len = 0;
};

inline std::vector<Slice> split_on(std::string_view text, std::string_view sep) {
  std::vector<Slice> out;
  std::size_t start = 0;
  while (true) {
    std::size_t at = text.find(sep, start);
    if (at == std::string_view::npos) {
      out.push_back({start, text.size() - start});
      return out;
    }
    out.push_back({start, at - start});
    start = at + sep.size();
  }
}

struct Codec {
  std::vector<std::string> path;

  [[noreturn]] void decode_fail(std::size_t position, std::string expected) {
    throw DecodeError(position, std::move(expected), path);
  }
  [[noreturn]] void encode_fail(EncodeErrorReason reason, std::string message) {
    throw EncodeError(reason, path, std::move(message));
  }

  struct Step {
    Codec& c;
    Step(Codec& codec, std::string name) : c(codec) { c.path.push_back(std::move(name)); }
    ~Step() { c.path.pop_back(); }
  };

  // ---- decoding ----

  Value decode(const CompiledNode& n, std::string_view text, std::size_t at) {
    if (n.empty_value && text.empty()) return *n.empty_value;
    if (n.as_string) {
      if (!full_match(n.matcher, text))
        decode_fail(at, "text matching the structure of " + n.label);
      return Value(text);
    }
    return std::visit([&](const auto& impl) { return decode_impl(impl, n, text, at); }, n.impl);
  }

  Value decode_impl(const CompiledNode::Constant& d, const CompiledNode&, std::string_view text,
                    std::size_t at) {
    if (text != d.repr) decode_fail(at, "the constant '" + d.repr + "'");
    return d.decoded;
  }

  Value decode_impl(const CompiledNode::Values& d, const CompiledNode&, std::string_view text,
                    std::size_t at) {
    for (const auto& e : d.entries)
      if (text == e.repr) return e.decoded;
    decode_fail(at, "one of the declared values");
  }

  Value decode_impl(const CompiledNode::Regexes& d, const CompiledNode&, std::string_view text,
                    std::size_t at) {
    for (const auto& e : d.entries) {
      if (full_match(e.re, text)) {
        if (e.decoded) return *e.decoded;
        return Value(text);
      }
    }
    decode_fail(at, d.entries.size() == 1 ? "text matching the pattern"
                                          : "text matching one of the patterns");
  }

  Value decode_impl(const CompiledNode::Integer& d, const CompiledNode&, std::string_view text,
                    std::size_t at) {
    std::size_t i = 0;
    if (d.is_signed && !text.empty() && (text[0] == '+' || text[0] == '-')) i = 1;
    if (i == text.size()) decode_fail(at, d.is_signed ? "an integer" : "an unsigned integer");
    for (std::size_t j = i; j < text.size(); ++j)
      if (text[j] < '0' || text[j] > '9')
        decode_fail(at + j, d.is_signed ? "an integer" : "an unsigned integer");
    std::string_view digits = text;
    if (!digits.empty() && digits[0] == '+') digits.remove_prefix(1);
    std::int64_t v = 0;
    auto r = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (r.ec != std::errc{}) decode_fail(at, "an integer within the 64-bit range");
    check_integer_range(d, v, at);
    return Value(v);
  }

  void check_integer_range(const CompiledNode::Integer& d, std::int64_t v, std::size_t at) {
    if (d.min && (d.min_excluded ? v <= *d.min : v < *d.min))
      decode_fail(at, "an integer " + std::string(d.min_excluded ? "> " : ">= ") +
                          std::to_string(*d.min));
    if (d.max && (d.max_excluded ? v >= *d.max : v > *d.max))
      decode_fail(at, "an integer " + std::string(d.max_excluded ? "< " : "<= ") +
                          std::to_string(*d.max));
  }

  static const std::regex& float_syntax() {
    static const std::regex re(R"([+-]?(?:[0-9]+(?:\.[0-9]+)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)");
    return re;
  }

  Value decode_impl(const CompiledNode::Float& d, const CompiledNode&, std::string_view text,
                    std::size_t at) {
    if (!full_match(float_syntax(), text)) decode_fail(at, "a floating point number");
    double v = std::strtod(std::string(text).c_str(), nullptr);
    if (!std::isfinite(v)) decode_fail(at, "a finite floating point number");
    if (d.min && (d.min_excluded ? v <= *d.min : v < *d.min))
      decode_fail(at, "a number " + std::string(d.min_excluded ? "> " : ">= ") +
                          format_float(*d.min));
    if (d.max && (d.max_excluded ? v >= *d.max : v > *d.max))
      decode_fail(at, "a number " + std::string(d.max_excluded ? "< " : "<= ") +
                          format_float(*d.max));
    return Value(v);
  }

  Value decode_impl(const CompiledNode::Str&, const CompiledNode&, std::string_view text,
                    std::size_t) {
    return Value(text);
  }

  Value decode_impl(const CompiledNode::List& d, const CompiledNode& n, std::string_view text,
                    std::size_t at) {
    std::string_view core = strip_enclosing(d.prefix, d.suffix, text, at, n.label);
    std::size_t core_at = at + d.prefix.size();
    if (core.empty() && d.min_count == 0) return Value(Value::Sequence{});

    std::vector<Slice> slices;
    if (!d.scan_mode) {
      slices = split_on(core, d.sep);
      if (slices.size() < d.min_count || (d.max_count && slices.size() > *d.max_count))
        decode_fail(core_at, count_phrase(d.min_count, d.max_count) + " elements");
    } else {
      auto found = scan_list(core, d);
      if (!found)
        decode_fail(core_at, count_phrase(d.min_count, d.max_count) +
                                 " elements matching the element definition");
      slices = std::move(*found);
    }

    Value::Sequence seq;
    for (std::size_t i = 0; i < slices.size(); ++i) {
      Step step(*this, "[" + std::to_string(i) + "]");
      seq.push_back(
          decode(*d.element, core.substr(slices[i].pos, slices[i].len), core_at + slices[i].pos));
    }
    return Value(std::move(seq));
  }

  Value decode_impl(const CompiledNode::Composed& d, const CompiledNode& n,
                    std::string_view text, std::size_t at) {
    std::string_view core = strip_enclosing(d.prefix, d.suffix, text, at, n.label);
    std::size_t core_at = at + d.prefix.size();

    std::vector<Slice> slices;
    if (!d.scan_mode) {
      auto pieces = split_on(core, d.sep);
      if (pieces.size() > d.parts.size())
        decode_fail(core_at, "at most " + std::to_string(d.parts.size()) + " parts");
      if (pieces.size() < d.required) {
        if (core.empty() && d.required == 0) {
          pieces.clear();
        } else {
          decode_fail(core_at, "at least " + std::to_string(d.required) + " parts ('" +
                                   d.parts[pieces.size()].name + "' missing)");
        }
      }
      if (core.empty() && d.required == 0) {
        // prefer a present-but-empty first part when it accepts ""
        if (!d.parts.empty() && full_match(d.parts[0].node->matcher, core))
          slices.push_back({0, 0});
      } else {
        slices = std::move(pieces);
      }
    } else {
      auto found = scan_composed(core, d);
      if (!found) decode_fail(core_at, "parts matching " + n.label);
      slices = std::move(*found);
    }

    Mapping out;
    for (std::size_t i = 0; i < slices.size(); ++i) {
      const auto& part = d.parts[i];
      Step step(*this, part.name);
      Value v = decode(*part.node, core.substr(slices[i].pos, slices[i].len),
                       core_at + slices[i].pos);
      if (!part.hidden_constant) out.insert(part.name, std::move(v));
    }
    for (const auto& [k, v] : n.implicit) out.insert(k, v);
    return Value(std::move(out));
  }

  Value decode_impl(const CompiledNode::Labeled& d, const CompiledNode& n, std::string_view text,
                    std::size_t at) {
    auto items = split_on(text, d.sep);
    std::vector<Value::Sequence> collected(d.labels.size());
    for (const auto& item : items) {
      std::string_view it = text.substr(item.pos, item.len);
      std::size_t isep = it.find(d.isep);
      if (isep == std::string_view::npos)
        decode_fail(at + item.pos, "'label" + d.isep + "value'");
      std::string_view label = it.substr(0, isep);
      std::string_view value = it.substr(isep + d.isep.size());
      std::size_t idx = d.labels.size();
      for (std::size_t i = 0; i < d.labels.size(); ++i)
        if (d.labels[i].first == label) {
          idx = i;
          break;
        }
      if (idx == d.labels.size())
        decode_fail(at + item.pos, "a declared label (got '" + std::string(label) + "')");
      if (!collected[idx].empty() && contains(d.single, label))
        decode_fail(at + item.pos, "label '" + std::string(label) + "' at most once");
      Step step(*this, std::string(label));
      collected[idx].push_back(
          decode(*d.labels[idx].second, value, at + item.pos + isep + d.isep.size()));
    }
    for (const auto& r : d.required) {
      bool present = false;
      for (std::size_t i = 0; i < d.labels.size(); ++i)
        if (d.labels[i].first == r && !collected[i].empty()) present = true;
      if (!present) decode_fail(at, "required label '" + r + "'");
    }
    Mapping out;
    for (std::size_t i = 0; i < d.labels.size(); ++i)
      if (!collected[i].empty()) out.insert(d.labels[i].first, Value(std::move(collected[i])));
    for (const auto& [k, v] : n.implicit) out.insert(k, v);
    return Value(std::move(out));
  }

  Value decode_impl(const CompiledNode::Tagged& d, const CompiledNode& n, std::string_view text,
                    std::size_t at) {
    auto items = split_on(text, d.sep);
    Mapping out;
    for (const auto& item : items) {
      std::string_view it = text.substr(item.pos, item.len);
      std::size_t s1 = it.find(d.isep);
      if (s1 == std::string_view::npos)
        decode_fail(at + item.pos, "'name" + d.isep + "typecode" + d.isep + "value'");
      std::size_t s2 = it.find(d.isep, s1 + d.isep.size());
      if (s2 == std::string_view::npos)
        decode_fail(at + item.pos + s1, "'typecode" + d.isep + "value'");
      std::string_view tag = it.substr(0, s1);
      std::string_view code = it.substr(s1 + d.isep.size(), s2 - s1 - d.isep.size());
      std::string_view value = it.substr(s2 + d.isep.size());
      if (!full_match(d.tag_re, tag))
        decode_fail(at + item.pos, "a tagname matching '" + d.tag_pattern + "'");
      const CompiledPtr* child = nullptr;
      for (const auto& [c, node] : d.codes)
        if (c == code) child = &node;
      if (child == nullptr)
        decode_fail(at + item.pos + s1 + d.isep.size(),
                    "a declared typecode (got '" + std::string(code) + "')");
      if (out.contains(tag))
        decode_fail(at + item.pos, "unique tagnames ('" + std::string(tag) + "' repeated)");
      Step step(*this, std::string(tag));
      Value decoded = decode(**child, value, at + item.pos + s2 + d.isep.size());
      Mapping wrapper;
      wrapper.insert("type", Value(code));
      wrapper.insert("value", std::move(decoded));
      out.insert(std::string(tag), Value(std::move(wrapper)));
    }
    for (const auto& [k, v] : n.implicit) out.insert(k, v);
    return Value(std::move(out));
  }

  Value decode_impl(const CompiledNode::Union& d, const CompiledNode&, std::string_view text,
                    std::size_t at) {
    std::optional<DecodeError> last;
    for (const auto& b : d.branches) {
      try {
        return decode(*b, text, at);
      } catch (const DecodeError& e) {
        last = e;
      }
    }
    decode_fail(last ? last->position() : at,
                "any of " + std::to_string(d.branches.size()) + " alternatives (last: " +
                    (last ? last->expected() : "none") + ")");
  }

  // ---- encoding ----

  std::string encode(const CompiledNode& n, const Value& v) {
    if (n.empty_value && values_equal(v, *n.empty_value)) return "";
    if (n.as_string) {
      if (!v.is_text())
        encode_fail(EncodeErrorReason::WrongType,
                    std::string("expected text for an as_string definition, got ") +
                        v.type_name());
      if (!full_match(n.matcher, v.as_text()))
        encode_fail(EncodeErrorReason::OutOfRange,
                    "text does not match the structure of " + n.label);
      return v.as_text();
    }
    return std::visit([&](const auto& impl) { return encode_impl(impl, n, v); }, n.impl);
  }

  const std::string* canonical_repr(const CompiledNode& n, const Value& v) const {
    for (const auto& c : n.canonical)
      if (values_equal(c.decoded, v)) return &c.repr;
    return nullptr;
  }

  std::string encode_impl(const CompiledNode::Constant& d, const CompiledNode&, const Value& v) {
    if (!values_equal(v, d.decoded))
      encode_fail(EncodeErrorReason::OutOfRange, "value does not equal the declared constant");
    return d.repr;
  }

  std::string encode_impl(const CompiledNode::Values& d, const CompiledNode& n, const Value& v) {
    if (const std::string* r = canonical_repr(n, v)) return *r;
    std::vector<const std::string*> reprs;
    for (const auto& e : d.entries) {
      if (!values_equal(e.decoded, v)) continue;
      bool seen = false;
      for (const auto* r : reprs) seen = seen || *r == e.repr;
      if (!seen) reprs.push_back(&e.repr);
    }
    if (reprs.empty())
      encode_fail(EncodeErrorReason::OutOfRange, "value is not among the declared values");
    if (reprs.size() > 1)
      encode_fail(EncodeErrorReason::NoCanonicalForm,
                  "several representations decode to this value");
    return *reprs.front();
  }

  std::string encode_impl(const CompiledNode::Regexes& d, const CompiledNode& n,
                          const Value& v) {
    if (const std::string* r = canonical_repr(n, v)) return *r;
    for (const auto& e : d.entries) {
      if (!e.decoded || !values_equal(*e.decoded, v)) continue;
      if (e.singleton) return *e.singleton;
      encode_fail(EncodeErrorReason::NoCanonicalForm,
                  "the matching pattern accepts several representations and no canonical "
                  "entry selects one");
    }
    if (v.is_text()) {
      for (const auto& e : d.entries)
        if (!e.decoded && full_match(e.re, v.as_text())) return v.as_text();
    }
    encode_fail(EncodeErrorReason::OutOfRange, "value has no representation");
  }

  std::string encode_impl(const CompiledNode::Integer& d, const CompiledNode&, const Value& v) {
    if (!v.is_integer())
      encode_fail(EncodeErrorReason::WrongType,
                  std::string("expected an integer, got ") + v.type_name());
    std::int64_t i = v.as_integer();
    if (!d.is_signed && i < 0)
      encode_fail(EncodeErrorReason::OutOfRange, "negative value for unsigned integer");
    if ((d.min && (d.min_excluded ? i <= *d.min : i < *d.min)) ||
        (d.max && (d.max_excluded ? i >= *d.max : i > *d.max)))
      encode_fail(EncodeErrorReason::OutOfRange, "integer outside the declared range");
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, i);
    return std::string(buf, r.ptr);
  }

  static std::string format_float(double d) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, d);
    std::string out(buf, r.ptr);
    if (out.find_first_of(".eE") == std::string::npos) out += ".0";
    return out;
  }

  std::string encode_impl(const CompiledNode::Float& d, const CompiledNode&, const Value& v) {
    if (!v.is_float())
      encode_fail(EncodeErrorReason::WrongType,
                  std::string("expected a float, got ") + v.type_name());
    double f = v.as_float();
    if (!std::isfinite(f))
      encode_fail(EncodeErrorReason::OutOfRange, "non-finite floats have no representation");
    if ((d.min && (d.min_excluded ? f <= *d.min : f < *d.min)) ||
        (d.max && (d.max_excluded ? f >= *d.max : f > *d.max)))
      encode_fail(EncodeErrorReason::OutOfRange, "float outside the declared range");
    return format_float(f);
  }

  std::string encode_impl(const CompiledNode::Str&, const CompiledNode&, const Value& v) {
    if (!v.is_text())
      encode_fail(EncodeErrorReason::WrongType,
                  std::string("expected text, got ") + v.type_name());
    return v.as_text();
  }

  void check_separator_free(const std::string& piece, const std::string& sep,
                            const char* what) {
    if (!sep.empty() && piece.find(sep) != std::string::npos)
      encode_fail(EncodeErrorReason::OutOfRange,
                  std::string("encoded ") + what + " contains the separator '" + sep +
                      "'; the representation would not split back");
  }

  std::string encode_impl(const CompiledNode::List& d, const CompiledNode&, const Value& v) {
    if (!v.is_sequence())
      encode_fail(EncodeErrorReason::WrongType,
                  std::string("expected a sequence, got ") + v.type_name());
    const auto& seq = v.as_sequence();
    if (seq.size() < d.min_count || (d.max_count && seq.size() > *d.max_count))
      encode_fail(EncodeErrorReason::OutOfRange,
                  count_phrase(d.min_count, d.max_count) + " elements required");
    std::string out = d.prefix;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      Step step(*this, "[" + std::to_string(i) + "]");
      std::string piece = encode(*d.element, seq[i]);
      if (!d.scan_mode) check_separator_free(piece, d.sep, "element");
      if (i) out += d.sep;
      out += piece;
    }
    out += d.suffix;
    return out;
  }

  std::string encode_impl(const CompiledNode::Composed& d, const CompiledNode& n,
                          const Value& v) {
    if (!v.is_mapping())
      encode_fail(EncodeErrorReason::WrongType,
                  std::string("expected a mapping, got ") + v.type_name());
    const auto& m = v.as_mapping();
    check_implicit(n, m);
    for (const auto& item : m.items()) {
      if (find_pair(n.implicit, item.key) != nullptr) continue;
      bool known = false;
      for (const auto& p : d.parts) known = known || (!p.hidden_constant && p.name == item.key);
      if (!known)
        encode_fail(EncodeErrorReason::UnknownLabel, "unexpected key '" + item.key + "'");
    }
    std::size_t last_present = 0;
    bool any = false;
    for (std::size_t i = 0; i < d.parts.size(); ++i) {
      if (!d.parts[i].hidden_constant && m.contains(d.parts[i].name)) {
        last_present = i + 1;
        any = true;
      }
    }
    (void)any;
    std::size_t emit = std::max(d.required, last_present);
    std::string out = d.prefix;
    for (std::size_t i = 0; i < emit; ++i) {
      const auto& part = d.parts[i];
      std::string piece;
      if (part.hidden_constant) {
        piece = std::get<CompiledNode::Constant>(part.node->impl).repr;
      } else if (const Value* pv = m.find(part.name)) {
        Step step(*this, part.name);
        piece = encode(*part.node, *pv);
      } else {
        encode_fail(EncodeErrorReason::MissingRequired,
                    "part '" + part.name + "' is missing but a later part is present");
      }
      if (!d.scan_mode) check_separator_free(piece, d.sep, "part");
      if (i) out += d.sep;
      out += piece;
    }
    out += d.suffix;
    return out;
  }

  std::string encode_impl(const CompiledNode::Labeled& d, const CompiledNode& n,
                          const Value& v) {
    if (!v.is_mapping())
      encode_fail(EncodeErrorReason::WrongType,
                  std::string("expected a mapping, got ") + v.type_name());
    const auto& m = v.as_mapping();
    check_implicit(n, m);
    for (const auto& item : m.items()) {
      if (find_pair(n.implicit, item.key) != nullptr) continue;
      bool known = false;
      for (const auto& [label, _] : d.labels) known = known || label == item.key;
      if (!known)
        encode_fail(EncodeErrorReason::UnknownLabel, "unknown label '" + item.key + "'");
    }
    std::vector<std::string> items;
    for (const auto& [label, child] : d.labels) {
      const Value* lv = m.find(label);
      if (lv == nullptr) continue;
      if (!lv->is_sequence())
        encode_fail(EncodeErrorReason::WrongType,
                    "label '" + label + "' must hold a sequence of values");
      const auto& seq = lv->as_sequence();
      if (seq.size() > 1 && contains(d.single, label))
        encode_fail(EncodeErrorReason::OutOfRange,
                    "label '" + label + "' is declared single but appears " +
                        std::to_string(seq.size()) + " times");
      for (const auto& elem : seq) {
        Step step(*this, label);
        std::string item = label + d.isep + encode(*child, elem);
        check_separator_free(item, d.sep, "item");
        items.push_back(std::move(item));
      }
    }
    for (const auto& r : d.required) {
      const Value* lv = m.find(r);
      if (lv == nullptr || (lv->is_sequence() && lv->as_sequence().empty()))
        encode_fail(EncodeErrorReason::MissingRequired, "required label '" + r + "' is absent");
    }
    if (items.empty())
      encode_fail(EncodeErrorReason::OutOfRange, "a labeled list needs at least one item");
    return join(items, d.sep);
  }

  std::string encode_impl(const CompiledNode::Tagged& d, const CompiledNode& n, const Value& v) {
    if (!v.is_mapping())
      encode_fail(EncodeErrorReason::WrongType,
                  std::string("expected a mapping, got ") + v.type_name());
    const auto& m = v.as_mapping();
    check_implicit(n, m);
    std::vector<std::string> items;
    for (const auto& item : m.items()) {
      if (find_pair(n.implicit, item.key) != nullptr) continue;
      if (!full_match(d.tag_re, item.key))
        encode_fail(EncodeErrorReason::UnknownLabel,
                    "'" + item.key + "' is not a valid tagname");
      if (!item.value.is_mapping())
        encode_fail(EncodeErrorReason::WrongType,
                    "tag '" + item.key + "' must hold a {type, value} mapping");
      const auto& wrapper = item.value.as_mapping();
      const Value* type = wrapper.find("type");
      const Value* inner = wrapper.find("value");
      if (wrapper.size() != 2 || type == nullptr || inner == nullptr || !type->is_text())
        encode_fail(EncodeErrorReason::WrongType,
                    "tag '" + item.key + "' must hold a {type, value} mapping");
      const CompiledPtr* child = nullptr;
      for (const auto& [code, node] : d.codes)
        if (code == type->as_text()) child = &node;
      if (child == nullptr)
        encode_fail(EncodeErrorReason::UnknownLabel,
                    "unknown typecode '" + type->as_text() + "'");
      Step step(*this, item.key);
      std::string text =
          item.key + d.isep + type->as_text() + d.isep + encode(**child, *inner);
      check_separator_free(text, d.sep, "item");
      items.push_back(std::move(text));
    }
    if (items.empty())
      encode_fail(EncodeErrorReason::OutOfRange, "a tagged list needs at least one item");
    return join(items, d.sep);
  }

  std::string encode_impl(const CompiledNode::Union& d, const CompiledNode&, const Value& v) {
    std::optional<EncodeError> last;
    for (const auto& b : d.branches) {
      try {
        return encode(*b, v);
      } catch (const EncodeError& e) {
        last = e;
      }
    }
    encode_fail(last ? last->reason() : EncodeErrorReason::WrongType,
                "no alternative accepts the value (last: " +
                    (last ? last->message() : std::string("none")) + ")");
  }

  // ---- shared helpers ----

  void check_implicit(const CompiledNode& n, const Mapping& m) {
    for (const auto& [key, val] : n.implicit) {
      const Value* present = m.find(key);
      if (present == nullptr)
        encode_fail(EncodeErrorReason::ImplicitMismatch,
                    "implicit key '" + key + "' is missing");
      if (!values_equal(*present, val))
        encode_fail(EncodeErrorReason::ImplicitMismatch,
                    "implicit key '" + key + "' has a different value");
    }
  }

  static const Value* find_pair(const std::vector<std::pair<std::string, Value>>& pairs,
                                std::string_view key) {
    for (const auto& [k, v] : pairs)
      if (k == key) return &v;
    return nullptr;
  }

  static bool contains(const std::vector<std::string>& v, std::string_view s) {
    for (const auto& x : v)
      if (x == s) return true;
    return false;
  }

  static std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += sep;
      out += items[i];
    }
    return out;
  }

  static std::string count_phrase(std::size_t min, std::optional<std::size_t> max) {
    if (max && *max == min) return "exactly " + std::to_string(min);
    if (max) return "between " + std::to_string(min) + " and " + std::to_string(*max);
    return "at least " + std::to_string(min);
  }

  std::string_view strip_enclosing(const std::string& prefix, const std::string& suffix,
                                   std::string_view text, std::size_t at,
                                   const std::string& label) {
    if (text.size() < prefix.size() + suffix.size() ||
        text.substr(0, prefix.size()) != prefix)
      decode_fail(at, prefix.empty() ? "the structure of " + label
                                     : "the prefix '" + prefix + "'");
    if (text.substr(text.size() - suffix.size()) != suffix)
      decode_fail(at + text.size() - suffix.size(), "the suffix '" + suffix + "'");
    return text.substr(prefix.size(), text.size() - prefix.size() - suffix.size());
  }

  // Left-to-right scan for separator-mode lists: at each step the longest
  // element-pattern match followed by the separator or the end of input is
  // tried first, backtracking on failure.
  std::optional<std::vector<Slice>> scan_list(std::string_view core,
                                              const CompiledNode::List& d) {
    const std::size_t n = core.size();
    std::vector<std::size_t> occ;
    if (!d.sep.empty())
      for (std::size_t i = 0; i + d.sep.size() <= n; ++i)
        if (core.compare(i, d.sep.size(), d.sep) == 0) occ.push_back(i);

    std::vector<Slice> slices;
    std::set<std::pair<std::size_t, std::size_t>> failed;

    auto rec = [&](auto&& self, std::size_t pos, std::size_t count) -> bool {
      if (failed.count({pos, count})) return false;
      if (d.max_count && count == *d.max_count) return false;
      std::vector<std::size_t> ends;
      ends.push_back(n);
      if (!d.sep.empty()) {
        for (auto it = occ.rbegin(); it != occ.rend(); ++it)
          if (*it >= pos && *it != n) ends.push_back(*it);
      } else {
        for (std::size_t e = n; e-- > pos + 1;) ends.push_back(e);
      }
      for (std::size_t e : ends) {
        // zero-length elements would not advance a separator-less scan
        if (e == pos && d.sep.empty() && n != 0) continue;
        if (!full_match(d.element->matcher, core.substr(pos, e - pos))) continue;
        if (e == n) {
          if (count + 1 < d.min_count) continue;
          slices.push_back({pos, e - pos});
          return true;
        }
        slices.push_back({pos, e - pos});
        if (self(self, e + d.sep.size(), count + 1)) return true;
        slices.pop_back();
      }
      failed.insert({pos, count});
      return false;
    };

    if (rec(rec, 0, 0)) return slices;
    return std::nullopt;
  }

  // Same backtracking scheme for composed_of parts without splitted_by:
  // each part takes the longest slice its pattern accepts, parts beyond
  // `required` may be absent at the end of input.
  std::optional<std::vector<Slice>> scan_composed(std::string_view core,
                                                  const CompiledNode::Composed& d) {
    const std::size_t n = core.size();
    std::vector<Slice> slices;
    std::set<std::pair<std::size_t, std::size_t>> failed;

    auto rec = [&](auto&& self, std::size_t i, std::size_t pos) -> bool {
      if (i == d.parts.size()) return pos == n;
      if (failed.count({i, pos})) return false;
      for (std::size_t e = n + 1; e-- > pos;) {
        if (!full_match(d.parts[i].node->matcher, core.substr(pos, e - pos))) continue;
        slices.push_back({pos, e - pos});
        if (e == n && i + 1 >= d.required) return true;  // trailing parts absent
        if (i + 1 < d.parts.size()) {
          if (d.sep.empty()) {
            if (self(self, i + 1, e)) return true;
          } else if (core.compare(e, d.sep.size(), d.sep) == 0) {
            if (self(self, i + 1, e + d.sep.size())) return true;
          }
        }
        slices.pop_back();
      }
      if (pos == n && i >= d.required && i == 0) return true;  // no parts at all
      failed.insert({i, pos});
      return false;
    };

    if (rec(rec, 0, 0)) return slices;
    return std::nullopt;
  }
};

}  // namespace detail

// Decodes `text` against the compiled definition, producing its structured
// value. The `empty` option wins over everything else; `as_string`
// definitions validate but keep the raw text.
inline Value decode(const CompiledDef& c, std::string_view text) {
  detail::Codec codec;
  codec.path.push_back(c.datatype);
  return codec.decode(*c.root, text, 0);
}

// Encodes a structured value back to text. Values with several valid
// representations use the canonical one.
inline std::string encode(const CompiledDef& c, const Value& v) {
  detail::Codec codec;
  codec.path.push_back(c.datatype);
  return codec.encode(*c.root, v);
}

inline bool is_valid_text(const CompiledDef& c, std::string_view text) {
  try {
    decode(c, text);
    return true;
  } catch (const DecodeError&) {
    return false;
  }
}

inline bool is_valid_value(const CompiledDef& c, const Value& v) {
  try {
    encode(c, v);
    return true;
  } catch (const EncodeError&) {
    return false;
  }
}

}  // namespace tfkit
