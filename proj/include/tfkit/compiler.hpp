#pragma once

#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "definition.hpp"
#include "errors.hpp"
#include "loader.hpp"
#include "pattern.hpp"
#include "value.hpp"

namespace tfkit {

struct CompiledNode;
using CompiledPtr = std::shared_ptr<const CompiledNode>;

// A definition lowered to matchable form: per-kind payloads with compiled
// sub-patterns, plus the node's own pattern (unanchored text, safe to embed
// in a concatenation; the empty alternative is included when `empty` is
// set) and its full-match regex.
struct CompiledNode {
  struct Constant {
    std::string repr;
    Value decoded;
  };
  struct Values {
    std::vector<ValuesEntry> entries;
  };
  struct RegexAlt {
    std::string pattern;  // normalized source, anchors stripped
    std::regex re;
    std::optional<Value> decoded;
    std::optional<std::string> singleton;  // the single member, if the language has one
    rx::Node ast;                          // for sampling in tests and tools
  };
  struct Regexes {
    std::vector<RegexAlt> entries;
  };
  struct Integer {
    std::optional<std::int64_t> min, max;
    bool min_excluded = false, max_excluded = false;
    bool is_signed = true;
  };
  struct Float {
    std::optional<double> min, max;
    bool min_excluded = false, max_excluded = false;
  };
  struct Str {};
  struct List {
    CompiledPtr element;
    bool scan_mode = false;  // separator may occur inside elements
    std::string sep;         // empty: elements are directly concatenated
    std::string prefix, suffix;
    std::size_t min_count = 1;
    std::optional<std::size_t> max_count;
  };
  struct Composed {
    struct Part {
      std::string name;
      CompiledPtr node;
      bool hidden_constant = false;
    };
    std::vector<Part> parts;
    bool scan_mode = false;
    std::string sep;
    std::string prefix, suffix;
    std::size_t required = 0;  // leading mandatory parts
  };
  struct Labeled {
    std::vector<std::pair<std::string, CompiledPtr>> labels;
    std::string sep, isep;
    std::vector<std::string> single, required;
  };
  struct Tagged {
    std::vector<std::pair<std::string, CompiledPtr>> codes;
    std::string tag_pattern;
    std::regex tag_re;
    rx::Node tag_ast;
    std::string sep, isep;
  };
  struct Union {
    std::vector<CompiledPtr> branches;
  };

  std::variant<Constant, Values, Regexes, Integer, Float, Str, List, Composed, Labeled, Tagged,
               Union>
      impl;

  std::optional<Value> empty_value;
  bool as_string = false;
  std::vector<ValuesEntry> canonical;
  std::vector<std::pair<std::string, Value>> implicit;

  std::string label;    // datatype name or kind tag, for error paths
  std::string pattern;  // unanchored; empty alternative included
  std::regex matcher;   // full-match semantics via std::regex_match
};

// Compiled form of one named datatype. `whole_pattern` is anchored at both
// ends and matches the definition's textual language; numeric range
// bounds, labeled-list single/required constraints and tagged-list
// duplicate-name rejection are enforced by the codec on top of it.
struct CompiledDef {
  std::string datatype;
  std::string whole_pattern;
  CompiledPtr root;
  DefPtr source;
};

namespace detail {

inline std::string repetition_suffix(std::size_t min, std::optional<std::size_t> max) {
  if (!max) {
    if (min == 0) return "*";
    if (min == 1) return "+";
    return "{" + std::to_string(min) + ",}";
  }
  if (*max == min) {
    if (min == 1) return "";
    return "{" + std::to_string(min) + "}";
  }
  if (min == 0 && *max == 1) return "?";
  return "{" + std::to_string(min) + "," + std::to_string(*max) + "}";
}

// Longer literals are alternated before any entry that is a proper prefix
// of them, so that element-level scans prefer "III" over "I". Entry order
// is otherwise preserved.
inline std::vector<std::string> prefix_ordered_reprs(const std::vector<ValuesEntry>& entries) {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    auto at = out.end();
    for (auto it = out.begin(); it != out.end(); ++it) {
      if (e.repr.size() > it->size() && e.repr.compare(0, it->size(), *it) == 0) {
        at = it;
        break;
      }
    }
    out.insert(at, e.repr);
  }
  return out;
}

class Compiler {
public:
  explicit Compiler(const Spec& spec) : spec_(spec) {}

  CompiledPtr compile_ref(const DefRef& ref) {
    if (ref.is_named()) {
      if (auto it = memo_.find(ref.name); it != memo_.end()) return it->second;
      CompiledPtr c = compile_def(*resolve(spec_, ref), ref.name);
      memo_.emplace(ref.name, c);
      return c;
    }
    return compile_def(*ref.def, {});
  }

  CompiledPtr compile_def(const Definition& def, std::string name) {
    auto node = std::make_shared<CompiledNode>();
    node->empty_value = def.options.empty;
    node->as_string = def.options.as_string;
    node->canonical = def.options.canonical;
    node->implicit = def.options.implicit;
    node->label = name.empty() ? std::string(kind_of(def)) : std::move(name);

    std::string base = std::visit([&](const auto& n) { return build(*node, n); }, def.node);
    node->pattern = def.options.empty ? "(?:" + base + "|)" : std::move(base);
    try {
      node->matcher = std::regex(node->pattern);
    } catch (const std::regex_error& e) {
      throw SpecError(SpecErrorKind::BadRegex, {"datatypes", node->label},
                      std::string("pattern rejected by the regex engine: ") + e.what());
    }
    return node;
  }

private:
  const Spec& spec_;
  std::map<std::string, CompiledPtr> memo_;

  std::string build(CompiledNode& node, const ConstantDef& d) {
    node.impl = CompiledNode::Constant{d.repr, d.decoded};
    return rx::escape_literal(d.repr);
  }

  std::string build(CompiledNode& node, const ValuesDef& d) {
    node.impl = CompiledNode::Values{d.entries};
    std::string alt;
    for (const auto& repr : prefix_ordered_reprs(d.entries)) {
      if (!alt.empty()) alt += '|';
      alt += rx::escape_literal(repr);
    }
    return "(?:" + alt + ")";
  }

  std::string build(CompiledNode& node, const RegexDef& d) {
    return build_regexes(node, {d.entry});
  }

  std::string build(CompiledNode& node, const RegexesDef& d) {
    return build_regexes(node, d.entries);
  }

  std::string build_regexes(CompiledNode& node, const std::vector<RegexEntry>& entries) {
    CompiledNode::Regexes impl;
    std::string alt;
    for (const auto& e : entries) {
      rx::Pattern p;
      try {
        p = rx::parse_pattern(e.pattern);
      } catch (const rx::PatternError& err) {
        throw SpecError(SpecErrorKind::BadRegex, {"datatypes", node.label},
                        std::string(err.what()));
      }
      CompiledNode::RegexAlt alt_entry;
      alt_entry.pattern = p.normalized;
      alt_entry.re = std::regex(p.normalized);
      alt_entry.decoded = e.decoded;
      alt_entry.singleton = rx::singleton_string(p.root);
      alt_entry.ast = p.root;
      if (!alt.empty()) alt += '|';
      alt += "(?:" + p.normalized + ")";
      impl.entries.push_back(std::move(alt_entry));
    }
    node.impl = std::move(impl);
    return "(?:" + alt + ")";
  }

  std::string build(CompiledNode& node, const IntegerDef& d) {
    node.impl = CompiledNode::Integer{d.min, d.max, d.min_excluded, d.max_excluded, d.is_signed};
    return d.is_signed ? "[+-]?[0-9]+" : "[0-9]+";
  }

  std::string build(CompiledNode& node, const FloatDef& d) {
    node.impl = CompiledNode::Float{d.min, d.max, d.min_excluded, d.max_excluded};
    return R"([+-]?(?:[0-9]+(?:\.[0-9]+)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)";
  }

  std::string build(CompiledNode& node, const StringDef&) {
    node.impl = CompiledNode::Str{};
    return R"([\s\S]*)";
  }

  std::string build(CompiledNode& node, const ListOfDef& d) {
    CompiledNode::List impl;
    impl.element = compile_ref(d.element);
    impl.scan_mode = !d.splitted_by.has_value();
    impl.sep = d.splitted_by ? *d.splitted_by : d.separator.value_or("");
    impl.prefix = d.prefix;
    impl.suffix = d.suffix;
    if (d.length) {
      impl.min_count = *d.length;
      impl.max_count = *d.length;
    } else {
      if (d.min_length) {
        impl.min_count = *d.min_length;
      } else {
        // with both enclosing strings present the empty list is
        // recognizable, so it is allowed by default
        impl.min_count = (!d.prefix.empty() && !d.suffix.empty()) ? 0 : 1;
      }
      impl.max_count = d.max_length;
    }

    const std::string& elem = impl.element->pattern;
    std::string joiner = rx::escape_literal(impl.sep);
    std::string core;
    if (impl.max_count && *impl.max_count == 0) {
      core = "";
    } else if (impl.sep.empty()) {
      core = "(?:" + elem + ")" + repetition_suffix(impl.min_count, impl.max_count);
    } else {
      std::size_t m = impl.min_count;
      std::optional<std::size_t> rep_max;
      if (impl.max_count) rep_max = *impl.max_count - 1;
      std::string chain =
          elem + "(?:" + joiner + elem + ")" + repetition_suffix(m > 0 ? m - 1 : 0, rep_max);
      core = m == 0 ? "(?:" + chain + ")?" : chain;
    }
    std::string out = rx::escape_literal(d.prefix) + core + rx::escape_literal(d.suffix);
    node.impl = std::move(impl);
    return out;
  }

  std::string build(CompiledNode& node, const ComposedOfDef& d) {
    CompiledNode::Composed impl;
    impl.scan_mode = !d.splitted_by.has_value();
    impl.sep = d.splitted_by ? *d.splitted_by : d.separator.value_or("");
    impl.prefix = d.prefix;
    impl.suffix = d.suffix;
    impl.required = d.required.value_or(d.parts.size());
    for (const auto& p : d.parts) {
      CompiledNode::Composed::Part part;
      part.name = p.name;
      part.node = compile_ref(p.element);
      part.hidden_constant =
          d.hide_constants && std::holds_alternative<CompiledNode::Constant>(part.node->impl);
      impl.parts.push_back(std::move(part));
    }

    std::string joiner = rx::escape_literal(impl.sep);
    std::string head;
    for (std::size_t i = 0; i < impl.required; ++i) {
      if (i) head += joiner;
      head += impl.parts[i].node->pattern;
    }
    std::string tail;
    for (std::size_t i = impl.parts.size(); i-- > impl.required;) {
      std::string piece = (i > 0 ? joiner : "") + impl.parts[i].node->pattern;
      tail = "(?:" + piece + tail + ")?";
    }
    std::string out = rx::escape_literal(d.prefix) + head + tail + rx::escape_literal(d.suffix);
    node.impl = std::move(impl);
    return out;
  }

  std::string build(CompiledNode& node, const LabeledListDef& d) {
    if (!d.splitted_by || d.splitted_by->empty() || d.internal_separator.empty())
      throw SpecError(SpecErrorKind::BadOptionCombination, {"datatypes", node.label},
                      "labeled_list requires a non-empty splitted_by and internal separator");
    CompiledNode::Labeled impl;
    impl.sep = *d.splitted_by;
    impl.isep = d.internal_separator;
    impl.single = d.single;
    impl.required = d.required;
    std::string alt;
    for (const auto& [label, ref] : d.labels) {
      CompiledPtr child = compile_ref(ref);
      if (!alt.empty()) alt += '|';
      alt += rx::escape_literal(label) + rx::escape_literal(impl.isep) + child->pattern;
      impl.labels.emplace_back(label, std::move(child));
    }
    std::string item = "(?:" + alt + ")";
    std::string core = item + "(?:" + rx::escape_literal(impl.sep) + item + ")*";
    node.impl = std::move(impl);
    return core;
  }

  std::string build(CompiledNode& node, const TaggedListDef& d) {
    if (!d.splitted_by || d.splitted_by->empty() || d.internal_separator.empty())
      throw SpecError(SpecErrorKind::BadOptionCombination, {"datatypes", node.label},
                      "tagged_list requires a non-empty splitted_by and internal separator");
    CompiledNode::Tagged impl;
    impl.sep = *d.splitted_by;
    impl.isep = d.internal_separator;
    rx::Pattern tag;
    try {
      tag = rx::parse_pattern(d.tagname);
    } catch (const rx::PatternError& err) {
      throw SpecError(SpecErrorKind::BadRegex, {"datatypes", node.label, "tagname"},
                      std::string(err.what()));
    }
    impl.tag_pattern = tag.normalized;
    impl.tag_re = std::regex(tag.normalized);
    impl.tag_ast = tag.root;
    std::string isep = rx::escape_literal(impl.isep);
    std::string alt;
    for (const auto& [code, ref] : d.typecodes) {
      CompiledPtr child = compile_ref(ref);
      if (!alt.empty()) alt += '|';
      alt += "(?:" + impl.tag_pattern + ")" + isep + rx::escape_literal(code) + isep +
             child->pattern;
      impl.codes.emplace_back(code, std::move(child));
    }
    std::string item = "(?:" + alt + ")";
    std::string core = item + "(?:" + rx::escape_literal(impl.sep) + item + ")*";
    node.impl = std::move(impl);
    return core;
  }

  std::string build(CompiledNode& node, const OneOfDef& d) {
    CompiledNode::Union impl;
    std::string alt;
    for (const auto& b : d.branches) {
      CompiledPtr child = compile_ref(b);
      if (!alt.empty()) alt += '|';
      alt += child->pattern;
      impl.branches.push_back(std::move(child));
    }
    node.impl = std::move(impl);
    return "(?:" + alt + ")";
  }
};

}  // namespace detail

// Lowers the named datatype to its compiled form. Deterministic: the same
// spec and name always produce the same whole_pattern text.
inline CompiledDef compile(const Spec& spec, const std::string& name) {
  const DefPtr* def = spec.find(name);
  DefPtr source;
  if (def != nullptr) {
    source = *def;
  } else if (DefPtr p = predefined_definition(name)) {
    source = std::move(p);
  } else {
    throw SpecError(SpecErrorKind::UnknownDatatype, {"datatypes"},
                    "unknown datatype '" + name + "'");
  }
  detail::Compiler compiler(spec);
  CompiledDef out;
  out.datatype = name;
  out.root = compiler.compile_def(*source, name);
  out.whole_pattern = "^" + out.root->pattern + "$";
  out.source = std::move(source);
  return out;
}

}  // namespace tfkit
