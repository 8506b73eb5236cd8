#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "definition.hpp"
#include "errors.hpp"
#include "pattern.hpp"
#include "value.hpp"
#include "yaml.hpp"

namespace tfkit {

namespace detail {

inline bool looks_like_integer(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

inline bool looks_like_float(std::string_view s) {
  if (s.find_first_of(".eE") == std::string_view::npos) return false;
  static const std::regex re(R"([+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)");
  return std::regex_match(s.begin(), s.end(), re);
}

// Plain YAML scalars resolve to null / boolean / integer / float by the
// usual core rules; quoted scalars are always text.
inline Value scalar_to_value(const yaml::Node& n, const std::vector<std::string>& path) {
  if (n.quoted) return Value(n.scalar);
  const std::string& s = n.scalar;
  if (s.empty() || s == "null" || s == "~") return Value::null();
  if (s == "true") return Value(true);
  if (s == "false") return Value(false);
  if (looks_like_integer(s)) {
    std::string_view digits = s;
    if (digits.front() == '+') digits.remove_prefix(1);
    std::int64_t v = 0;
    auto r = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (r.ec != std::errc{} || r.ptr != digits.data() + digits.size())
      throw SpecError(SpecErrorKind::YamlSyntax, path,
                      "integer literal '" + s + "' does not fit in 64 bits");
    return Value(v);
  }
  if (looks_like_float(s)) return Value(std::strtod(s.c_str(), nullptr));
  return Value(s);
}

inline Value yaml_to_value(const yaml::Node& n, const std::vector<std::string>& path) {
  switch (n.kind) {
    case yaml::Node::Kind::Scalar: return scalar_to_value(n, path);
    case yaml::Node::Kind::Sequence: {
      Value::Sequence seq;
      for (const auto& item : n.items) seq.push_back(yaml_to_value(item, path));
      return Value(std::move(seq));
    }
    case yaml::Node::Kind::Mapping: {
      Mapping map;
      for (const auto& [k, v] : n.pairs) map.insert(k, yaml_to_value(v, path));
      return Value(std::move(map));
    }
  }
  return Value::null();
}

// Parses definition nodes out of the YAML tree, tracking the key path for
// error reporting. Option placement that has no field to land in is
// rejected here; everything representable is left to validate_spec.
class DefParser {
public:
  explicit DefParser(std::vector<std::string> root_path) : path_(std::move(root_path)) {}

  DefRef parse_ref(const yaml::Node& n) {
    if (n.is_scalar()) {
      if (n.scalar.empty())
        fail(SpecErrorKind::UnknownKey, "expected a datatype name or definition");
      return DefRef::named(n.scalar);
    }
    if (n.is_mapping()) return DefRef::inlined(parse_definition(n));
    fail(SpecErrorKind::UnknownKey, "expected a datatype name or definition mapping");
  }

  DefPtr parse_definition(const yaml::Node& n) {
    static constexpr std::string_view kKindKeys[] = {
        "constant", "values",      "regex",        "regexes",     "integer",
        "unsigned_integer", "float", "list_of",    "composed_of", "labeled_list",
        "tagged_list", "one_of"};
    std::vector<std::string> kinds;
    for (const auto& [k, v] : n.pairs)
      if (std::find(std::begin(kKindKeys), std::end(kKindKeys), k) != std::end(kKindKeys))
        kinds.push_back(k);
    if (kinds.empty())
      fail(SpecErrorKind::UnknownKey, "no definition kind key in mapping");
    if (kinds.size() > 1)
      fail(SpecErrorKind::BadOptionCombination,
           "more than one definition kind: " + kinds[0] + " and " + kinds[1]);

    const std::string& kind = kinds.front();
    const yaml::Node& payload = *n.find(kind);
    Definition def;
    {
      Scope s(*this, kind);
      if (kind == "constant") def.node = parse_constant(payload);
      else if (kind == "values") def.node = parse_values(payload);
      else if (kind == "regex") def.node = RegexDef{parse_regex_entry(payload)};
      else if (kind == "regexes") def.node = parse_regexes(payload);
      else if (kind == "integer") def.node = parse_integer(payload, true);
      else if (kind == "unsigned_integer") def.node = parse_integer(payload, false);
      else if (kind == "float") def.node = parse_float(payload);
      else if (kind == "list_of") {
        ListOfDef l;
        l.element = parse_ref(payload);
        def.node = std::move(l);
      }
      else if (kind == "composed_of") def.node = parse_composed(payload);
      else if (kind == "labeled_list") def.node = parse_labeled(payload);
      else if (kind == "tagged_list") def.node = parse_tagged(payload);
      else def.node = parse_one_of(payload);
    }
    parse_options(n, kind, def);
    return std::make_shared<Definition>(std::move(def));
  }

  [[noreturn]] void fail(SpecErrorKind kind, const std::string& message) const {
    throw SpecError(kind, path_, message);
  }

private:
  std::vector<std::string> path_;

  struct Scope {
    DefParser& p;
    Scope(DefParser& parser, std::string key) : p(parser) { p.path_.push_back(std::move(key)); }
    ~Scope() { p.path_.pop_back(); }
  };

  ConstantDef parse_constant(const yaml::Node& n) {
    if (n.is_scalar()) return ConstantDef{n.scalar, scalar_to_value(n, path_)};
    if (n.is_mapping() && n.pairs.size() == 1)
      return ConstantDef{n.pairs[0].first, yaml_to_value(n.pairs[0].second, path_)};
    fail(SpecErrorKind::UnknownKey, "constant takes a scalar or a one-pair mapping");
  }

  ValuesDef parse_values(const yaml::Node& n) {
    ValuesDef def;
    if (n.is_sequence()) {
      for (const auto& item : n.items) {
        if (item.is_scalar()) {
          def.entries.push_back({item.scalar, scalar_to_value(item, path_)});
        } else if (item.is_mapping() && item.pairs.size() == 1) {
          def.entries.push_back(
              {item.pairs[0].first, yaml_to_value(item.pairs[0].second, path_)});
        } else {
          fail(SpecErrorKind::UnknownKey, "values entries are scalars or one-pair mappings");
        }
      }
    } else if (n.is_mapping()) {
      for (const auto& [k, v] : n.pairs) def.entries.push_back({k, yaml_to_value(v, path_)});
    } else {
      fail(SpecErrorKind::UnknownKey, "values takes a sequence or a mapping");
    }
    if (def.entries.empty()) fail(SpecErrorKind::UnknownKey, "values must not be empty");
    return def;
  }

  RegexEntry parse_regex_entry(const yaml::Node& n) {
    if (n.is_scalar()) return RegexEntry{n.scalar, std::nullopt};
    if (n.is_mapping() && n.pairs.size() == 1)
      return RegexEntry{n.pairs[0].first, yaml_to_value(n.pairs[0].second, path_)};
    fail(SpecErrorKind::UnknownKey, "regex takes a pattern or a one-pair mapping");
  }

  RegexesDef parse_regexes(const yaml::Node& n) {
    RegexesDef def;
    if (n.is_sequence()) {
      for (const auto& item : n.items) def.entries.push_back(parse_regex_entry(item));
    } else if (n.is_mapping()) {
      for (const auto& [k, v] : n.pairs)
        def.entries.push_back(RegexEntry{k, yaml_to_value(v, path_)});
    } else {
      fail(SpecErrorKind::UnknownKey, "regexes takes a sequence or a mapping");
    }
    if (def.entries.empty()) fail(SpecErrorKind::UnknownKey, "regexes must not be empty");
    return def;
  }

  IntegerDef parse_integer(const yaml::Node& n, bool is_signed) {
    IntegerDef def;
    def.is_signed = is_signed;
    if (is_empty_node(n)) return def;
    if (!n.is_mapping()) fail(SpecErrorKind::UnknownKey, "expected range options mapping");
    for (const auto& [k, v] : n.pairs) {
      Scope s(*this, k);
      if (k == "min") def.min = to_integer(v);
      else if (k == "max") def.max = to_integer(v);
      else if (k == "min_excluded") def.min_excluded = to_boolean(v);
      else if (k == "max_excluded") def.max_excluded = to_boolean(v);
      else fail(SpecErrorKind::UnknownKey, "unknown integer option '" + k + "'");
    }
    return def;
  }

  FloatDef parse_float(const yaml::Node& n) {
    FloatDef def;
    if (is_empty_node(n)) return def;
    if (!n.is_mapping()) fail(SpecErrorKind::UnknownKey, "expected range options mapping");
    for (const auto& [k, v] : n.pairs) {
      Scope s(*this, k);
      if (k == "min") def.min = to_float(v);
      else if (k == "max") def.max = to_float(v);
      else if (k == "min_excluded") def.min_excluded = to_boolean(v);
      else if (k == "max_excluded") def.max_excluded = to_boolean(v);
      else fail(SpecErrorKind::UnknownKey, "unknown float option '" + k + "'");
    }
    return def;
  }

  ComposedOfDef parse_composed(const yaml::Node& n) {
    if (!n.is_sequence())
      fail(SpecErrorKind::UnknownKey, "composed_of takes a sequence of name/definition pairs");
    ComposedOfDef def;
    for (const auto& item : n.items) {
      if (!item.is_mapping() || item.pairs.size() != 1)
        fail(SpecErrorKind::UnknownKey, "each composed_of part is a one-pair mapping");
      const auto& [name, sub] = item.pairs[0];
      for (const auto& p : def.parts)
        if (p.name == name)
          fail(SpecErrorKind::BadOptionCombination, "duplicate part name '" + name + "'");
      Scope s(*this, name);
      def.parts.push_back(ComposedPart{name, parse_ref(sub)});
    }
    if (def.parts.empty()) fail(SpecErrorKind::UnknownKey, "composed_of must not be empty");
    return def;
  }

  LabeledListDef parse_labeled(const yaml::Node& n) {
    if (!n.is_mapping())
      fail(SpecErrorKind::UnknownKey, "labeled_list takes a label/definition mapping");
    LabeledListDef def;
    for (const auto& [label, sub] : n.pairs) {
      Scope s(*this, label);
      def.labels.emplace_back(label, parse_ref(sub));
    }
    if (def.labels.empty()) fail(SpecErrorKind::UnknownKey, "labeled_list must not be empty");
    return def;
  }

  TaggedListDef parse_tagged(const yaml::Node& n) {
    if (!n.is_mapping())
      fail(SpecErrorKind::UnknownKey, "tagged_list takes a typecode/definition mapping");
    TaggedListDef def;
    for (const auto& [code, sub] : n.pairs) {
      Scope s(*this, code);
      def.typecodes.emplace_back(code, parse_ref(sub));
    }
    if (def.typecodes.empty()) fail(SpecErrorKind::UnknownKey, "tagged_list must not be empty");
    return def;
  }

  OneOfDef parse_one_of(const yaml::Node& n) {
    if (!n.is_sequence() || n.items.empty())
      fail(SpecErrorKind::UnknownKey, "one_of takes a non-empty sequence of definitions");
    OneOfDef def;
    for (const auto& item : n.items) def.branches.push_back(parse_ref(item));
    return def;
  }

  void parse_options(const yaml::Node& n, const std::string& kind, Definition& def) {
    for (const auto& [key, v] : n.pairs) {
      if (key == kind) continue;
      Scope s(*this, key);
      if (key == "empty") {
        def.options.empty = yaml_to_value(v, path_);
      } else if (key == "as_string") {
        def.options.as_string = to_boolean(v);
      } else if (key == "canonical") {
        def.options.canonical = parse_entry_list(v);
      } else if (key == "implicit") {
        for (auto& e : parse_entry_list(v))
          def.options.implicit.emplace_back(std::move(e.repr), std::move(e.decoded));
      } else if (key == "splitted_by") {
        if (auto* d = std::get_if<ListOfDef>(&def.node)) d->splitted_by = to_text(v);
        else if (auto* c = std::get_if<ComposedOfDef>(&def.node)) c->splitted_by = to_text(v);
        else if (auto* l = std::get_if<LabeledListDef>(&def.node)) l->splitted_by = to_text(v);
        else if (auto* t = std::get_if<TaggedListDef>(&def.node)) t->splitted_by = to_text(v);
        else fail(SpecErrorKind::UnknownKey, "splitted_by is not valid on " + kind);
      } else if (key == "separator") {
        if (auto* d = std::get_if<ListOfDef>(&def.node)) d->separator = to_text(v);
        else if (auto* c = std::get_if<ComposedOfDef>(&def.node)) c->separator = to_text(v);
        else fail(SpecErrorKind::UnknownKey, "separator is not valid on " + kind);
      } else if (key == "prefix" || key == "suffix") {
        std::string* slot = nullptr;
        if (auto* d = std::get_if<ListOfDef>(&def.node))
          slot = key == "prefix" ? &d->prefix : &d->suffix;
        else if (auto* c = std::get_if<ComposedOfDef>(&def.node))
          slot = key == "prefix" ? &c->prefix : &c->suffix;
        if (!slot) fail(SpecErrorKind::UnknownKey, key + " is not valid on " + kind);
        *slot = to_text(v);
      } else if (key == "length" || key == "min_length" || key == "max_length") {
        auto* d = std::get_if<ListOfDef>(&def.node);
        if (!d) fail(SpecErrorKind::UnknownKey, key + " is not valid on " + kind);
        auto count = to_count(v);
        if (key == "length") d->length = count;
        else if (key == "min_length") d->min_length = count;
        else d->max_length = count;
      } else if (key == "required") {
        if (auto* c = std::get_if<ComposedOfDef>(&def.node)) {
          c->required = to_count(v);
        } else if (auto* l = std::get_if<LabeledListDef>(&def.node)) {
          l->required = to_name_list(v);
        } else {
          fail(SpecErrorKind::UnknownKey, "required is not valid on " + kind);
        }
      } else if (key == "single") {
        auto* l = std::get_if<LabeledListDef>(&def.node);
        if (!l) fail(SpecErrorKind::UnknownKey, "single is not valid on " + kind);
        l->single = to_name_list(v);
      } else if (key == "internal_separator") {
        if (auto* l = std::get_if<LabeledListDef>(&def.node)) l->internal_separator = to_text(v);
        else if (auto* t = std::get_if<TaggedListDef>(&def.node))
          t->internal_separator = to_text(v);
        else fail(SpecErrorKind::UnknownKey, "internal_separator is not valid on " + kind);
      } else if (key == "tagname") {
        auto* t = std::get_if<TaggedListDef>(&def.node);
        if (!t) fail(SpecErrorKind::UnknownKey, "tagname is not valid on " + kind);
        t->tagname = to_text(v);
      } else if (key == "hide_constants") {
        auto* c = std::get_if<ComposedOfDef>(&def.node);
        if (!c) fail(SpecErrorKind::UnknownKey, "hide_constants is not valid on " + kind);
        c->hide_constants = to_boolean(v);
      } else {
        fail(SpecErrorKind::UnknownKey, "unknown option '" + key + "'");
      }
    }
    if (auto* t = std::get_if<TaggedListDef>(&def.node); t && t->tagname.empty())
      fail(SpecErrorKind::BadOptionCombination, "tagged_list requires a tagname regex");
  }

  std::vector<ValuesEntry> parse_entry_list(const yaml::Node& n) {
    std::vector<ValuesEntry> out;
    if (n.is_mapping()) {
      for (const auto& [k, v] : n.pairs) out.push_back({k, yaml_to_value(v, path_)});
      return out;
    }
    if (n.is_sequence()) {
      for (const auto& item : n.items) {
        if (!item.is_mapping() || item.pairs.size() != 1)
          fail(SpecErrorKind::UnknownKey, "expected one-pair mapping entries");
        out.push_back({item.pairs[0].first, yaml_to_value(item.pairs[0].second, path_)});
      }
      return out;
    }
    fail(SpecErrorKind::UnknownKey, "expected a mapping or sequence of one-pair mappings");
  }

  bool is_empty_node(const yaml::Node& n) const {
    return (n.is_scalar() && !n.quoted && (n.scalar.empty() || n.scalar == "null")) ||
           (n.is_mapping() && n.pairs.empty());
  }

  std::string to_text(const yaml::Node& n) {
    if (!n.is_scalar()) fail(SpecErrorKind::UnknownKey, "expected a string");
    return n.scalar;
  }

  bool to_boolean(const yaml::Node& n) {
    if (n.is_scalar() && !n.quoted) {
      if (n.scalar == "true") return true;
      if (n.scalar == "false") return false;
    }
    fail(SpecErrorKind::UnknownKey, "expected true or false");
  }

  std::int64_t to_integer(const yaml::Node& n) {
    if (n.is_scalar() && looks_like_integer(n.scalar)) {
      Value v = scalar_to_value(n, path_);
      if (v.is_integer()) return v.as_integer();
    }
    fail(SpecErrorKind::UnknownKey, "expected an integer");
  }

  double to_float(const yaml::Node& n) {
    if (n.is_scalar() && !n.quoted) {
      if (looks_like_integer(n.scalar))
        return static_cast<double>(to_integer(n));
      if (looks_like_float(n.scalar)) return std::strtod(n.scalar.c_str(), nullptr);
    }
    fail(SpecErrorKind::UnknownKey, "expected a number");
  }

  std::size_t to_count(const yaml::Node& n) {
    std::int64_t v = to_integer(n);
    if (v < 0) fail(SpecErrorKind::UnknownKey, "expected a non-negative count");
    return static_cast<std::size_t>(v);
  }

  std::vector<std::string> to_name_list(const yaml::Node& n) {
    if (!n.is_sequence()) fail(SpecErrorKind::UnknownKey, "expected a sequence of names");
    std::vector<std::string> out;
    for (const auto& item : n.items) {
      if (!item.is_scalar()) fail(SpecErrorKind::UnknownKey, "expected a sequence of names");
      out.push_back(item.scalar);
    }
    return out;
  }
};

inline void collect_named_refs(const Definition& d, std::vector<std::string>& out);

inline void collect_named_refs(const DefRef& r, std::vector<std::string>& out) {
  if (r.is_named()) {
    if (!is_predefined_name(r.name)) out.push_back(r.name);
    return;
  }
  collect_named_refs(*r.def, out);
}

inline void collect_named_refs(const Definition& d, std::vector<std::string>& out) {
  if (const auto* l = std::get_if<ListOfDef>(&d.node)) {
    collect_named_refs(l->element, out);
  } else if (const auto* c = std::get_if<ComposedOfDef>(&d.node)) {
    for (const auto& p : c->parts) collect_named_refs(p.element, out);
  } else if (const auto* lab = std::get_if<LabeledListDef>(&d.node)) {
    for (const auto& [_, ref] : lab->labels) collect_named_refs(ref, out);
  } else if (const auto* t = std::get_if<TaggedListDef>(&d.node)) {
    for (const auto& [_, ref] : t->typecodes) collect_named_refs(ref, out);
  } else if (const auto* o = std::get_if<OneOfDef>(&d.node)) {
    for (const auto& b : o->branches) collect_named_refs(b, out);
  }
}

// Enumerates every elementary cycle of the graph: a depth-first search is
// started from each node in turn, restricted to nodes with an index no
// smaller than the start, so each cycle is reported exactly once, rooted at
// its smallest-index node.
inline std::vector<std::vector<std::string>> enumerate_cycles(
    const std::vector<std::string>& names, const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<std::vector<std::string>> cycles;
  const std::size_t n = names.size();
  std::vector<char> on_path(n, 0);
  std::vector<std::size_t> path;

  auto dfs = [&](auto&& self, std::size_t start, std::size_t v) -> void {
    for (std::size_t w : adj[v]) {
      if (w < start) continue;
      if (w == start) {
        std::vector<std::string> cycle;
        for (std::size_t i : path) cycle.push_back(names[i]);
        cycles.push_back(std::move(cycle));
      } else if (!on_path[w]) {
        on_path[w] = 1;
        path.push_back(w);
        self(self, start, w);
        path.pop_back();
        on_path[w] = 0;
      }
    }
  };

  for (std::size_t s = 0; s < n; ++s) {
    on_path.assign(n, 0);
    on_path[s] = 1;
    path.assign(1, s);
    dfs(dfs, s, s);
  }
  return cycles;
}

inline std::vector<std::vector<std::string>> cycles_of(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& edges) {
  std::vector<std::string> names;
  for (const auto& [name, _] : edges) names.push_back(name);
  auto index_of = [&](const std::string& n) -> std::size_t {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == n) return i;
    return names.size();
  };
  std::vector<std::vector<std::size_t>> adj(names.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (const auto& target : edges[i].second) {
      std::size_t j = index_of(target);
      if (j == names.size()) continue;
      if (std::find(adj[i].begin(), adj[i].end(), j) == adj[i].end()) adj[i].push_back(j);
    }
  }
  return enumerate_cycles(names, adj);
}

}  // namespace detail

// Resolves a reference to its definition. Named references look up the
// spec entry or a predefined name.
inline DefPtr resolve(const Spec& spec, const DefRef& ref) {
  if (!ref.is_named()) return ref.def;
  if (const DefPtr* d = spec.find(ref.name)) return *d;
  if (DefPtr p = predefined_definition(ref.name)) return p;
  throw SpecError(SpecErrorKind::UnknownDatatype, {"datatypes"},
                  "unknown datatype '" + ref.name + "'");
}

// Every elementary cycle in the named-reference graph. Empty for any spec
// accepted by load_spec.
inline std::vector<std::vector<std::string>> detect_cycles(const Spec& spec) {
  std::vector<std::pair<std::string, std::vector<std::string>>> edges;
  for (const auto& [name, def] : spec.datatypes) {
    std::vector<std::string> targets;
    detail::collect_named_refs(*def, targets);
    edges.emplace_back(name, std::move(targets));
  }
  return detail::cycles_of(edges);
}

namespace detail {

inline std::string render_cycle(const std::vector<std::string>& cycle) {
  std::string out = "[";
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (i) out += ", ";
    out += cycle[i];
  }
  out += "]";
  return out;
}

struct PatternInfo {
  bool ok = false;
  rx::Pattern pattern;
  std::optional<std::string> singleton;
};

inline PatternInfo analyze_pattern(const std::string& src) {
  PatternInfo info;
  try {
    info.pattern = rx::parse_pattern(src);
    info.ok = true;
    info.singleton = rx::singleton_string(info.pattern.root);
  } catch (const rx::PatternError&) {
  }
  return info;
}

class Validator {
public:
  explicit Validator(const Spec& spec) : spec_(spec) {}

  std::vector<SpecError> run() {
    for (const auto& [name, def] : spec_.datatypes) {
      path_ = {"datatypes", name};
      validate(*def);
    }
    return std::move(errors_);
  }

private:
  const Spec& spec_;
  std::vector<std::string> path_;
  std::vector<SpecError> errors_;

  void report(SpecErrorKind kind, std::vector<std::string> extra, std::string message) {
    std::vector<std::string> loc = path_;
    for (auto& e : extra) loc.push_back(std::move(e));
    errors_.emplace_back(kind, std::move(loc), std::move(message));
  }

  void validate_ref(const DefRef& ref, const std::string& step) {
    if (ref.is_named()) {
      if (!is_predefined_name(ref.name) && !spec_.has(ref.name))
        report(SpecErrorKind::UnknownDatatype, {step}, "unknown datatype '" + ref.name + "'");
      return;
    }
    path_.push_back(step);
    validate(*ref.def);
    path_.pop_back();
  }

  void validate(const Definition& def) {
    const bool scalar_kind =
        std::holds_alternative<ConstantDef>(def.node) ||
        std::holds_alternative<ValuesDef>(def.node) ||
        std::holds_alternative<RegexDef>(def.node) ||
        std::holds_alternative<RegexesDef>(def.node) ||
        std::holds_alternative<IntegerDef>(def.node) ||
        std::holds_alternative<FloatDef>(def.node) ||
        std::holds_alternative<StringDef>(def.node);

    if (!def.options.implicit.empty()) {
      const bool compound = std::holds_alternative<ComposedOfDef>(def.node) ||
                            std::holds_alternative<LabeledListDef>(def.node) ||
                            std::holds_alternative<TaggedListDef>(def.node);
      if (!compound)
        report(SpecErrorKind::BadOptionCombination, {"implicit"},
               "implicit is only valid on composed_of, labeled_list and tagged_list");
    }
    if (!def.options.canonical.empty() && !std::holds_alternative<ValuesDef>(def.node) &&
        !std::holds_alternative<RegexDef>(def.node) &&
        !std::holds_alternative<RegexesDef>(def.node)) {
      report(SpecErrorKind::BadOptionCombination, {"canonical"},
             "canonical is only valid on values, regex and regexes definitions");
    }
    (void)scalar_kind;

    std::visit([&](const auto& node) { validate_node(node, def.options); }, def.node);
  }

  void validate_node(const ConstantDef&, const CommonOptions&) {}
  void validate_node(const IntegerDef&, const CommonOptions&) {}
  void validate_node(const FloatDef&, const CommonOptions&) {}
  void validate_node(const StringDef&, const CommonOptions&) {}

  void validate_node(const ValuesDef& def, const CommonOptions& opts) {
    check_duplicate_values(def.entries, opts, "values");
  }

  void validate_node(const RegexDef& def, const CommonOptions& opts) {
    validate_regex_entries({def.entry}, opts, "regex");
  }

  void validate_node(const RegexesDef& def, const CommonOptions& opts) {
    validate_regex_entries(def.entries, opts, "regexes");
  }

  void validate_node(const ListOfDef& def, const CommonOptions&) {
    check_separators(def.splitted_by, def.separator, "list_of");
    if (def.length && (def.min_length || def.max_length))
      report(SpecErrorKind::BadOptionCombination, {"length"},
             "length excludes min_length and max_length");
    if (def.min_length && def.max_length && *def.min_length > *def.max_length)
      report(SpecErrorKind::BadOptionCombination, {"min_length"},
             "min_length exceeds max_length");
    validate_ref(def.element, "list_of");
  }

  void validate_node(const ComposedOfDef& def, const CommonOptions& opts) {
    check_separators(def.splitted_by, def.separator, "composed_of");
    if (def.required && *def.required > def.parts.size())
      report(SpecErrorKind::BadOptionCombination, {"required"},
             "required exceeds the number of parts");
    for (const auto& [key, _] : opts.implicit) {
      for (const auto& p : def.parts)
        if (p.name == key)
          report(SpecErrorKind::BadOptionCombination, {"implicit"},
                 "implicit key '" + key + "' collides with a part name");
    }
    for (const auto& p : def.parts) validate_ref(p.element, p.name);
  }

  void validate_node(const LabeledListDef& def, const CommonOptions& opts) {
    if (!def.splitted_by) {
      report(SpecErrorKind::BadOptionCombination, {"labeled_list"},
             "labeled_list requires splitted_by");
    } else if (def.splitted_by->empty()) {
      report(SpecErrorKind::BadSeparator, {"splitted_by"}, "splitted_by cannot be empty");
    }
    if (def.internal_separator.empty()) {
      report(SpecErrorKind::BadSeparator, {"internal_separator"},
             "internal separator cannot be empty");
    } else {
      for (const auto& [label, _] : def.labels)
        if (label.find(def.internal_separator) != std::string::npos)
          report(SpecErrorKind::BadSeparator, {"internal_separator"},
                 "internal separator occurs in label '" + label + "'");
    }
    auto known = [&](const std::string& l) {
      for (const auto& [label, _] : def.labels)
        if (label == l) return true;
      return false;
    };
    for (const auto& l : def.single)
      if (!known(l))
        report(SpecErrorKind::BadOptionCombination, {"single"}, "unknown label '" + l + "'");
    for (const auto& l : def.required)
      if (!known(l))
        report(SpecErrorKind::BadOptionCombination, {"required"}, "unknown label '" + l + "'");
    for (const auto& [key, _] : opts.implicit)
      if (known(key))
        report(SpecErrorKind::BadOptionCombination, {"implicit"},
               "implicit key '" + key + "' collides with a label");
    for (const auto& [label, ref] : def.labels) validate_ref(ref, label);
  }

  void validate_node(const TaggedListDef& def, const CommonOptions& opts) {
    if (!def.splitted_by) {
      report(SpecErrorKind::BadOptionCombination, {"tagged_list"},
             "tagged_list requires splitted_by");
    } else if (def.splitted_by->empty()) {
      report(SpecErrorKind::BadSeparator, {"splitted_by"}, "splitted_by cannot be empty");
    }
    auto tag_info = analyze_pattern(def.tagname);
    if (auto problem = rx::user_pattern_check(def.tagname))
      report(SpecErrorKind::BadRegex, {"tagname"}, *problem);
    if (def.internal_separator.empty()) {
      report(SpecErrorKind::BadSeparator, {"internal_separator"},
             "internal separator cannot be empty");
    } else {
      for (const auto& [code, _] : def.typecodes)
        if (code.find(def.internal_separator) != std::string::npos)
          report(SpecErrorKind::BadSeparator, {"internal_separator"},
                 "internal separator occurs in typecode '" + code + "'");
      if (tag_info.ok && rx::can_contain(tag_info.pattern.root, def.internal_separator))
        report(SpecErrorKind::BadSeparator, {"internal_separator"},
               "internal separator can occur in strings matching the tagname regex");
    }
    if (tag_info.ok) {
      for (const auto& [key, _] : opts.implicit) {
        try {
          std::regex re(tag_info.pattern.normalized);
          if (std::regex_match(key, re))
            report(SpecErrorKind::BadOptionCombination, {"implicit"},
                   "implicit key '" + key + "' collides with possible tagnames");
        } catch (const std::regex_error&) {
        }
      }
    }
    for (const auto& [code, ref] : def.typecodes) validate_ref(ref, code);
  }

  void validate_node(const OneOfDef& def, const CommonOptions&) {
    for (std::size_t i = 0; i < def.branches.size(); ++i)
      validate_ref(def.branches[i], "one_of[" + std::to_string(i) + "]");
  }

  void check_separators(const std::optional<std::string>& splitted_by,
                        const std::optional<std::string>& separator, const char* kind) {
    if (splitted_by && separator)
      report(SpecErrorKind::BadOptionCombination, {kind},
             "splitted_by and separator are mutually exclusive");
    if (splitted_by && splitted_by->empty())
      report(SpecErrorKind::BadSeparator, {"splitted_by"}, "splitted_by cannot be empty");
    if (separator && separator->empty())
      report(SpecErrorKind::BadSeparator, {"separator"}, "separator cannot be empty");
  }

  void check_duplicate_values(const std::vector<ValuesEntry>& entries, const CommonOptions& opts,
                              const char* where) {
    check_canonical_entries(opts, [&](const ValuesEntry& c) {
      for (const auto& e : entries)
        if (e.repr == c.repr && values_equal(e.decoded, c.decoded)) return true;
      return false;
    });
    for (std::size_t i = 0; i < entries.size(); ++i) {
      for (std::size_t j = i + 1; j < entries.size(); ++j) {
        if (entries[i].repr == entries[j].repr) {
          if (!values_equal(entries[i].decoded, entries[j].decoded))
            report(SpecErrorKind::BadOptionCombination, {where},
                   "representation '" + entries[i].repr + "' appears with two values");
          continue;
        }
        if (!values_equal(entries[i].decoded, entries[j].decoded)) continue;
        if (!has_canonical_for(opts, entries[i].decoded))
          report(SpecErrorKind::MissingCanonical, {where},
                 "representations '" + entries[i].repr + "' and '" + entries[j].repr +
                     "' decode to the same value; add a canonical entry");
      }
    }
  }

  void validate_regex_entries(const std::vector<RegexEntry>& entries, const CommonOptions& opts,
                              const char* where) {
    std::vector<PatternInfo> infos;
    bool all_ok = true;
    for (const auto& e : entries) {
      if (auto problem = rx::user_pattern_check(e.pattern)) {
        report(SpecErrorKind::BadRegex, {where}, *problem);
        all_ok = false;
        infos.emplace_back();
      } else {
        infos.push_back(analyze_pattern(e.pattern));
      }
    }
    if (!all_ok) return;

    check_canonical_entries(opts, [&](const ValuesEntry& c) {
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!entries[i].decoded || !values_equal(*entries[i].decoded, c.decoded)) continue;
        try {
          std::regex re(infos[i].pattern.normalized);
          if (std::regex_match(c.repr, re)) return true;
        } catch (const std::regex_error&) {
        }
      }
      return false;
    });

    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (!entries[i].decoded) continue;
      bool needs_canonical = !infos[i].singleton.has_value();
      for (std::size_t j = 0; j < entries.size() && !needs_canonical; ++j)
        if (j != i && entries[j].decoded &&
            values_equal(*entries[j].decoded, *entries[i].decoded))
          needs_canonical = true;
      if (needs_canonical && !has_canonical_for(opts, *entries[i].decoded))
        report(SpecErrorKind::MissingCanonical, {where},
               "pattern '" + entries[i].pattern +
                   "' maps several representations to one value; add a canonical entry");
    }
  }

  template <class DecodesBack>
  void check_canonical_entries(const CommonOptions& opts, DecodesBack decodes_back) {
    for (const auto& c : opts.canonical)
      if (!decodes_back(c))
        report(SpecErrorKind::BadOptionCombination, {"canonical"},
               "canonical representation '" + c.repr + "' does not decode to its value");
  }

  bool has_canonical_for(const CommonOptions& opts, const Value& v) const {
    for (const auto& c : opts.canonical)
      if (values_equal(c.decoded, v)) return true;
    return false;
  }
};

}  // namespace detail

// All semantic violations in a structurally well-formed spec: duplicate
// decoded values without a canonical entry, bad separators, conflicting
// options, unsupported patterns. load_spec accepts exactly the specs for
// which this comes back empty.
inline std::vector<SpecError> validate_spec(const Spec& spec) {
  return detail::Validator(spec).run();
}

// Parses and fully validates a specification document. All-or-nothing: any
// error is thrown and no Spec is produced.
inline Spec load_spec(std::string_view yaml_text, std::string source_name = "<string>") {
  yaml::Node root = yaml::parse(yaml_text);
  if (!root.is_mapping())
    throw SpecError(SpecErrorKind::YamlSyntax, {}, "specification root must be a mapping");
  for (const auto& [key, _] : root.pairs)
    if (key != "datatypes")
      throw SpecError(SpecErrorKind::UnknownKey, {key}, "unexpected top-level key");
  const yaml::Node* table = root.find("datatypes");
  if (table == nullptr || !table->is_mapping())
    throw SpecError(SpecErrorKind::YamlSyntax, {},
                    "expected a top-level 'datatypes' mapping");

  // parse every entry; aliases stay as named references for now
  std::vector<std::pair<std::string, DefRef>> raw;
  for (const auto& [name, node] : table->pairs) {
    if (is_predefined_name(name))
      throw SpecError(SpecErrorKind::UnknownKey, {"datatypes", name},
                      "'" + name + "' is a reserved predefined name");
    detail::DefParser parser({"datatypes", name});
    raw.emplace_back(name, parser.parse_ref(node));
  }

  auto find_raw = [&](std::string_view n) -> const DefRef* {
    for (const auto& [name, ref] : raw)
      if (name == n) return &ref;
    return nullptr;
  };

  // all named references must resolve
  for (const auto& [name, ref] : raw) {
    std::vector<std::string> targets;
    detail::collect_named_refs(ref, targets);
    for (const auto& t : targets)
      if (find_raw(t) == nullptr)
        throw SpecError(SpecErrorKind::UnknownDatatype, {"datatypes", name},
                        "unknown datatype '" + t + "'");
  }

  // reject reference cycles (aliases included)
  std::vector<std::pair<std::string, std::vector<std::string>>> edges;
  for (const auto& [name, ref] : raw) {
    std::vector<std::string> targets;
    detail::collect_named_refs(ref, targets);
    edges.emplace_back(name, std::move(targets));
  }
  auto cycles = detail::cycles_of(edges);
  if (!cycles.empty())
    throw SpecError(SpecErrorKind::CircularDefinition, {"datatypes", cycles.front().front()},
                    "circular definitions are not allowed: " +
                        detail::render_cycle(cycles.front()));

  // flatten aliases to their target definitions
  Spec spec;
  spec.source_name = std::move(source_name);
  for (const auto& [name, ref] : raw) {
    const DefRef* r = &ref;
    while (r->is_named()) {
      if (DefPtr p = predefined_definition(r->name); p && find_raw(r->name) == nullptr) {
        spec.datatypes.emplace_back(name, std::move(p));
        r = nullptr;
        break;
      }
      r = find_raw(r->name);
    }
    if (r != nullptr) spec.datatypes.emplace_back(name, r->def);
  }

  auto violations = validate_spec(spec);
  if (!violations.empty()) throw violations.front();
  return spec;
}

inline Spec load_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw SpecError(SpecErrorKind::YamlSyntax, {path}, "cannot open specification file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_spec(buf.str(), path);
}

}  // namespace tfkit
