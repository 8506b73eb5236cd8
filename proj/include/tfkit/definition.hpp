#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "value.hpp"

namespace tfkit {

struct Definition;
using DefPtr = std::shared_ptr<const Definition>;

// Either an inline definition or a reference to a named datatype (a spec
// entry or one of the predefined names integer / unsigned_integer / float /
// string).
struct DefRef {
  std::string name;  // non-empty for named references
  DefPtr def;        // non-null for inline definitions

  bool is_named() const { return !name.empty(); }

  static DefRef named(std::string n) {
    DefRef r;
    r.name = std::move(n);
    return r;
  }
  static DefRef inlined(DefPtr d) {
    DefRef r;
    r.def = std::move(d);
    return r;
  }
};

struct ValuesEntry {
  std::string repr;
  Value decoded;
};

struct ConstantDef {
  std::string repr;
  Value decoded;
};

struct ValuesDef {
  std::vector<ValuesEntry> entries;
};

struct RegexEntry {
  std::string pattern;
  std::optional<Value> decoded;  // absent: the matched text decodes to itself
};

struct RegexDef {
  RegexEntry entry;
};

struct RegexesDef {
  std::vector<RegexEntry> entries;
};

struct IntegerDef {
  std::optional<std::int64_t> min, max;
  bool min_excluded = false;
  bool max_excluded = false;
  bool is_signed = true;
};

struct FloatDef {
  std::optional<double> min, max;
  bool min_excluded = false;
  bool max_excluded = false;
};

struct StringDef {};

struct ListOfDef {
  DefRef element;
  std::optional<std::string> splitted_by;  // separator never found in elements
  std::optional<std::string> separator;    // separator that may recur in elements
  std::string prefix, suffix;
  std::optional<std::size_t> length, min_length, max_length;
};

struct ComposedPart {
  std::string name;
  DefRef element;
};

struct ComposedOfDef {
  std::vector<ComposedPart> parts;
  std::optional<std::string> splitted_by;
  std::optional<std::string> separator;
  std::string prefix, suffix;
  std::optional<std::size_t> required;  // leading mandatory parts; default all
  bool hide_constants = false;
};

struct LabeledListDef {
  std::vector<std::pair<std::string, DefRef>> labels;
  std::optional<std::string> splitted_by;
  std::string internal_separator = ":";
  std::vector<std::string> single;    // labels allowed at most once
  std::vector<std::string> required;  // labels that must appear
};

struct TaggedListDef {
  std::vector<std::pair<std::string, DefRef>> typecodes;
  std::string tagname;  // regex for valid tag names
  std::string internal_separator = ":";
  std::optional<std::string> splitted_by;
};

struct OneOfDef {
  std::vector<DefRef> branches;  // tried in order; first match wins
};

// Options shared by every definition kind. `empty` takes priority over all
// other matching in both directions; `as_string` keeps the raw matched text
// instead of the parsed structure; `implicit` adds constant key/value pairs
// to decoded mappings.
struct CommonOptions {
  std::optional<Value> empty;
  std::vector<ValuesEntry> canonical;
  bool as_string = false;
  std::vector<std::pair<std::string, Value>> implicit;
};

struct Definition {
  std::variant<ConstantDef, ValuesDef, RegexDef, RegexesDef, IntegerDef, FloatDef, StringDef,
               ListOfDef, ComposedOfDef, LabeledListDef, TaggedListDef, OneOfDef>
      node;
  CommonOptions options;
};

// The definition-key name of the kind, as written in specification files.
inline std::string_view kind_of(const Definition& d) {
  struct Visitor {
    std::string_view operator()(const ConstantDef&) { return "constant"; }
    std::string_view operator()(const ValuesDef&) { return "values"; }
    std::string_view operator()(const RegexDef&) { return "regex"; }
    std::string_view operator()(const RegexesDef&) { return "regexes"; }
    std::string_view operator()(const IntegerDef& i) {
      return i.is_signed ? "integer" : "unsigned_integer";
    }
    std::string_view operator()(const FloatDef&) { return "float"; }
    std::string_view operator()(const StringDef&) { return "string"; }
    std::string_view operator()(const ListOfDef&) { return "list_of"; }
    std::string_view operator()(const ComposedOfDef&) { return "composed_of"; }
    std::string_view operator()(const LabeledListDef&) { return "labeled_list"; }
    std::string_view operator()(const TaggedListDef&) { return "tagged_list"; }
    std::string_view operator()(const OneOfDef&) { return "one_of"; }
  };
  return std::visit(Visitor{}, d.node);
}

// A loaded specification: the ordered table of named datatypes. Immutable
// after loading and safe to share between threads.
struct Spec {
  std::vector<std::pair<std::string, DefPtr>> datatypes;
  std::string source_name;

  const DefPtr* find(std::string_view name) const {
    for (const auto& [n, d] : datatypes)
      if (n == name) return &d;
    return nullptr;
  }
  bool has(std::string_view name) const { return find(name) != nullptr; }
};

inline bool is_predefined_name(std::string_view name) {
  return name == "integer" || name == "unsigned_integer" || name == "float" ||
         name == "string";
}

inline DefPtr predefined_definition(std::string_view name) {
  static const DefPtr integer = std::make_shared<Definition>(Definition{IntegerDef{}, {}});
  static const DefPtr unsigned_integer = [] {
    IntegerDef d;
    d.is_signed = false;
    return std::make_shared<Definition>(Definition{d, {}});
  }();
  static const DefPtr flt = std::make_shared<Definition>(Definition{FloatDef{}, {}});
  static const DefPtr str = std::make_shared<Definition>(Definition{StringDef{}, {}});
  if (name == "integer") return integer;
  if (name == "unsigned_integer") return unsigned_integer;
  if (name == "float") return flt;
  if (name == "string") return str;
  return nullptr;
}

}  // namespace tfkit
