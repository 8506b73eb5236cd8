#include <catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <tfkit/loader.hpp>

using namespace tfkit;

namespace {

std::string golden_path() { return std::string(TFKIT_SPEC_DIR) + "/golden.yaml"; }

SpecErrorKind load_error(const std::string& yaml) {
  try {
    load_spec(yaml);
    FAIL("expected the spec to be rejected: " << yaml);
  } catch (const SpecError& e) {
    return e.kind();
  }
  return SpecErrorKind::YamlSyntax;  // unreachable
}

// Brute-force oracle for cycle enumeration: every simple path that returns
// to its (minimal) starting node, found by exhaustive DFS over the edge
// list with no pruning beyond simple-path-ness.
std::vector<std::set<std::string>> brute_force_cycles(
    const std::vector<std::pair<std::string, std::string>>& edges) {
  std::set<std::string> nodes;
  for (const auto& [a, b] : edges) {
    nodes.insert(a);
    nodes.insert(b);
  }
  std::vector<std::set<std::string>> found;
  for (const auto& start : nodes) {
    std::vector<std::string> path{start};
    auto dfs = [&](auto&& self, const std::string& v) -> void {
      for (const auto& [a, b] : edges) {
        if (a != v) continue;
        if (b == start) {
          std::set<std::string> cycle(path.begin(), path.end());
          if (*cycle.begin() == start &&  // canonical root: smallest node
              std::find(found.begin(), found.end(), cycle) == found.end())
            found.push_back(cycle);
        } else if (std::find(path.begin(), path.end(), b) == path.end()) {
          path.push_back(b);
          self(self, b);
          path.pop_back();
        }
      }
    };
    dfs(dfs, start);
  }
  return found;
}

}  // namespace

TEST_CASE("alias entries resolve to the target definition") {
  Spec spec = load_spec("datatypes: {num1: unsigned_integer}\n");
  REQUIRE(spec.has("num1"));
  const Definition& d = **spec.find("num1");
  CHECK(kind_of(d) == "unsigned_integer");
  const auto& i = std::get<IntegerDef>(d.node);
  CHECK_FALSE(i.is_signed);
  CHECK_FALSE(i.min.has_value());
}

TEST_CASE("resolve handles predefined and spec names") {
  Spec spec = load_spec("datatypes: {num1: unsigned_integer}\n");
  CHECK(kind_of(*resolve(spec, DefRef::named("string"))) == "string");
  CHECK(kind_of(*resolve(spec, DefRef::named("unsigned_integer"))) == "unsigned_integer");
  CHECK(kind_of(*resolve(spec, DefRef::named("num1"))) == "unsigned_integer");
  CHECK_THROWS_AS(resolve(spec, DefRef::named("nope")), SpecError);
}

TEST_CASE("kind_of covers every definition kind") {
  Spec spec = load_spec(
      "datatypes:\n"
      "  a: {constant: \"XYZ\"}\n"
      "  b: {values: [1, 2]}\n"
      "  c: {regex: \"x\"}\n"
      "  d: {regexes: [\"x\", \"y\"]}\n"
      "  e: {list_of: integer, splitted_by: \",\"}\n"
      "  f:\n"
      "    composed_of:\n"
      "      - p: integer\n"
      "    splitted_by: \",\"\n"
      "  g:\n"
      "    labeled_list: {k: integer}\n"
      "    splitted_by: \";\"\n"
      "  h:\n"
      "    tagged_list: {i: integer}\n"
      "    tagname: \"[A-Z]\"\n"
      "    splitted_by: \";\"\n"
      "  u: {one_of: [integer, float]}\n");
  CHECK(kind_of(**spec.find("a")) == "constant");
  CHECK(kind_of(**spec.find("b")) == "values");
  CHECK(kind_of(**spec.find("c")) == "regex");
  CHECK(kind_of(**spec.find("d")) == "regexes");
  CHECK(kind_of(**spec.find("e")) == "list_of");
  CHECK(kind_of(**spec.find("f")) == "composed_of");
  CHECK(kind_of(**spec.find("g")) == "labeled_list");
  CHECK(kind_of(**spec.find("h")) == "tagged_list");
  CHECK(kind_of(**spec.find("u")) == "one_of");
}

TEST_CASE("self reference is the minimal cycle") {
  CHECK(load_error("datatypes: {a: {list_of: a}}\n") == SpecErrorKind::CircularDefinition);
}

TEST_CASE("detect_cycles on hand-built graphs") {
  Spec spec;
  auto list_of = [](const std::string& target) {
    Definition d;
    ListOfDef l;
    l.element = DefRef::named(target);
    l.splitted_by = ",";
    d.node = std::move(l);
    return std::make_shared<Definition>(std::move(d));
  };
  spec.datatypes.emplace_back("x", list_of("y"));
  spec.datatypes.emplace_back("y", list_of("x"));
  auto cycles = detect_cycles(spec);
  REQUIRE(cycles.size() == 1);
  CHECK(cycles[0] == std::vector<std::string>{"x", "y"});

  Spec ok;
  ok.datatypes.emplace_back("x", list_of("y"));
  ok.datatypes.emplace_back("y", list_of("integer"));
  CHECK(detect_cycles(ok).empty());
}

TEST_CASE("cycle through one_of and composed_of, cross-checked with an oracle") {
  // a: {one_of: [b, integer]},  b: {composed_of: [p: a]}
  Spec spec;
  {
    Definition a;
    OneOfDef u;
    u.branches.push_back(DefRef::named("b"));
    u.branches.push_back(DefRef::named("integer"));
    a.node = std::move(u);
    spec.datatypes.emplace_back("a", std::make_shared<Definition>(std::move(a)));

    Definition b;
    ComposedOfDef c;
    c.parts.push_back(ComposedPart{"p", DefRef::named("a")});
    c.splitted_by = ",";
    b.node = std::move(c);
    spec.datatypes.emplace_back("b", std::make_shared<Definition>(std::move(b)));
  }
  auto cycles = detect_cycles(spec);
  REQUIRE(cycles.size() == 1);
  CHECK(cycles[0] == std::vector<std::string>{"a", "b"});

  auto oracle = brute_force_cycles({{"a", "b"}, {"b", "a"}});
  REQUIRE(oracle.size() == 1);
  CHECK(oracle[0] == std::set<std::string>{"a", "b"});
}

TEST_CASE("cycle enumeration matches the oracle on a denser graph") {
  Spec spec;
  auto one_of = [](std::vector<std::string> targets) {
    Definition d;
    OneOfDef u;
    for (auto& t : targets) u.branches.push_back(DefRef::named(t));
    d.node = std::move(u);
    return std::make_shared<Definition>(std::move(d));
  };
  // a -> {b, c}, b -> {c, a}, c -> {a}
  spec.datatypes.emplace_back("a", one_of({"b", "c"}));
  spec.datatypes.emplace_back("b", one_of({"c", "a"}));
  spec.datatypes.emplace_back("c", one_of({"a"}));

  auto got = detect_cycles(spec);
  auto oracle = brute_force_cycles({{"a", "b"}, {"a", "c"}, {"b", "c"}, {"c", "a"}, {"b", "a"}});
  REQUIRE(got.size() == oracle.size());
  for (const auto& cycle : got) {
    std::set<std::string> as_set(cycle.begin(), cycle.end());
    CHECK(std::find(oracle.begin(), oracle.end(), as_set) != oracle.end());
  }
}

TEST_CASE("validation failures") {
  SECTION("regexes with a shared value and no canonical entry") {
    CHECK(load_error("datatypes:\n"
                     "  b:\n"
                     "    regexes:\n"
                     "      - \"[Tt](rue)?\": true\n"
                     "      - \"[Ff](alse)?\": false\n") == SpecErrorKind::MissingCanonical);
  }
  SECTION("values decoding to the same value need a canonical entry") {
    CHECK(load_error("datatypes:\n"
                     "  v:\n"
                     "    values:\n"
                     "      - \"a\": [\"a\"]\n"
                     "      - \"1a\": [\"a\"]\n") == SpecErrorKind::MissingCanonical);
    CHECK_NOTHROW(load_spec("datatypes:\n"
                            "  v:\n"
                            "    values:\n"
                            "      - \"a\": [\"a\"]\n"
                            "      - \"1a\": [\"a\"]\n"
                            "    canonical: {\"1a\": [\"a\"]}\n"));
  }
  SECTION("empty internal separator") {
    CHECK(load_error("datatypes:\n"
                     "  m:\n"
                     "    labeled_list: {k: integer}\n"
                     "    splitted_by: \";\"\n"
                     "    internal_separator: \"\"\n") == SpecErrorKind::BadSeparator);
  }
  SECTION("internal separator occurring in a label") {
    CHECK(load_error("datatypes:\n"
                     "  m:\n"
                     "    labeled_list: {\"a:b\": integer}\n"
                     "    splitted_by: \";\"\n") == SpecErrorKind::BadSeparator);
  }
  SECTION("internal separator producible by the tagname regex") {
    CHECK(load_error("datatypes:\n"
                     "  m:\n"
                     "    tagged_list: {i: integer}\n"
                     "    tagname: \"[A-Z.]+\"\n"
                     "    internal_separator: \".\"\n"
                     "    splitted_by: \";\"\n") == SpecErrorKind::BadSeparator);
  }
  SECTION("splitted_by and separator together") {
    CHECK(load_error("datatypes:\n"
                     "  l:\n"
                     "    list_of: integer\n"
                     "    splitted_by: \",\"\n"
                     "    separator: \",\"\n") == SpecErrorKind::BadOptionCombination);
  }
  SECTION("length excludes min_length/max_length") {
    CHECK(load_error("datatypes:\n"
                     "  l:\n"
                     "    list_of: integer\n"
                     "    splitted_by: \",\"\n"
                     "    length: 3\n"
                     "    min_length: 1\n") == SpecErrorKind::BadOptionCombination);
  }
  SECTION("implicit on a scalar kind") {
    CHECK(load_error("datatypes:\n"
                     "  s:\n"
                     "    regex: \"[A-Z]\"\n"
                     "    implicit: {k: 1}\n") == SpecErrorKind::BadOptionCombination);
  }
  SECTION("unsupported regex constructs") {
    CHECK(load_error("datatypes: {r: {regex: \"(a)\\\\1\"}}\n") == SpecErrorKind::BadRegex);
  }
  SECTION("unknown references") {
    CHECK(load_error("datatypes: {l: {list_of: nothing}}\n") == SpecErrorKind::UnknownDatatype);
  }
  SECTION("reserved predefined names") {
    CHECK(load_error("datatypes: {integer: {constant: 3}}\n") == SpecErrorKind::UnknownKey);
  }
  SECTION("unknown options") {
    CHECK(load_error("datatypes: {c: {constant: 3, bogus: 1}}\n") == SpecErrorKind::UnknownKey);
  }
  SECTION("required exceeding the part count") {
    CHECK(load_error("datatypes:\n"
                     "  c:\n"
                     "    composed_of:\n"
                     "      - p: integer\n"
                     "    splitted_by: \",\"\n"
                     "    required: 2\n") == SpecErrorKind::BadOptionCombination);
  }
  SECTION("canonical entries must decode to their value") {
    CHECK(load_error("datatypes:\n"
                     "  v:\n"
                     "    values: [\"a\": 1, \"b\": 1]\n"
                     "    canonical: {\"c\": 1}\n") == SpecErrorKind::BadOptionCombination);
  }
  SECTION("implicit key colliding with a part name") {
    CHECK(load_error("datatypes:\n"
                     "  c:\n"
                     "    composed_of:\n"
                     "      - p: integer\n"
                     "    splitted_by: \",\"\n"
                     "    implicit: {p: 1}\n") == SpecErrorKind::BadOptionCombination);
  }
}

TEST_CASE("error locations identify the offending datatype") {
  try {
    load_spec("datatypes:\n"
              "  m:\n"
              "    labeled_list: {k: integer}\n"
              "    splitted_by: \";\"\n"
              "    internal_separator: \"\"\n");
    FAIL("expected rejection");
  } catch (const SpecError& e) {
    REQUIRE(e.location().size() >= 2);
    CHECK(e.location()[0] == "datatypes");
    CHECK(e.location()[1] == "m");
  }
}

TEST_CASE("validate_spec returns an empty list for anything load_spec accepts") {
  std::ifstream in(golden_path());
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  Spec spec = load_spec(buf.str(), "golden.yaml");
  CHECK(validate_spec(spec).empty());
  CHECK(detect_cycles(spec).empty());
}

TEST_CASE("loading is deterministic") {
  std::string text =
      "datatypes:\n"
      "  a: {values: [1, 2, 3]}\n"
      "  b: {list_of: a, splitted_by: \",\"}\n";
  Spec s1 = load_spec(text);
  Spec s2 = load_spec(text);
  REQUIRE(s1.datatypes.size() == s2.datatypes.size());
  for (std::size_t i = 0; i < s1.datatypes.size(); ++i) {
    CHECK(s1.datatypes[i].first == s2.datatypes[i].first);
    CHECK(kind_of(*s1.datatypes[i].second) == kind_of(*s2.datatypes[i].second));
  }
}

TEST_CASE("every paper-style listing in the golden corpus loads") {
  std::ifstream in(golden_path());
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  Spec spec = load_spec(buf.str(), "golden.yaml");
  for (const char* name :
       {"num1", "num2", "num3", "num4", "num5", "num6", "num7", "num8", "num9", "num10",
        "boolean1", "boolean2", "boolean3", "boolean4", "str1", "str2", "str3", "str4", "str5",
        "str6", "str7", "str8", "str9", "str10", "list1", "list2", "list3", "list4", "list5",
        "list6", "list7", "list8", "list9", "list9b", "list10", "list11", "map1", "map2",
        "map3", "map4", "map5", "map6", "obj1", "obj2", "obj3", "obj4", "obj5"}) {
    INFO(name);
    CHECK(spec.has(name));
  }
}
