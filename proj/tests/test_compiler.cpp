#include <catch_amalgamated.hpp>

#include <fstream>
#include <regex>
#include <sstream>

#include <tfkit/codec.hpp>
#include <tfkit/compiler.hpp>
#include <tfkit/loader.hpp>

using namespace tfkit;

namespace {

Spec golden() {
  static Spec spec = [] {
    std::ifstream in(std::string(TFKIT_SPEC_DIR) + "/golden.yaml");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_spec(buf.str(), "golden.yaml");
  }();
  return spec;
}

bool whole_matches(const CompiledDef& def, std::string_view text) {
  std::regex re(def.whole_pattern);
  return std::regex_match(text.begin(), text.end(), re);
}

}  // namespace

TEST_CASE("constants compile to escaped literals") {
  CompiledDef str3 = compile(golden(), "str3");
  CHECK(str3.whole_pattern == "^XYZ$");
  CHECK(whole_matches(str3, "XYZ"));
  CHECK_FALSE(whole_matches(str3, "XY"));
  CHECK_FALSE(whole_matches(str3, "XYZ "));
}

TEST_CASE("user anchors are normalized away and the engine re-anchors") {
  CompiledDef num9 = compile(golden(), "num9");
  CHECK(num9.whole_pattern.find("[MDCLXVI]+") != std::string::npos);
  // no interior anchors survive
  CHECK(num9.whole_pattern.find("^", 1) == std::string::npos);
  CHECK(whole_matches(num9, "MMXXIV"));
  CHECK(whole_matches(num9, "I"));
  CHECK_FALSE(whole_matches(num9, ""));
  CHECK_FALSE(whole_matches(num9, "MX I"));

  // reference engine agreement for the roman numeral language
  std::regex reference("^[MDCLXVI]+$");
  for (const char* s : {"MMXXIV", "I", "XVII", "ABC", "", "M M"}) {
    CHECK(whole_matches(num9, s) == std::regex_match(s, reference));
  }
}

TEST_CASE("lists with enclosing strings") {
  CompiledDef list7 = compile(golden(), "list7");
  CHECK(whole_matches(list7, "(1,2,3,4)"));
  CHECK(whole_matches(list7, "(7)"));
  CHECK(whole_matches(list7, "()"));  // both enclosing strings: empty list allowed
  CHECK_FALSE(whole_matches(list7, "1,2"));
  CHECK_FALSE(whole_matches(list7, "(1,2"));
  CHECK_FALSE(whole_matches(list7, "(1,,2)"));
}

TEST_CASE("empty option adds the empty alternative") {
  CompiledDef str6 = compile(golden(), "str6");
  CHECK(whole_matches(str6, ""));
  CHECK(whole_matches(str6, "123"));

  CompiledDef boolean3 = compile(golden(), "boolean3");
  CHECK(whole_matches(boolean3, ""));
  CHECK(whole_matches(boolean3, "$"));
  CHECK_FALSE(whole_matches(boolean3, "$$"));
}

TEST_CASE("values alternation prefers longer literals sharing a prefix") {
  CompiledDef num8 = compile(golden(), "num8");
  std::size_t iii = num8.whole_pattern.find("III");
  std::size_t i = num8.whole_pattern.find_first_of("I");
  CHECK(iii == i);  // "III" is alternated first
  CHECK(whole_matches(num8, "III"));
  CHECK(whole_matches(num8, "I"));
}

TEST_CASE("anchoring: no accepted string survives an appended character") {
  for (const char* name : {"str3", "str4", "num8", "list4", "map4", "obj2"}) {
    CompiledDef def = compile(golden(), name);
    for (std::string s : {std::string("XYZ"), std::string("AB"), std::string("II"),
                          std::string("1,2"), std::string("A.i.12"), std::string("1;2.0|A")}) {
      if (!whole_matches(def, s)) continue;
      CHECK_FALSE(whole_matches(def, s + "#"));
      CHECK_FALSE(whole_matches(def, "#" + s));
    }
  }
}

TEST_CASE("compilation is pure") {
  CompiledDef a = compile(golden(), "map4");
  CompiledDef b = compile(golden(), "map4");
  CHECK(a.whole_pattern == b.whole_pattern);
  CompiledDef c = compile(golden(), "obj5");
  CompiledDef d = compile(golden(), "obj5");
  CHECK(c.whole_pattern == d.whole_pattern);
}

TEST_CASE("every golden datatype compiles") {
  Spec spec = golden();
  for (const auto& [name, _] : spec.datatypes) {
    INFO(name);
    CHECK_NOTHROW(compile(spec, name));
  }
}

TEST_CASE("compiling an unknown name fails") {
  CHECK_THROWS_AS(compile(golden(), "missing"), SpecError);
}

TEST_CASE("predefined names compile directly") {
  CompiledDef u = compile(golden(), "unsigned_integer");
  CHECK(whole_matches(u, "042"));
  CHECK_FALSE(whole_matches(u, "-1"));
  CompiledDef i = compile(golden(), "integer");
  CHECK(whole_matches(i, "-17"));
  CHECK(whole_matches(i, "+17"));
  CHECK_FALSE(whole_matches(i, "17.0"));
  CompiledDef f = compile(golden(), "float");
  CHECK(whole_matches(f, "2.0"));
  CHECK(whole_matches(f, "1e-3"));
  CHECK_FALSE(whole_matches(f, "nan"));
  CHECK_FALSE(whole_matches(f, "inf"));
}

TEST_CASE("match of whole_pattern agrees with decode on bound-free definitions") {
  // the syntactic language equals the decoded language when no range
  // bounds or occurrence constraints are involved
  Spec spec = golden();
  for (const char* name : {"str3", "str4", "num8", "boolean1", "list4", "list7", "obj2"}) {
    CompiledDef def = compile(spec, name);
    for (const char* s : {"XYZ", "AB", "II", "T", "1,2", "(1)", "1;2.0|A", "", "junk"}) {
      INFO(name << " on '" << s << "'");
      CHECK(whole_matches(def, s) == is_valid_text(def, s));
    }
  }
}
