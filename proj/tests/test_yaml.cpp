#include <catch_amalgamated.hpp>

#include <tfkit/errors.hpp>
#include <tfkit/yaml.hpp>

using namespace tfkit;

TEST_CASE("block mapping with nested structures") {
  auto root = yaml::parse(
      "datatypes:\n"
      "  num1: unsigned_integer\n"
      "  num8:\n"
      "    values:\n"
      "      - \"I\": 1\n"
      "      - \"II\": 2\n");
  REQUIRE(root.is_mapping());
  const yaml::Node* dt = root.find("datatypes");
  REQUIRE(dt != nullptr);
  CHECK(dt->pairs.size() == 2);
  CHECK(dt->find("num1")->scalar == "unsigned_integer");

  const yaml::Node* values = dt->find("num8")->find("values");
  REQUIRE(values != nullptr);
  REQUIRE(values->is_sequence());
  REQUIRE(values->items.size() == 2);
  CHECK(values->items[0].pairs[0].first == "I");
  CHECK(values->items[0].pairs[0].second.scalar == "1");
  CHECK(values->items[1].pairs[0].first == "II");
}

TEST_CASE("flow collections, including pairs inside sequences") {
  auto root = yaml::parse("a: {min: -1, max: 1}\nb: [1, 2, 3]\nc: [\"T\": true, \"F\": false]\n");
  CHECK(root.find("a")->find("min")->scalar == "-1");
  CHECK(root.find("b")->items.size() == 3);

  const yaml::Node* c = root.find("c");
  REQUIRE(c->is_sequence());
  REQUIRE(c->items.size() == 2);
  CHECK(c->items[0].is_mapping());
  CHECK(c->items[0].pairs[0].first == "T");
  CHECK(c->items[0].pairs[0].second.scalar == "true");
}

TEST_CASE("quoting and escapes") {
  auto root = yaml::parse("a: '\\d*'\nb: \"x\\\\y\"\nc: 'it''s'\nd: \"$\"\n");
  CHECK(root.find("a")->scalar == "\\d*");
  CHECK(root.find("a")->quoted);
  CHECK(root.find("b")->scalar == "x\\y");
  CHECK(root.find("c")->scalar == "it's");
  CHECK(root.find("d")->scalar == "$");
}

TEST_CASE("comments and blank lines") {
  auto root = yaml::parse(
      "# leading comment\n"
      "\n"
      "a: 1   # trailing\n"
      "b: \"#notacomment\"\n");
  CHECK(root.find("a")->scalar == "1");
  CHECK(root.find("b")->scalar == "#notacomment");
}

TEST_CASE("sequence items carrying multi-key mappings") {
  auto root = yaml::parse(
      "one_of:\n"
      "  - composed_of:\n"
      "      - name: string\n"
      "    splitted_by: \",\"\n"
      "  - float\n");
  const yaml::Node* seq = root.find("one_of");
  REQUIRE(seq->is_sequence());
  REQUIRE(seq->items.size() == 2);
  const yaml::Node& branch = seq->items[0];
  REQUIRE(branch.is_mapping());
  CHECK(branch.pairs.size() == 2);
  CHECK(branch.find("splitted_by")->scalar == ",");
  CHECK(branch.find("composed_of")->is_sequence());
  CHECK(seq->items[1].scalar == "float");
}

TEST_CASE("block sequence at the key's own indentation") {
  auto root = yaml::parse(
      "outer:\n"
      "  key:\n"
      "  - 1\n"
      "  - 2\n"
      "  other: x\n");
  const yaml::Node* key = root.find("outer")->find("key");
  REQUIRE(key != nullptr);
  REQUIRE(key->is_sequence());
  CHECK(key->items.size() == 2);
  CHECK(root.find("outer")->find("other")->scalar == "x");
}

TEST_CASE("flow collections may span lines") {
  auto root = yaml::parse("a: {min: 0,\n    max: 100}\n");
  CHECK(root.find("a")->find("max")->scalar == "100");
}

TEST_CASE("rejected constructs") {
  CHECK_THROWS_AS(yaml::parse("a: &anchor 1\n"), SpecError);
  CHECK_THROWS_AS(yaml::parse("a: *ref\n"), SpecError);
  CHECK_THROWS_AS(yaml::parse("a: !tag x\n"), SpecError);
  CHECK_THROWS_AS(yaml::parse("a: |\n  text\n"), SpecError);
  CHECK_THROWS_AS(yaml::parse("\ta: 1\n"), SpecError);
  CHECK_THROWS_AS(yaml::parse("a: \"unterminated\n"), SpecError);
  CHECK_THROWS_AS(yaml::parse("a: [1, 2\n"), SpecError);
}

TEST_CASE("duplicate keys are rejected everywhere") {
  CHECK_THROWS_AS(yaml::parse("a: 1\na: 2\n"), SpecError);
  CHECK_THROWS_AS(yaml::parse("m: {x: 1, x: 2}\n"), SpecError);
}

TEST_CASE("document marker tolerated, trailing junk rejected") {
  auto root = yaml::parse("---\na: 1\n");
  CHECK(root.find("a")->scalar == "1");
}
