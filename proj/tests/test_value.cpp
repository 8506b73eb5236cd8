#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include <tfkit/value.hpp>

using namespace tfkit;

namespace {

Mapping map_of(std::initializer_list<std::pair<std::string, Value>> init) {
  return Mapping(init);
}

// Reference float formatter: the shortest %.*g rendering that parses back
// to the same bits.
std::string shortest_roundtrip_reference(double d) {
  for (int precision = 1; precision <= 17; ++precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, d);
    if (std::strtod(buf, nullptr) == d) return buf;
  }
  return "?";
}

}  // namespace

TEST_CASE("values_equal distinguishes integers from floats") {
  CHECK(values_equal(Value(2), Value(2)));
  CHECK_FALSE(values_equal(Value(1), Value(1.0)));
  CHECK_FALSE(values_equal(Value(1.0), Value(1)));
  CHECK(values_equal(Value(1.5), Value(1.5)));
}

TEST_CASE("mapping equality ignores key order, sequences do not") {
  Value a(map_of({{"x", Value(1)}, {"y", Value(2)}}));
  Value b(map_of({{"y", Value(2)}, {"x", Value(1)}}));
  CHECK(values_equal(a, b));

  Value s1(Value::Sequence{Value(1), Value(2)});
  Value s2(Value::Sequence{Value(2), Value(1)});
  CHECK_FALSE(values_equal(s1, s2));
}

TEST_CASE("mapping keys are unique") {
  Mapping m;
  CHECK(m.insert("a", Value(1)));
  CHECK_FALSE(m.insert("a", Value(2)));
  REQUIRE(m.find("a") != nullptr);
  CHECK(values_equal(*m.find("a"), Value(1)));
}

TEST_CASE("json output basics") {
  CHECK(value_to_json_text(Value::null()) == "null");
  CHECK(value_to_json_text(Value(true)) == "true");
  CHECK(value_to_json_text(Value(-42)) == "-42");
  CHECK(value_to_json_text(Value("a\"b\n")) == "\"a\\\"b\\n\"");
  CHECK(value_to_json_text(Value(Value::Sequence{})) == "[]");

  Value m(map_of({{"name", Value("16S")}, {"copies", Value(2)}, {"type", Value("rRNA")}}));
  CHECK(value_to_json_text(m) == R"({"name":"16S","copies":2,"type":"rRNA"})");
}

TEST_CASE("float rendering is the shortest round-tripping decimal") {
  CHECK(shortest_roundtrip_reference(1.3) == "1.3");
  CHECK(value_to_json_text(Value(1.3)) == "1.3");

  // floats always re-read as floats
  CHECK(value_to_json_text(Value(2.0)) == "2.0");
  CHECK(value_to_json_text(Value(1e30)) == "1e+30");

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    double d = dist(rng);
    std::string text = value_to_json_text(Value(d));
    CHECK(std::strtod(text.c_str(), nullptr) == d);
    // never longer than the reference shortest rendering by more than the
    // forced ".0" suffix
    std::string ref = shortest_roundtrip_reference(d);
    CHECK(text.size() <= ref.size() + 2);
  }
}

TEST_CASE("json parsing") {
  Value v = json_text_to_value("[1,-3,\"A\"]");
  REQUIRE(v.is_sequence());
  CHECK(values_equal(v, Value(Value::Sequence{Value(1), Value(-3), Value("A")})));

  CHECK(json_text_to_value("2.0").is_float());
  CHECK(json_text_to_value("2").is_integer());
  CHECK(json_text_to_value("null").is_null());

  Value m = json_text_to_value(R"({"a":"x","b":"y"})");
  CHECK(values_equal(m, Value(map_of({{"a", Value("x")}, {"b", Value("y")}}))));
}

TEST_CASE("json errors") {
  CHECK_THROWS_AS(json_text_to_value("{"), JsonError);
  CHECK_THROWS_AS(json_text_to_value(""), JsonError);
  CHECK_THROWS_AS(json_text_to_value("[1,]"), JsonError);
  CHECK_THROWS_AS(json_text_to_value(R"({"a":1,"a":2})"), JsonError);

  try {
    json_text_to_value("9223372036854775808");  // INT64_MAX + 1
    FAIL("overflow not detected");
  } catch (const JsonError& e) {
    CHECK(e.kind() == JsonErrorKind::Overflow);
  }
  CHECK(json_text_to_value("9223372036854775807").is_integer());
  CHECK(json_text_to_value("-9223372036854775808").is_integer());
}

TEST_CASE("json round trip on random values") {
  std::mt19937_64 rng(11);
  auto random_value = [&](auto&& self, int depth) -> Value {
    std::uniform_int_distribution<int> pick(0, depth > 2 ? 4 : 6);
    switch (pick(rng)) {
      case 0: return Value::null();
      case 1: return Value(rng() % 2 == 0);
      case 2: return Value(static_cast<long long>(rng() % 100000) - 50000);
      case 3: {
        std::uniform_real_distribution<double> dist(-1e4, 1e4);
        return Value(dist(rng));
      }
      case 4: {
        std::string s;
        std::uniform_int_distribution<int> len(0, 8);
        std::uniform_int_distribution<int> ch(32, 126);
        for (int i = len(rng); i > 0; --i) s += static_cast<char>(ch(rng));
        return Value(s);
      }
      case 5: {
        Value::Sequence seq;
        std::uniform_int_distribution<int> len(0, 3);
        for (int i = len(rng); i > 0; --i) seq.push_back(self(self, depth + 1));
        return Value(seq);
      }
      default: {
        Mapping m;
        std::uniform_int_distribution<int> len(0, 3);
        for (int i = len(rng); i > 0; --i)
          m.insert("k" + std::to_string(i), self(self, depth + 1));
        return Value(m);
      }
    }
  };
  for (int i = 0; i < 500; ++i) {
    Value v = random_value(random_value, 0);
    Value back = json_text_to_value(value_to_json_text(v));
    CHECK(values_equal(back, v));
  }
}
