#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tfkit {

enum class SpecErrorKind {
  YamlSyntax,
  UnknownKey,
  UnknownDatatype,
  CircularDefinition,
  BadOptionCombination,
  MissingCanonical,
  BadRegex,
  BadSeparator,
};

inline const char* to_string(SpecErrorKind k) {
  switch (k) {
    case SpecErrorKind::YamlSyntax: return "yaml syntax";
    case SpecErrorKind::UnknownKey: return "unknown key";
    case SpecErrorKind::UnknownDatatype: return "unknown datatype";
    case SpecErrorKind::CircularDefinition: return "circular definition";
    case SpecErrorKind::BadOptionCombination: return "bad option combination";
    case SpecErrorKind::MissingCanonical: return "missing canonical";
    case SpecErrorKind::BadRegex: return "bad regex";
    case SpecErrorKind::BadSeparator: return "bad separator";
  }
  return "?";
}

namespace detail {
inline std::string join_path(const std::vector<std::string>& path, char sep) {
  std::string out;
  for (const auto& p : path) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}
}  // namespace detail

// Load- or validate-time failure. `location` is the path of keys from the
// spec root down to the offending option.
class SpecError : public std::runtime_error {
public:
  SpecError(SpecErrorKind kind, std::vector<std::string> location, std::string message)
      : std::runtime_error(detail::join_path(location, '.') + ": " + to_string(kind) +
                           ": " + message),
        kind_(kind),
        location_(std::move(location)),
        message_(std::move(message)) {}

  SpecErrorKind kind() const { return kind_; }
  const std::vector<std::string>& location() const { return location_; }
  const std::string& message() const { return message_; }

private:
  SpecErrorKind kind_;
  std::vector<std::string> location_;
  std::string message_;
};

// Input text rejected by a datatype. `position` is a character offset into
// the decoded text; `path` starts at the requested datatype name and
// descends through part names / labels / element indices.
class DecodeError : public std::runtime_error {
public:
  DecodeError(std::size_t position, std::string expected, std::vector<std::string> path)
      : std::runtime_error(detail::join_path(path, '/') + ": at position " +
                           std::to_string(position) + ": expected " + expected),
        position_(position),
        expected_(std::move(expected)),
        path_(std::move(path)) {}

  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }
  const std::vector<std::string>& path() const { return path_; }

private:
  std::size_t position_;
  std::string expected_;
  std::vector<std::string> path_;
};

enum class EncodeErrorReason {
  WrongType,
  OutOfRange,
  NoCanonicalForm,
  MissingRequired,
  UnknownLabel,
  ImplicitMismatch,
};

inline const char* to_string(EncodeErrorReason r) {
  switch (r) {
    case EncodeErrorReason::WrongType: return "wrong type";
    case EncodeErrorReason::OutOfRange: return "out of range";
    case EncodeErrorReason::NoCanonicalForm: return "no canonical form";
    case EncodeErrorReason::MissingRequired: return "missing required";
    case EncodeErrorReason::UnknownLabel: return "unknown label";
    case EncodeErrorReason::ImplicitMismatch: return "implicit mismatch";
  }
  return "?";
}

// Value rejected by a datatype.
class EncodeError : public std::runtime_error {
public:
  EncodeError(EncodeErrorReason reason, std::vector<std::string> path, std::string message)
      : std::runtime_error(detail::join_path(path, '/') + ": " + to_string(reason) + ": " +
                           message),
        reason_(reason),
        path_(std::move(path)),
        message_(std::move(message)) {}

  EncodeErrorReason reason() const { return reason_; }
  const std::vector<std::string>& path() const { return path_; }
  const std::string& message() const { return message_; }

private:
  EncodeErrorReason reason_;
  std::vector<std::string> path_;
  std::string message_;
};

enum class JsonErrorKind { Syntax, Overflow };

class JsonError : public std::runtime_error {
public:
  JsonError(JsonErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  JsonErrorKind kind() const { return kind_; }

private:
  JsonErrorKind kind_;
};

}  // namespace tfkit
