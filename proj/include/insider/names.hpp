#pragma once

/// @file names.hpp
/// Identifiers, qualified `component.element` references and port direction.

#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "insider/error.hpp"

namespace insider {

enum class Direction { kIn, kOut };

inline std::string_view to_string(Direction d) {
  return d == Direction::kIn ? "in" : "out";
}

inline std::optional<Direction> ParseDirection(std::string_view text) {
  if (text == "in") return Direction::kIn;
  if (text == "out") return Direction::kOut;
  return std::nullopt;
}

/// Identifiers are non-empty and contain no '.', whitespace or control chars.
inline bool IsIdentifier(std::string_view name) {
  if (name.empty()) return false;
  for (unsigned char ch : name) {
    if (ch == '.' || ch <= ' ' || ch == 0x7f) return false;
  }
  return true;
}

/// A `component.element` pair, the unique identifier of a port, failure port,
/// event or failure connection endpoint.
struct QualifiedName {
  std::string component;
  std::string element;

  std::string str() const { return component + "." + element; }

  /// Splits at the first '.'; both halves must be identifiers.
  static std::optional<QualifiedName> Parse(std::string_view text) {
    auto dot = text.find('.');
    if (dot == std::string_view::npos) return std::nullopt;
    QualifiedName name{std::string(text.substr(0, dot)),
                       std::string(text.substr(dot + 1))};
    if (!IsIdentifier(name.component) || !IsIdentifier(name.element))
      return std::nullopt;
    return name;
  }

  static QualifiedName ParseOrThrow(std::string_view text,
                                    ErrorCode code = ErrorCode::kInvalidIdentifier) {
    auto name = Parse(text);
    if (!name)
      throw Error(code, "'" + std::string(text) +
                            "' is not a qualified name of the form component.element");
    return *name;
  }

  friend auto operator<=>(const QualifiedName&, const QualifiedName&) = default;
  friend bool operator==(const QualifiedName&, const QualifiedName&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const QualifiedName& name) {
  return os << name.str();
}

}  // namespace insider
