#pragma once

/// @file expression.hpp
/// Boolean failure logic over basic events and failure inports.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "insider/error.hpp"

namespace insider {

/// A Boolean expression tree with value semantics.
///
/// Leaves reference an event or a failure inport by name. Inside a
/// component the name is local ("w"); in a flattened fault tree it is
/// qualified ("c1.w").
struct Expr {
  enum class Kind { kEvent, kInput, kAnd, kOr, kNot };

  Kind kind = Kind::kEvent;
  std::string name;        // leaves only
  std::vector<Expr> args;  // gates only

  static Expr Event(std::string name) { return {Kind::kEvent, std::move(name), {}}; }
  static Expr Input(std::string name) { return {Kind::kInput, std::move(name), {}}; }
  static Expr And(std::vector<Expr> args) { return {Kind::kAnd, {}, std::move(args)}; }
  static Expr Or(std::vector<Expr> args) { return {Kind::kOr, {}, std::move(args)}; }
  static Expr Not(Expr arg) { return {Kind::kNot, {}, {std::move(arg)}}; }

  bool is_leaf() const { return kind == Kind::kEvent || kind == Kind::kInput; }

  friend bool operator==(const Expr&, const Expr&) = default;
  friend bool operator<(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.name != b.name) return a.name < b.name;
    return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(),
                                        b.args.end());
  }
};

/// Shape errors: gates with too few operands, leaves without names.
inline std::vector<Issue> ValidateExprShape(const Expr& e, const std::string& where) {
  std::vector<Issue> issues;
  std::function<void(const Expr&)> walk = [&](const Expr& node) {
    switch (node.kind) {
      case Expr::Kind::kEvent:
      case Expr::Kind::kInput:
        if (node.name.empty())
          issues.push_back({ErrorCode::kMalformedExpression, where + ": leaf without a name"});
        if (!node.args.empty())
          issues.push_back({ErrorCode::kMalformedExpression, where + ": leaf with operands"});
        break;
      case Expr::Kind::kAnd:
      case Expr::Kind::kOr:
        if (node.args.size() < 2)
          issues.push_back(
              {ErrorCode::kMalformedExpression, where + ": and/or needs at least two operands"});
        break;
      case Expr::Kind::kNot:
        if (node.args.size() != 1)
          issues.push_back({ErrorCode::kMalformedExpression, where + ": not takes one operand"});
        break;
    }
    for (const Expr& a : node.args) walk(a);
  };
  walk(e);
  return issues;
}

/// Visits every leaf, left to right.
template <class F>
void ForEachLeaf(const Expr& e, F&& f) {
  if (e.is_leaf()) {
    f(e);
    return;
  }
  for (const Expr& a : e.args) ForEachLeaf(a, f);
}

inline std::set<std::string> LeafNames(const Expr& e) {
  std::set<std::string> names;
  ForEachLeaf(e, [&](const Expr& leaf) { names.insert(leaf.name); });
  return names;
}

inline bool ContainsNot(const Expr& e) {
  if (e.kind == Expr::Kind::kNot) return true;
  return std::any_of(e.args.begin(), e.args.end(), [](const Expr& a) { return ContainsNot(a); });
}

/// Evaluates @p e with leaf values from @p lookup, which returns nullptr for
/// names it does not know.
template <class Lookup>
bool EvalWith(const Expr& e, Lookup&& lookup) {
  switch (e.kind) {
    case Expr::Kind::kEvent:
    case Expr::Kind::kInput: {
      const bool* value = lookup(e.name);
      if (!value)
        throw Error(ErrorCode::kUnassignedReference, "no truth value for '" + e.name + "'");
      return *value;
    }
    case Expr::Kind::kAnd:
      for (const Expr& a : e.args)
        if (!EvalWith(a, lookup)) return false;
      return true;
    case Expr::Kind::kOr:
      for (const Expr& a : e.args)
        if (EvalWith(a, lookup)) return true;
      return false;
    case Expr::Kind::kNot:
      return !EvalWith(e.args.front(), lookup);
  }
  return false;
}

/// Standard Boolean evaluation. Throws UnassignedReference if a leaf is
/// missing from @p assignment, even when short-circuiting would skip it.
inline bool EvalExpression(const Expr& e, const std::map<std::string, bool>& assignment) {
  ForEachLeaf(e, [&](const Expr& leaf) {
    if (!assignment.count(leaf.name))
      throw Error(ErrorCode::kUnassignedReference, "no truth value for '" + leaf.name + "'");
  });
  return EvalWith(e, [&](const std::string& name) -> const bool* {
    auto it = assignment.find(name);
    return it == assignment.end() ? nullptr : &it->second;
  });
}

/// Flattens nested gates of the same kind, sorts and deduplicates operands,
/// and collapses single-operand gates. Equivalent expressions that differ
/// only by associativity, commutativity or idempotence normalize equally.
inline Expr Normalize(const Expr& e) {
  if (e.is_leaf()) return e;
  if (e.kind == Expr::Kind::kNot) {
    Expr inner = Normalize(e.args.front());
    if (inner.kind == Expr::Kind::kNot) return inner.args.front();
    return Expr::Not(std::move(inner));
  }
  std::vector<Expr> args;
  for (const Expr& a : e.args) {
    Expr n = Normalize(a);
    if (n.kind == e.kind) {
      for (Expr& sub : n.args) args.push_back(std::move(sub));
    } else {
      args.push_back(std::move(n));
    }
  }
  std::sort(args.begin(), args.end());
  args.erase(std::unique(args.begin(), args.end()), args.end());
  if (args.size() == 1) return std::move(args.front());
  return {e.kind, {}, std::move(args)};
}

/// Infix rendering with `&`, `|`, `!`; nested gates are parenthesized.
inline std::string ToString(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kEvent:
    case Expr::Kind::kInput:
      return e.name;
    case Expr::Kind::kNot: {
      const Expr& a = e.args.front();
      return "!" + (a.is_leaf() || a.kind == Expr::Kind::kNot ? ToString(a)
                                                              : "(" + ToString(a) + ")");
    }
    case Expr::Kind::kAnd:
    case Expr::Kind::kOr: {
      const char* sep = e.kind == Expr::Kind::kAnd ? " & " : " | ";
      std::string out;
      for (const Expr& a : e.args) {
        if (!out.empty()) out += sep;
        bool wrap = a.kind == Expr::Kind::kAnd || a.kind == Expr::Kind::kOr;
        out += wrap ? "(" + ToString(a) + ")" : ToString(a);
      }
      return out;
    }
  }
  return {};
}

/// Replaces every leaf by the result of @p f(leaf).
template <class F>
Expr MapLeaves(const Expr& e, F&& f) {
  if (e.is_leaf()) return f(e);
  Expr out{e.kind, {}, {}};
  out.args.reserve(e.args.size());
  for (const Expr& a : e.args) out.args.push_back(MapLeaves(a, f));
  return out;
}

}  // namespace insider
