#pragma once

/// @file analysis.hpp
/// Classical fault-tree analysis of a component fault tree.
///
/// Flatten() substitutes failure logic through failure connections until
/// only basic events and boundary inputs (failure inports nothing drives)
/// remain. Leaves are named `component.element`.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "insider/error.hpp"
#include "insider/expression.hpp"
#include "insider/safety_model.hpp"

namespace insider {

enum class LeafKind { kEvent, kBoundaryInput };

inline std::string_view to_string(LeafKind k) {
  return k == LeafKind::kEvent ? "event" : "boundary_input";
}

struct FaultTree {
  QualifiedName top;
  Expr expr;
  std::map<std::string, LeafKind> leaf_kinds;
};

/// Leaf count above which cut sets and probabilities are refused.
inline constexpr std::size_t kMaxAnalysisLeaves = 24;

namespace analysis_detail {

class Flattener {
 public:
  explicit Flattener(const SafetyAnalysisModel& sam) : sam_(sam) {}

  Expr Outport(const QualifiedName& ref) {
    if (auto it = done_.find(ref); it != done_.end()) return it->second;
    if (!active_.insert(ref).second)
      throw Error(ErrorCode::kCyclicPropagation,
                  "failure propagation through '" + ref.str() + "' is cyclic");
    const SamComponent& c = *sam_.find_component(ref.component);
    const auto& def = c.definitions.at(ref.element);
    if (!def)
      throw Error(ErrorCode::kUndefinedOutportExpression,
                  "failure outport '" + ref.str() + "' has no failure logic");
    Expr flat = MapLeaves(*def, [&](const Expr& leaf) {
      QualifiedName q{c.name, leaf.name};
      if (leaf.kind == Expr::Kind::kEvent) {
        kinds_[q.str()] = LeafKind::kEvent;
        return Expr::Event(q.str());
      }
      return Inport(q);
    });
    active_.erase(ref);
    done_.emplace(ref, flat);
    return flat;
  }

  Expr Inport(const QualifiedName& ref) {
    if (const FailureConnection* fc = sam_.connection_into(ref)) return Outport(fc->source);
    kinds_[ref.str()] = LeafKind::kBoundaryInput;
    return Expr::Input(ref.str());
  }

  std::map<std::string, LeafKind> TakeKinds() { return std::move(kinds_); }

 private:
  const SafetyAnalysisModel& sam_;
  std::map<QualifiedName, Expr> done_;
  std::set<QualifiedName> active_;
  std::map<std::string, LeafKind> kinds_;
};

/// Leaf names in sorted order; throws TooLarge past the cap.
inline std::vector<std::string> IndexLeaves(const FaultTree& ft) {
  std::set<std::string> names = LeafNames(ft.expr);
  if (names.size() > kMaxAnalysisLeaves)
    throw Error(ErrorCode::kTooLarge, "fault tree of '" + ft.top.str() + "' has " +
                                          std::to_string(names.size()) + " leaves; limit is " +
                                          std::to_string(kMaxAnalysisLeaves));
  return {names.begin(), names.end()};
}

inline int LeafIndex(const std::vector<std::string>& leaves, const std::string& name) {
  return static_cast<int>(std::lower_bound(leaves.begin(), leaves.end(), name) - leaves.begin());
}

using Family = std::vector<std::uint32_t>;

/// Drops every set that contains another set of the family.
inline Family Minimize(Family f) {
  std::sort(f.begin(), f.end(), [](std::uint32_t a, std::uint32_t b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  f.erase(std::unique(f.begin(), f.end()), f.end());
  Family kept;
  for (std::uint32_t s : f) {
    bool subsumed = std::any_of(kept.begin(), kept.end(),
                                [s](std::uint32_t k) { return (k & s) == k; });
    if (!subsumed) kept.push_back(s);
  }
  return kept;
}

inline Family CutFamily(const Expr& e, const std::vector<std::string>& leaves) {
  if (e.is_leaf()) return {std::uint32_t{1} << LeafIndex(leaves, e.name)};
  if (e.kind == Expr::Kind::kOr) {
    Family out;
    for (const Expr& a : e.args) {
      Family sub = CutFamily(a, leaves);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return Minimize(std::move(out));
  }
  // kAnd: pairwise unions.
  Family acc{0};
  for (const Expr& a : e.args) {
    Family sub = CutFamily(a, leaves);
    Family next;
    next.reserve(acc.size() * sub.size());
    for (std::uint32_t x : acc)
      for (std::uint32_t y : sub) next.push_back(x | y);
    acc = Minimize(std::move(next));
  }
  return acc;
}

/// Compiled expression for probability evaluation.
struct Node {
  enum class Op { kFalse, kTrue, kVar, kAnd, kOr, kNot } op = Op::kFalse;
  int var = -1;
  std::vector<Node> kids;
  std::uint32_t vars = 0;  // support
};

inline Node Const(bool v) { return {v ? Node::Op::kTrue : Node::Op::kFalse, -1, {}, 0}; }

inline bool IsConst(const Node& n) { return n.op == Node::Op::kFalse || n.op == Node::Op::kTrue; }

/// Builds a gate with constant folding; @p kids must be simplified already.
inline Node Gate(Node::Op op, std::vector<Node> kids) {
  if (op == Node::Op::kNot) {
    Node& k = kids.front();
    if (IsConst(k)) return Const(k.op == Node::Op::kFalse);
    if (k.op == Node::Op::kNot) return std::move(k.kids.front());
    Node n{op, -1, {}, k.vars};
    n.kids.push_back(std::move(k));
    return n;
  }
  const Node::Op absorbing = op == Node::Op::kAnd ? Node::Op::kFalse : Node::Op::kTrue;
  const Node::Op neutral = op == Node::Op::kAnd ? Node::Op::kTrue : Node::Op::kFalse;
  Node n{op, -1, {}, 0};
  for (Node& k : kids) {
    if (k.op == absorbing) return Const(absorbing == Node::Op::kTrue);
    if (k.op == neutral) continue;
    n.vars |= k.vars;
    n.kids.push_back(std::move(k));
  }
  if (n.kids.empty()) return Const(neutral == Node::Op::kTrue);
  if (n.kids.size() == 1) return std::move(n.kids.front());
  return n;
}

inline Node Compile(const Expr& e, const std::vector<std::string>& leaves) {
  if (e.is_leaf()) {
    int v = LeafIndex(leaves, e.name);
    return {Node::Op::kVar, v, {}, std::uint32_t{1} << v};
  }
  std::vector<Node> kids;
  for (const Expr& a : e.args) kids.push_back(Compile(a, leaves));
  Node::Op op = e.kind == Expr::Kind::kAnd  ? Node::Op::kAnd
                : e.kind == Expr::Kind::kOr ? Node::Op::kOr
                                            : Node::Op::kNot;
  return Gate(op, std::move(kids));
}

inline Node Cofactor(const Node& n, int var, bool value) {
  if (!(n.vars & (std::uint32_t{1} << var))) return n;
  if (n.op == Node::Op::kVar) return Const(value);
  std::vector<Node> kids;
  kids.reserve(n.kids.size());
  for (const Node& k : n.kids) kids.push_back(Cofactor(k, var, value));
  return Gate(n.op, std::move(kids));
}

inline void Key(const Node& n, std::string& out) {
  switch (n.op) {
    case Node::Op::kFalse: out += '0'; return;
    case Node::Op::kTrue: out += '1'; return;
    case Node::Op::kVar: out += 'v' + std::to_string(n.var) + ';'; return;
    case Node::Op::kAnd: out += "&("; break;
    case Node::Op::kOr: out += "|("; break;
    case Node::Op::kNot: out += "!("; break;
  }
  for (const Node& k : n.kids) Key(k, out);
  out += ')';
}

class ShannonEvaluator {
 public:
  explicit ShannonEvaluator(std::vector<double> p) : p_(std::move(p)) {}

  double Probability(const Node& n) {
    switch (n.op) {
      case Node::Op::kFalse: return 0.0;
      case Node::Op::kTrue: return 1.0;
      case Node::Op::kVar: return p_[n.var];
      case Node::Op::kNot: return 1.0 - Probability(n.kids.front());
      default: break;
    }
    // Operands over disjoint leaves are independent and combine directly.
    std::uint32_t seen = 0;
    bool disjoint = true;
    for (const Node& k : n.kids) {
      if (seen & k.vars) disjoint = false;
      seen |= k.vars;
    }
    if (disjoint) {
      double acc = 1.0;
      for (const Node& k : n.kids) {
        double pk = Probability(k);
        acc *= n.op == Node::Op::kAnd ? pk : 1.0 - pk;
      }
      return n.op == Node::Op::kAnd ? acc : 1.0 - acc;
    }
    std::string key;
    Key(n, key);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    // Expand on the lowest-index leaf shared between operands.
    std::uint32_t shared = 0, acc = 0;
    for (const Node& k : n.kids) {
      shared |= acc & k.vars;
      acc |= k.vars;
    }
    int var = std::countr_zero(shared);
    double result = p_[var] * Probability(Cofactor(n, var, true)) +
                    (1.0 - p_[var]) * Probability(Cofactor(n, var, false));
    memo_.emplace(std::move(key), result);
    return result;
  }

 private:
  std::vector<double> p_;
  std::unordered_map<std::string, double> memo_;
};

}  // namespace analysis_detail

/// Flattens the component fault tree below Out failure port @p top
/// (qualified, or a bare name unique in the model).
///
/// Throws UnknownPort if @p top is not an Out failure port,
/// CyclicPropagation if propagation below it loops, and
/// UndefinedOutportExpression if it reaches an outport without logic.
inline FaultTree Flatten(const SafetyAnalysisModel& sam, const std::string& top) {
  QualifiedName ref;
  try {
    ref = sam.resolve_port(top);
  } catch (const Error& e) {
    throw Error(ErrorCode::kUnknownPort, e.issues().front().message);
  }
  if (sam.find_port(ref)->direction != Direction::kOut)
    throw Error(ErrorCode::kUnknownPort, "'" + ref.str() + "' is not a failure outport");
  analysis_detail::Flattener flattener(sam);
  FaultTree ft;
  ft.top = ref;
  ft.expr = flattener.Outport(ref);
  ft.leaf_kinds = flattener.TakeKinds();
  return ft;
}

/// A cut set as sorted leaf names.
using CutSet = std::vector<std::string>;

/// Minimal cut sets by bottom-up set algebra, ordered by size then names.
/// Throws NonCoherentTree if the tree contains a negation, TooLarge past
/// kMaxAnalysisLeaves leaves.
inline std::vector<CutSet> MinimalCutSets(const FaultTree& ft) {
  if (ContainsNot(ft.expr))
    throw Error(ErrorCode::kNonCoherentTree,
                "fault tree of '" + ft.top.str() + "' contains a negation");
  std::vector<std::string> leaves = analysis_detail::IndexLeaves(ft);
  std::vector<CutSet> out;
  for (std::uint32_t mask : analysis_detail::CutFamily(ft.expr, leaves)) {
    CutSet set;
    for (std::size_t i = 0; i < leaves.size(); ++i)
      if (mask & (std::uint32_t{1} << i)) set.push_back(leaves[i]);
    out.push_back(std::move(set));
  }
  std::sort(out.begin(), out.end(), [](const CutSet& a, const CutSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

/// Exact top event probability for independent leaves, by Shannon
/// decomposition on leaves shared between operands. Negation is allowed.
/// Throws MissingProbability, InvalidProbability or TooLarge.
inline double TopEventProbability(const FaultTree& ft, const std::map<std::string, double>& probs) {
  std::vector<std::string> leaves = analysis_detail::IndexLeaves(ft);
  std::vector<double> p;
  std::vector<Issue> issues;
  for (const std::string& leaf : leaves) {
    auto it = probs.find(leaf);
    if (it == probs.end()) {
      issues.push_back({ErrorCode::kMissingProbability, "no probability for '" + leaf + "'"});
      p.push_back(0.0);
    } else if (!(it->second >= 0.0 && it->second <= 1.0)) {
      issues.push_back({ErrorCode::kInvalidProbability,
                        "probability of '" + leaf + "' outside [0,1]"});
      p.push_back(0.0);
    } else {
      p.push_back(it->second);
    }
  }
  ThrowIfAny(std::move(issues));
  analysis_detail::ShannonEvaluator eval(std::move(p));
  double result = eval.Probability(analysis_detail::Compile(ft.expr, leaves));
  return std::clamp(result, 0.0, 1.0);
}

/// Probabilities stored on basic events, keyed by qualified name.
inline std::map<std::string, double> EventProbabilities(const SafetyAnalysisModel& sam) {
  std::map<std::string, double> out;
  for (const SamComponent& c : sam.components())
    for (const BasicEvent& e : c.events)
      if (e.probability) out[c.name + "." + e.name] = *e.probability;
  return out;
}

}  // namespace insider
