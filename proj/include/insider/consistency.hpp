#pragma once

/// @file consistency.hpp
/// Consistency checks between a system model and its safety model.

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "insider/binding.hpp"
#include "insider/propagation_graph.hpp"

namespace insider {

/// Declaration order is the report order.
enum class FindingKind {
  kMissingSamComponent,
  kMissingFailurePort,
  kMissingFailureConnection,
  kOrphanSamComponent,
  kOrphanFailurePort,
  kOrphanFailureConnection,
  kDanglingTrace,
  kUndefinedOutportExpression,
  kCyclicPropagation,
};

inline constexpr FindingKind kAllFindingKinds[] = {
    FindingKind::kMissingSamComponent,     FindingKind::kMissingFailurePort,
    FindingKind::kMissingFailureConnection, FindingKind::kOrphanSamComponent,
    FindingKind::kOrphanFailurePort,       FindingKind::kOrphanFailureConnection,
    FindingKind::kDanglingTrace,           FindingKind::kUndefinedOutportExpression,
    FindingKind::kCyclicPropagation,
};

inline std::string_view to_string(FindingKind k) {
  switch (k) {
    case FindingKind::kMissingSamComponent: return "MissingSamComponent";
    case FindingKind::kMissingFailurePort: return "MissingFailurePort";
    case FindingKind::kMissingFailureConnection: return "MissingFailureConnection";
    case FindingKind::kOrphanSamComponent: return "OrphanSamComponent";
    case FindingKind::kOrphanFailurePort: return "OrphanFailurePort";
    case FindingKind::kOrphanFailureConnection: return "OrphanFailureConnection";
    case FindingKind::kDanglingTrace: return "DanglingTrace";
    case FindingKind::kUndefinedOutportExpression: return "UndefinedOutportExpression";
    case FindingKind::kCyclicPropagation: return "CyclicPropagation";
  }
  return "Unknown";
}

inline std::optional<FindingKind> ParseFindingKind(std::string_view text) {
  for (FindingKind k : kAllFindingKinds)
    if (to_string(k) == text) return k;
  return std::nullopt;
}

/// Structural findings are the ones synchronization repairs. The others are
/// advisory: they block analysis but not synchronization.
inline bool IsStructural(FindingKind k) {
  return k != FindingKind::kUndefinedOutportExpression && k != FindingKind::kCyclicPropagation;
}

struct Finding {
  FindingKind kind;
  std::string subject;
  std::string detail;
  std::vector<std::string> related;

  friend bool operator==(const Finding&, const Finding&) = default;
  friend bool operator<(const Finding& a, const Finding& b) {
    return std::tie(a.kind, a.subject, a.related, a.detail) <
           std::tie(b.kind, b.subject, b.related, b.detail);
  }
};

struct CheckOptions {
  bool advisories = true;
};

/// Runs every check and returns all findings sorted by kind, then subject.
/// An empty result means the two models fully correspond.
///
/// Checks:
///  - every system component has a SamComponent of the same name;
///  - every system port is represented by at least one failure port of the
///    owning component's SamComponent with matching direction;
///  - every system connection is mirrored by at least one failure connection
///    from a failure port representing its source to one representing its
///    target;
///  - reverse: SamComponents, failure ports and failure connections without
///    a system counterpart. Ports of orphan SamComponents are covered by the
///    component finding and not reported again.
///  - advisory: Out failure ports without logic, and propagation cycles.
inline std::vector<Finding> CheckConsistency(const SystemModel& sm, const SafetyAnalysisModel& sam,
                                             const Binding& b, CheckOptions options = {}) {
  std::vector<Finding> findings;
  auto add = [&](FindingKind k, std::string subject, std::string detail,
                 std::vector<std::string> related = {}) {
    findings.push_back({k, std::move(subject), std::move(detail), std::move(related)});
  };

  for (const Component& c : sm.components())
    if (!sam.find_component(c.name))
      add(FindingKind::kMissingSamComponent, c.name,
          "component '" + c.name + "' has no safety model component");

  for (const Port& p : sm.ports()) {
    if (!RepresentingPorts(sm, sam, b, p.ref()).empty()) continue;
    add(FindingKind::kMissingFailurePort, p.ref().str(),
        std::string("port '") + p.ref().str() + "' has no failure " +
            (p.direction == Direction::kIn ? "inport" : "outport") + " in '" + p.owner + "'");
  }

  for (const Connection& con : sm.connections()) {
    auto sources = RepresentingPorts(sm, sam, b, con.source);
    auto targets = RepresentingPorts(sm, sam, b, con.target);
    bool mirrored = std::any_of(
        sam.failure_connections().begin(), sam.failure_connections().end(),
        [&](const FailureConnection& fc) {
          return std::find(sources.begin(), sources.end(), fc.source) != sources.end() &&
                 std::find(targets.begin(), targets.end(), fc.target) != targets.end();
        });
    if (!mirrored)
      add(FindingKind::kMissingFailureConnection, con.name,
          "connection '" + con.name + "' has no failure connection",
          {con.source.str(), con.target.str()});
  }

  for (const SamComponent& c : sam.components()) {
    if (!sm.has_component(c.name)) {
      add(FindingKind::kOrphanSamComponent, c.name,
          "safety model component '" + c.name + "' has no system component");
      continue;
    }
    for (const FailurePort& f : c.failure_ports) {
      QualifiedName fref{c.name, f.name};
      const Port* p = sm.find_port(f.traces_to);
      if (!p) {
        add(FindingKind::kDanglingTrace, fref.str(),
            "failure port '" + fref.str() + "' traces missing port '" + f.traces_to.str() + "'",
            {f.traces_to.str()});
      } else if (p->owner != c.name) {
        add(FindingKind::kOrphanFailurePort, fref.str(),
            "failure port '" + fref.str() + "' traces port '" + f.traces_to.str() +
                "' of another component",
            {f.traces_to.str()});
      } else if (p->direction != f.direction) {
        add(FindingKind::kOrphanFailurePort, fref.str(),
            "failure port '" + fref.str() + "' direction differs from port '" +
                f.traces_to.str() + "'",
            {f.traces_to.str()});
      }
    }
  }

  for (const FailureConnection& fc : sam.failure_connections()) {
    bool backed = Represents(sm, sam, fc.source) && Represents(sm, sam, fc.target) &&
                  sm.has_connection(b.gamma_inv.at(fc.source), b.gamma_inv.at(fc.target));
    if (!backed)
      add(FindingKind::kOrphanFailureConnection, fc.name,
          "failure connection '" + fc.name + "' mirrors no system connection",
          {fc.source.str(), fc.target.str()});
  }

  if (options.advisories) {
    for (const QualifiedName& f : UndefinedOutports(sam))
      add(FindingKind::kUndefinedOutportExpression, f.str(),
          "failure outport '" + f.str() + "' has no failure logic");
    PropagationGraph graph = BuildPropagationGraph(sam);
    for (const auto& cycle : graph.cycles())
      add(FindingKind::kCyclicPropagation, cycle.front(),
          "failure propagation cycle through " + std::to_string(cycle.size()) + " element(s)",
          cycle);
  }

  std::sort(findings.begin(), findings.end());
  return findings;
}

inline std::size_t CountStructural(const std::vector<Finding>& findings) {
  return std::count_if(findings.begin(), findings.end(),
                       [](const Finding& f) { return IsStructural(f.kind); });
}

}  // namespace insider
