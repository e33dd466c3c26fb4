#pragma once

/// @file safety_model.hpp
/// Component Fault Tree safety analysis model.
///
/// Each SamComponent holds basic events, failure ports and the failure logic
/// defining each Out failure port from the component's own events and In
/// failure ports. Failure connections propagate failures from an Out failure
/// port of one component to an In failure port of another.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "insider/error.hpp"
#include "insider/expression.hpp"
#include "insider/names.hpp"

namespace insider {

inline constexpr const char* kDefaultFailureMode = "omission";

struct BasicEvent {
  std::string name;
  std::optional<double> probability;

  friend bool operator==(const BasicEvent&, const BasicEvent&) = default;
};

struct FailurePort {
  std::string name;
  Direction direction = Direction::kIn;
  QualifiedName traces_to;  // the system port this failure port represents
  std::string failure_mode = kDefaultFailureMode;

  friend bool operator==(const FailurePort&, const FailurePort&) = default;
};

struct SamComponent {
  std::string name;
  std::vector<BasicEvent> events;
  std::vector<FailurePort> failure_ports;
  /// One entry per Out failure port; nullopt marks logic not yet written.
  std::map<std::string, std::optional<Expr>> definitions;

  const BasicEvent* find_event(const std::string& n) const {
    for (const BasicEvent& e : events)
      if (e.name == n) return &e;
    return nullptr;
  }
  const FailurePort* find_port(const std::string& n) const {
    for (const FailurePort& p : failure_ports)
      if (p.name == n) return &p;
    return nullptr;
  }
  bool has_element(const std::string& n) const { return find_event(n) || find_port(n); }

  friend bool operator==(const SamComponent&, const SamComponent&) = default;
};

struct FailureConnection {
  std::string name;
  QualifiedName source;  // Out failure port
  QualifiedName target;  // In failure port

  friend bool operator==(const FailureConnection&, const FailureConnection&) = default;
};

namespace detail {

inline void CheckComponentLocal(const SamComponent& c, std::vector<Issue>& issues) {
  auto report = [&](ErrorCode code, const std::string& msg) {
    issues.push_back({code, "component '" + c.name + "': " + msg});
  };
  std::set<std::string> names;
  for (const BasicEvent& e : c.events) {
    if (!IsIdentifier(e.name)) report(ErrorCode::kInvalidIdentifier, "event name '" + e.name + "'");
    else if (!names.insert(e.name).second)
      report(ErrorCode::kDuplicateName, "element '" + e.name + "' declared twice");
    if (e.probability && !(*e.probability >= 0.0 && *e.probability <= 1.0))
      report(ErrorCode::kInvalidProbability,
             "event '" + e.name + "' probability outside [0,1]");
  }
  std::set<std::pair<QualifiedName, std::string>> traced;
  for (const FailurePort& p : c.failure_ports) {
    if (!IsIdentifier(p.name)) report(ErrorCode::kInvalidIdentifier, "port name '" + p.name + "'");
    else if (!names.insert(p.name).second)
      report(ErrorCode::kDuplicateName, "element '" + p.name + "' declared twice");
    if (!IsIdentifier(p.traces_to.component) || !IsIdentifier(p.traces_to.element))
      report(ErrorCode::kInvalidIdentifier,
             "failure port '" + p.name + "' traces malformed port '" + p.traces_to.str() + "'");
    if (!IsIdentifier(p.failure_mode))
      report(ErrorCode::kInvalidIdentifier,
             "failure port '" + p.name + "' failure mode '" + p.failure_mode + "'");
    if (!traced.emplace(p.traces_to, p.failure_mode).second)
      report(ErrorCode::kDuplicateName, "two failure ports trace '" + p.traces_to.str() +
                                            "' with mode '" + p.failure_mode + "'");
  }
  for (const auto& [out, def] : c.definitions) {
    const FailurePort* port = c.find_port(out);
    if (!port || port->direction != Direction::kOut) {
      report(ErrorCode::kUnresolvedReference,
             "definition for '" + out + "', which is not an Out failure port");
    }
  }
}

}  // namespace detail

class SafetyAnalysisModel {
 public:
  SafetyAnalysisModel() = default;

  const std::vector<SamComponent>& components() const { return components_; }
  const std::vector<FailureConnection>& failure_connections() const { return connections_; }

  const SamComponent* find_component(const std::string& name) const {
    auto it = std::lower_bound(
        components_.begin(), components_.end(), name,
        [](const SamComponent& c, const std::string& n) { return c.name < n; });
    return it != components_.end() && it->name == name ? &*it : nullptr;
  }

  const FailurePort* find_port(const QualifiedName& ref) const {
    const SamComponent* c = find_component(ref.component);
    return c ? c->find_port(ref.element) : nullptr;
  }

  const FailureConnection* find_connection(const std::string& name) const {
    for (const FailureConnection& fc : connections_)
      if (fc.name == name) return &fc;
    return nullptr;
  }

  /// The failure connection driving an In failure port, if any.
  const FailureConnection* connection_into(const QualifiedName& in_port) const {
    for (const FailureConnection& fc : connections_)
      if (fc.target == in_port) return &fc;
    return nullptr;
  }

  /// Accepts `component.port`, or a bare failure port name unique in the
  /// model. Throws UnknownElement otherwise.
  QualifiedName resolve_port(const std::string& text) const {
    if (auto ref = QualifiedName::Parse(text)) {
      if (find_port(*ref)) return *ref;
    } else {
      std::optional<QualifiedName> match;
      for (const SamComponent& c : components_) {
        if (!c.find_port(text)) continue;
        if (match)
          throw Error(ErrorCode::kUnknownElement,
                      "failure port name '" + text + "' is ambiguous; qualify it");
        match = QualifiedName{c.name, text};
      }
      if (match) return *match;
    }
    throw Error(ErrorCode::kUnknownElement, "failure port '" + text + "' does not exist");
  }

  std::size_t event_count() const {
    std::size_t n = 0;
    for (const SamComponent& c : components_) n += c.events.size();
    return n;
  }
  std::size_t failure_port_count() const {
    std::size_t n = 0;
    for (const SamComponent& c : components_) n += c.failure_ports.size();
    return n;
  }

  friend bool operator==(const SafetyAnalysisModel&, const SafetyAnalysisModel&) = default;

 private:
  friend SafetyAnalysisModel BuildSafetyModel(std::vector<SamComponent>,
                                              std::vector<FailureConnection>);

  std::vector<SamComponent> components_;      // sorted by name
  std::vector<FailureConnection> connections_;  // sorted by name
};

/// Checks one component in isolation, including its failure logic.
/// @p others, when given, lets a reference to another component's element
/// be reported as CrossComponentBeta rather than UnresolvedReference.
inline std::vector<Issue> ValidateSamComponent(const SamComponent& c,
                                               const std::vector<SamComponent>* others = nullptr) {
  std::vector<Issue> issues;
  if (!IsIdentifier(c.name)) {
    issues.push_back({ErrorCode::kInvalidIdentifier, "component name '" + c.name + "'"});
    return issues;
  }
  detail::CheckComponentLocal(c, issues);

  auto owned_elsewhere = [&](const std::string& leaf) {
    if (auto q = QualifiedName::Parse(leaf)) return q->component != c.name;
    if (!others) return false;
    return std::any_of(others->begin(), others->end(), [&](const SamComponent& o) {
      return o.name != c.name && o.has_element(leaf);
    });
  };

  for (const auto& [out, def] : c.definitions) {
    if (!def) continue;
    std::string where = "definition of '" + c.name + "." + out + "'";
    auto shape = ValidateExprShape(*def, where);
    issues.insert(issues.end(), shape.begin(), shape.end());
    ForEachLeaf(*def, [&](const Expr& leaf) {
      bool ok = false;
      if (leaf.kind == Expr::Kind::kEvent) {
        ok = c.find_event(leaf.name) != nullptr;
      } else {
        const FailurePort* p = c.find_port(leaf.name);
        ok = p && p->direction == Direction::kIn;
      }
      if (ok) return;
      if (owned_elsewhere(leaf.name)) {
        issues.push_back({ErrorCode::kCrossComponentBeta,
                          where + " references '" + leaf.name + "' of another component"});
      } else {
        issues.push_back({ErrorCode::kUnresolvedReference,
                          where + " references unknown " +
                              (leaf.kind == Expr::Kind::kEvent ? "event '" : "failure inport '") +
                              leaf.name + "'"});
      }
    });
  }
  return issues;
}

inline std::vector<Issue> ValidateSafetyModel(const std::vector<SamComponent>& components,
                                              const std::vector<FailureConnection>& connections) {
  std::vector<Issue> issues;
  std::map<std::string, const SamComponent*> by_name;
  for (const SamComponent& c : components) {
    auto found = ValidateSamComponent(c, &components);
    issues.insert(issues.end(), found.begin(), found.end());
    if (!by_name.emplace(c.name, &c).second)
      issues.push_back({ErrorCode::kDuplicateName, "component '" + c.name + "' declared twice"});
  }

  auto lookup = [&](const QualifiedName& ref) -> const FailurePort* {
    auto it = by_name.find(ref.component);
    return it == by_name.end() ? nullptr : it->second->find_port(ref.element);
  };

  std::set<std::string> names;
  std::map<QualifiedName, std::string> driver_of;
  for (const FailureConnection& fc : connections) {
    auto report = [&](ErrorCode code, const std::string& msg) {
      issues.push_back({code, "failure connection '" + fc.name + "' " + msg});
    };
    if (!IsIdentifier(fc.name)) {
      issues.push_back({ErrorCode::kInvalidIdentifier, "failure connection name '" + fc.name + "'"});
      continue;
    }
    if (!names.insert(fc.name).second) report(ErrorCode::kDuplicateName, "declared twice");
    const FailurePort* src = lookup(fc.source);
    const FailurePort* dst = lookup(fc.target);
    if (!src) report(ErrorCode::kUnresolvedReference, "source '" + fc.source.str() + "' does not exist");
    if (!dst) report(ErrorCode::kUnresolvedReference, "target '" + fc.target.str() + "' does not exist");
    if (src && src->direction != Direction::kOut)
      report(ErrorCode::kDirectionViolation, "starts at failure inport '" + fc.source.str() + "'");
    if (dst && dst->direction != Direction::kIn)
      report(ErrorCode::kDirectionViolation, "ends at failure outport '" + fc.target.str() + "'");
    if (fc.source.component == fc.target.component)
      report(ErrorCode::kIntraComponentConnection,
             "stays inside component '" + fc.source.component + "'");
    if (dst) {
      auto [it, fresh] = driver_of.emplace(fc.target, fc.name);
      if (!fresh)
        report(ErrorCode::kMultipleDrivers,
               "drives '" + fc.target.str() + "', already driven by '" + it->second + "'");
    }
  }
  return issues;
}

namespace detail {

/// Sorts elements and adds an undefined entry for every Out failure port
/// lacking a definition.
inline void Canonicalize(SamComponent& c) {
  std::sort(c.events.begin(), c.events.end(),
            [](const BasicEvent& a, const BasicEvent& b) { return a.name < b.name; });
  std::sort(c.failure_ports.begin(), c.failure_ports.end(),
            [](const FailurePort& a, const FailurePort& b) { return a.name < b.name; });
  for (const FailurePort& p : c.failure_ports)
    if (p.direction == Direction::kOut) c.definitions.try_emplace(p.name, std::nullopt);
}

}  // namespace detail

/// Validates and canonicalizes. Throws an Error listing every violation.
inline SafetyAnalysisModel BuildSafetyModel(std::vector<SamComponent> components,
                                            std::vector<FailureConnection> connections) {
  ThrowIfAny(ValidateSafetyModel(components, connections));
  for (SamComponent& c : components) detail::Canonicalize(c);
  std::sort(components.begin(), components.end(),
            [](const SamComponent& a, const SamComponent& b) { return a.name < b.name; });
  std::sort(connections.begin(), connections.end(),
            [](const FailureConnection& a, const FailureConnection& b) { return a.name < b.name; });
  SafetyAnalysisModel sam;
  sam.components_ = std::move(components);
  sam.connections_ = std::move(connections);
  return sam;
}

/// Out failure ports whose logic has not been written yet.
inline std::vector<QualifiedName> UndefinedOutports(const SafetyAnalysisModel& sam) {
  std::vector<QualifiedName> out;
  for (const SamComponent& c : sam.components())
    for (const auto& [port, def] : c.definitions)
      if (!def) out.push_back({c.name, port});
  return out;
}

}  // namespace insider
