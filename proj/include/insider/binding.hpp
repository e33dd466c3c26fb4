#pragma once

/// @file binding.hpp
/// The reference model linking a system model to its safety model.
///
/// Correspondence is by identifier only: a SamComponent corresponds to the
/// system component of the same name, and a failure port corresponds to the
/// system port named by its traces_to attribute. Binding never fails on
/// inconsistent models; gaps are reported by CheckConsistency().

#include <map>
#include <set>
#include <string>
#include <vector>

#include "insider/error.hpp"
#include "insider/model_json.hpp"
#include "insider/safety_model.hpp"
#include "insider/system_model.hpp"

namespace insider {

struct Binding {
  std::string sm_ref;   // fingerprint of the bound system model
  std::string sam_ref;  // fingerprint of the bound safety model
  /// One entry per system port, possibly with an empty set.
  std::map<QualifiedName, std::set<QualifiedName>> gamma;
  /// One entry per failure port: the system port it traces, which may be
  /// absent from the system model.
  std::map<QualifiedName, QualifiedName> gamma_inv;
  /// System component -> SamComponent, for names present in both models.
  std::map<std::string, std::string> component_map;
  /// System connection -> failure connections joining members of gamma of
  /// its endpoints.
  std::map<std::string, std::set<std::string>> connection_map;

  friend bool operator==(const Binding&, const Binding&) = default;
};

inline Binding Bind(const SystemModel& sm, const SafetyAnalysisModel& sam) {
  Binding b;
  b.sm_ref = Fingerprint(sm);
  b.sam_ref = Fingerprint(sam);
  for (const Port& p : sm.ports()) b.gamma[p.ref()];
  for (const SamComponent& c : sam.components()) {
    if (sm.has_component(c.name)) b.component_map[c.name] = c.name;
    for (const FailurePort& f : c.failure_ports) {
      QualifiedName fref{c.name, f.name};
      b.gamma_inv[fref] = f.traces_to;
      auto it = b.gamma.find(f.traces_to);
      if (it != b.gamma.end()) it->second.insert(fref);
    }
  }
  for (const Connection& con : sm.connections()) {
    auto& linked = b.connection_map[con.name];
    const auto& sources = b.gamma[con.source];
    const auto& targets = b.gamma[con.target];
    for (const FailureConnection& fc : sam.failure_connections())
      if (sources.count(fc.source) && targets.count(fc.target)) linked.insert(fc.name);
  }
  return b;
}

/// Failure ports tracing @p port. Throws UnknownElement if the port is not
/// in the bound system model.
inline const std::set<QualifiedName>& Gamma(const Binding& b, const QualifiedName& port) {
  auto it = b.gamma.find(port);
  if (it == b.gamma.end())
    throw Error(ErrorCode::kUnknownElement, "port '" + port.str() + "' is not in the system model");
  return it->second;
}

/// The system port traced by @p failure_port. Throws UnknownElement if the
/// failure port is not in the bound safety model, DanglingTrace if the
/// traced port is not in the system model.
inline const QualifiedName& GammaPrime(const Binding& b, const QualifiedName& failure_port) {
  auto it = b.gamma_inv.find(failure_port);
  if (it == b.gamma_inv.end())
    throw Error(ErrorCode::kUnknownElement,
                "failure port '" + failure_port.str() + "' is not in the safety model");
  if (!b.gamma.count(it->second))
    throw Error(ErrorCode::kDanglingTrace, "failure port '" + failure_port.str() +
                                               "' traces missing port '" + it->second.str() + "'");
  return it->second;
}

/// True when @p f (owned by SamComponent f.component) stands for system port
/// @p p: same component, matching direction, and p exists.
inline bool Represents(const SystemModel& sm, const SafetyAnalysisModel& sam,
                       const QualifiedName& f) {
  const FailurePort* fp = sam.find_port(f);
  if (!fp) return false;
  const Port* p = sm.find_port(fp->traces_to);
  return p && p->owner == f.component && p->direction == fp->direction;
}

/// Members of gamma(port) that actually represent it.
inline std::vector<QualifiedName> RepresentingPorts(const SystemModel& sm,
                                                    const SafetyAnalysisModel& sam,
                                                    const Binding& b, const QualifiedName& port) {
  std::vector<QualifiedName> out;
  auto it = b.gamma.find(port);
  if (it == b.gamma.end()) return out;
  for (const QualifiedName& f : it->second)
    if (Represents(sm, sam, f)) out.push_back(f);
  return out;
}

}  // namespace insider
