#pragma once

/// @file synchronizer.hpp
/// Brings a safety model structurally in line with a system model.
///
/// PlanSync() computes an ordered ChangeSet and ApplyChangeSet() replays it.
/// The plan realizes four passes:
///  1. create missing SamComponents and one default failure port per
///     unrepresented system port;
///  2. remove SamComponents without a system component and failure ports
///     that represent nothing;
///  3. create a failure connection for every system connection that has
///     none;
///  4. remove failure connections that mirror no system connection.
/// Ops are emitted renames first, then removals (connections, ports,
/// components), then creations (components, ports, connections), so every
/// intermediate model stays valid. Failure logic of surviving components is
/// never rewritten; the only exception is a definition that reads a removed
/// failure inport, which is reset to undefined and noted in the ChangeSet.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "insider/binding.hpp"
#include "insider/repository.hpp"

namespace insider {

enum class ChangeKind {
  kRenameElement,
  kCreateSamComponent,
  kRemoveSamComponent,
  kCreateFailurePort,
  kRemoveFailurePort,
  kCreateFailureConnection,
  kRemoveFailureConnection,
};

inline constexpr ChangeKind kAllChangeKinds[] = {
    ChangeKind::kRenameElement,          ChangeKind::kCreateSamComponent,
    ChangeKind::kRemoveSamComponent,     ChangeKind::kCreateFailurePort,
    ChangeKind::kRemoveFailurePort,      ChangeKind::kCreateFailureConnection,
    ChangeKind::kRemoveFailureConnection,
};

inline std::string_view to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::kRenameElement: return "RenameElement";
    case ChangeKind::kCreateSamComponent: return "CreateSamComponent";
    case ChangeKind::kRemoveSamComponent: return "RemoveSamComponent";
    case ChangeKind::kCreateFailurePort: return "CreateFailurePort";
    case ChangeKind::kRemoveFailurePort: return "RemoveFailurePort";
    case ChangeKind::kCreateFailureConnection: return "CreateFailureConnection";
    case ChangeKind::kRemoveFailureConnection: return "RemoveFailureConnection";
  }
  return "Unknown";
}

inline std::optional<ChangeKind> ParseChangeKind(std::string_view text) {
  for (ChangeKind k : kAllChangeKinds)
    if (to_string(k) == text) return k;
  return std::nullopt;
}

namespace change {

enum class RenameScope { kComponent, kPort };

/// Component scope: SamComponent `target` becomes `new_name` and every
/// trace and connection endpoint follows. Port scope: failure ports tracing
/// system port `target` are retraced to `new_name` (both qualified).
struct Rename {
  RenameScope scope = RenameScope::kComponent;
  std::string new_name;
  friend bool operator==(const Rename&, const Rename&) = default;
};

/// The new component's full content: an empty shell, or logic instantiated
/// from the repository entry `repo_key`.
struct CreateComponent {
  SamComponent component;
  std::optional<std::string> repo_key;
  friend bool operator==(const CreateComponent&, const CreateComponent&) = default;
};

struct CreatePort {
  Direction direction = Direction::kIn;
  QualifiedName traces_to;
  std::string failure_mode = kDefaultFailureMode;
  friend bool operator==(const CreatePort&, const CreatePort&) = default;
};

struct CreateConnection {
  QualifiedName source;
  QualifiedName target;
  friend bool operator==(const CreateConnection&, const CreateConnection&) = default;
};

}  // namespace change

using ChangePayload = std::variant<std::monostate, change::Rename, change::CreateComponent,
                                   change::CreatePort, change::CreateConnection>;

struct ChangeOp {
  ChangeKind kind;
  /// Component name, `component.element`, or failure connection name.
  std::string target;
  ChangePayload payload;

  friend bool operator==(const ChangeOp&, const ChangeOp&) = default;
};

struct ChangeSet {
  std::string sm_fingerprint;
  std::string sam_fingerprint;
  std::vector<ChangeOp> ops;
  /// Advisory notes for the engineer; not needed to apply the ops.
  std::vector<std::string> notes;

  bool empty() const { return ops.empty(); }

  friend bool operator==(const ChangeSet&, const ChangeSet&) = default;
};

/// Old name -> new name. A plain identifier names a component, a qualified
/// `component.port` names a port.
struct RenameHints {
  std::map<std::string, std::string> renames;
};

namespace sync_detail {

/// Mutable component/connection lists that ops are replayed on.
struct Draft {
  std::vector<SamComponent> components;
  std::vector<FailureConnection> connections;

  explicit Draft(const SafetyAnalysisModel& sam)
      : components(sam.components()), connections(sam.failure_connections()) {}

  SamComponent* component(const std::string& name) {
    for (SamComponent& c : components)
      if (c.name == name) return &c;
    return nullptr;
  }
  const SamComponent* component(const std::string& name) const {
    return const_cast<Draft*>(this)->component(name);
  }
  const FailurePort* port(const QualifiedName& ref) const {
    const SamComponent* c = component(ref.component);
    return c ? c->find_port(ref.element) : nullptr;
  }
  bool has_connection(const std::string& name) const {
    return std::any_of(connections.begin(), connections.end(),
                       [&](const FailureConnection& fc) { return fc.name == name; });
  }
};

[[noreturn]] inline void Inapplicable(const ChangeOp& op, const std::string& why) {
  throw Error(ErrorCode::kInapplicableOp,
              std::string(to_string(op.kind)) + " '" + op.target + "': " + why);
}

inline QualifiedName TargetRef(const ChangeOp& op) {
  auto ref = QualifiedName::Parse(op.target);
  if (!ref) Inapplicable(op, "target is not a component.element reference");
  return *ref;
}

template <class P>
const P& PayloadOf(const ChangeOp& op) {
  const P* p = std::get_if<P>(&op.payload);
  if (!p) Inapplicable(op, "payload missing or of the wrong kind");
  return *p;
}

/// Resets definitions that read @p input; returns the affected outports.
inline std::vector<std::string> ForgetInput(SamComponent& c, const std::string& input) {
  std::vector<std::string> reset;
  for (auto& [out, def] : c.definitions) {
    if (def && LeafNames(*def).count(input)) {
      def.reset();
      reset.push_back(out);
    }
  }
  return reset;
}

inline void ApplyOp(Draft& d, const ChangeOp& op) {
  switch (op.kind) {
    case ChangeKind::kRenameElement: {
      const auto& r = PayloadOf<change::Rename>(op);
      if (r.scope == change::RenameScope::kComponent) {
        SamComponent* c = d.component(op.target);
        if (!c) Inapplicable(op, "no such component");
        if (!IsIdentifier(r.new_name)) Inapplicable(op, "new name is not an identifier");
        if (r.new_name == op.target) return;
        if (d.component(r.new_name)) Inapplicable(op, "'" + r.new_name + "' already exists");
        c->name = r.new_name;
        for (SamComponent& other : d.components)
          for (FailurePort& p : other.failure_ports)
            if (p.traces_to.component == op.target) p.traces_to.component = r.new_name;
        for (FailureConnection& fc : d.connections) {
          if (fc.source.component == op.target) fc.source.component = r.new_name;
          if (fc.target.component == op.target) fc.target.component = r.new_name;
        }
      } else {
        QualifiedName from = TargetRef(op);
        auto to = QualifiedName::Parse(r.new_name);
        if (!to) Inapplicable(op, "new name is not a component.port reference");
        for (SamComponent& c : d.components)
          for (FailurePort& p : c.failure_ports)
            if (p.traces_to == from) p.traces_to = *to;
      }
      return;
    }
    case ChangeKind::kCreateSamComponent: {
      const auto& p = PayloadOf<change::CreateComponent>(op);
      if (d.component(op.target)) Inapplicable(op, "component already exists");
      if (p.component.name != op.target) Inapplicable(op, "payload names another component");
      d.components.push_back(p.component);
      return;
    }
    case ChangeKind::kRemoveSamComponent: {
      if (!d.component(op.target)) Inapplicable(op, "no such component");
      for (const FailureConnection& fc : d.connections)
        if (fc.source.component == op.target || fc.target.component == op.target)
          Inapplicable(op, "failure connection '" + fc.name + "' still attached");
      std::erase_if(d.components, [&](const SamComponent& c) { return c.name == op.target; });
      return;
    }
    case ChangeKind::kCreateFailurePort: {
      const auto& p = PayloadOf<change::CreatePort>(op);
      QualifiedName ref = TargetRef(op);
      SamComponent* c = d.component(ref.component);
      if (!c) Inapplicable(op, "no such component");
      if (c->has_element(ref.element)) Inapplicable(op, "element already exists");
      c->failure_ports.push_back({ref.element, p.direction, p.traces_to, p.failure_mode});
      if (p.direction == Direction::kOut) c->definitions[ref.element] = std::nullopt;
      return;
    }
    case ChangeKind::kRemoveFailurePort: {
      QualifiedName ref = TargetRef(op);
      SamComponent* c = d.component(ref.component);
      if (!c || !c->find_port(ref.element)) Inapplicable(op, "no such failure port");
      for (const FailureConnection& fc : d.connections)
        if (fc.source == ref || fc.target == ref)
          Inapplicable(op, "failure connection '" + fc.name + "' still attached");
      if (c->find_port(ref.element)->direction == Direction::kOut) {
        c->definitions.erase(ref.element);
      } else {
        ForgetInput(*c, ref.element);
      }
      std::erase_if(c->failure_ports,
                    [&](const FailurePort& p) { return p.name == ref.element; });
      return;
    }
    case ChangeKind::kCreateFailureConnection: {
      const auto& p = PayloadOf<change::CreateConnection>(op);
      if (d.has_connection(op.target)) Inapplicable(op, "connection already exists");
      d.connections.push_back({op.target, p.source, p.target});
      return;
    }
    case ChangeKind::kRemoveFailureConnection: {
      if (!d.has_connection(op.target)) Inapplicable(op, "no such failure connection");
      std::erase_if(d.connections,
                    [&](const FailureConnection& fc) { return fc.name == op.target; });
      return;
    }
  }
}

inline SafetyAnalysisModel Finish(Draft d) {
  auto issues = ValidateSafetyModel(d.components, d.connections);
  if (!issues.empty()) {
    issues.insert(issues.begin(),
                  {ErrorCode::kInapplicableOp, "change set leaves an invalid safety model"});
    throw Error(std::move(issues));
  }
  return BuildSafetyModel(std::move(d.components), std::move(d.connections));
}

inline bool Represents(const SystemModel& sm, const Draft& d, const QualifiedName& f) {
  const FailurePort* fp = d.port(f);
  if (!fp) return false;
  const Port* p = sm.find_port(fp->traces_to);
  return p && p->owner == f.component && p->direction == fp->direction;
}

/// Failure ports of ρ(port)'s component representing @p port, by name.
inline std::vector<const FailurePort*> Representatives(const SystemModel& sm, const Draft& d,
                                                       const QualifiedName& port) {
  std::vector<const FailurePort*> out;
  const SamComponent* c = d.component(port.component);
  if (!c) return out;
  for (const FailurePort& f : c->failure_ports)
    if (f.traces_to == port && Represents(sm, d, {c->name, f.name})) out.push_back(&f);
  std::sort(out.begin(), out.end(),
            [](const FailurePort* a, const FailurePort* b) { return a->name < b->name; });
  return out;
}

template <class Taken>
std::string FreshName(const std::string& base, Taken&& taken) {
  if (!taken(base)) return base;
  for (int i = 2;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!taken(candidate)) return candidate;
  }
}

/// Stored logic re-homed under @p name: traces point at @p name's ports,
/// and ports that would represent nothing in @p sm are dropped.
inline SamComponent Instantiate(const SystemModel& sm, SamComponent stored, const std::string& name,
                                std::vector<std::string>& notes) {
  stored.name = name;
  std::vector<FailurePort> kept;
  std::set<std::pair<QualifiedName, std::string>> seen;
  std::vector<std::string> dropped_inputs;
  for (FailurePort& f : stored.failure_ports) {
    f.traces_to.component = name;
    const Port* p = sm.find_port(f.traces_to);
    bool keep = p && p->direction == f.direction && seen.emplace(f.traces_to, f.failure_mode).second;
    if (keep) {
      kept.push_back(f);
      continue;
    }
    notes.push_back("repository port '" + name + "." + f.name + "' has no counterpart; dropped");
    if (f.direction == Direction::kOut) stored.definitions.erase(f.name);
    else dropped_inputs.push_back(f.name);
  }
  stored.failure_ports = std::move(kept);
  for (const std::string& in : dropped_inputs)
    for (const std::string& out : ForgetInput(stored, in))
      notes.push_back("logic of '" + name + "." + out + "' read dropped inport '" + in +
                      "'; reset to undefined");
  return stored;
}

inline void CheckHints(const SystemModel& sm, const RenameHints& hints) {
  std::vector<Issue> issues;
  auto bad = [&](const std::string& msg) { issues.push_back({ErrorCode::kInvalidHints, msg}); };
  std::set<std::string> targets;
  std::map<std::string, std::string> component_hints;
  for (const auto& [from, to] : hints.renames)
    if (IsIdentifier(from) && IsIdentifier(to)) component_hints[from] = to;

  for (const auto& [from, to] : hints.renames) {
    if (!targets.insert(to).second) bad("two elements renamed to '" + to + "'");
    auto qfrom = QualifiedName::Parse(from);
    auto qto = QualifiedName::Parse(to);
    if (IsIdentifier(from) && IsIdentifier(to)) {
      if (sm.has_component(from)) bad("component '" + from + "' still exists");
      if (!sm.has_component(to)) bad("component '" + to + "' does not exist");
    } else if (qfrom && qto) {
      auto it = component_hints.find(qfrom->component);
      std::string expected = it == component_hints.end() ? qfrom->component : it->second;
      if (qto->component != expected)
        bad("port rename '" + from + "' -> '" + to + "' moves the port to another component");
      if (sm.find_port(*qfrom)) bad("port '" + from + "' still exists");
      if (!sm.find_port(*qto)) bad("port '" + to + "' does not exist");
    } else {
      bad("'" + from + "' -> '" + to + "' must rename a component to a component or a port to a port");
    }
  }
  ThrowIfAny(std::move(issues));
}

}  // namespace sync_detail

/// Computes the ChangeSet realizing the synchronization passes.
///
/// Rename hints are applied first so renamed elements keep their logic.
/// When @p repo holds an entry keyed by the name of a component about to be
/// created, the stored logic is instantiated instead of an empty shell.
/// Throws InvalidHints, or StaleChangeSet if @p binding belongs to other
/// models.
inline ChangeSet PlanSync(const SystemModel& sm, const SafetyAnalysisModel& sam,
                          const Binding& binding, const RenameHints* hints = nullptr,
                          const ComponentRepository* repo = nullptr) {
  using namespace sync_detail;
  ChangeSet cs;
  cs.sm_fingerprint = Fingerprint(sm);
  cs.sam_fingerprint = Fingerprint(sam);
  if (binding.sm_ref != cs.sm_fingerprint || binding.sam_ref != cs.sam_fingerprint)
    throw Error(ErrorCode::kStaleChangeSet, "binding does not belong to the given models");

  Draft draft(sam);
  auto emit = [&](ChangeOp op) {
    ApplyOp(draft, op);
    cs.ops.push_back(std::move(op));
  };

  // Renames.
  if (hints) {
    CheckHints(sm, *hints);
    std::map<std::string, std::string> component_of;
    for (const auto& [from, to] : hints->renames) {
      if (!IsIdentifier(from)) continue;
      component_of[from] = to;
      if (!draft.component(from)) {
        cs.notes.push_back("rename hint '" + from + "' matches no safety model component");
        continue;
      }
      if (draft.component(to))
        throw Error(ErrorCode::kInvalidHints,
                    "cannot rename '" + from + "': safety model already has '" + to + "'");
      emit({ChangeKind::kRenameElement, from, change::Rename{change::RenameScope::kComponent, to}});
    }
    for (const auto& [from, to] : hints->renames) {
      auto qfrom = QualifiedName::Parse(from);
      if (!qfrom) continue;
      if (auto it = component_of.find(qfrom->component); it != component_of.end())
        qfrom->component = it->second;
      bool traced = std::any_of(draft.components.begin(), draft.components.end(),
                                [&](const SamComponent& c) {
                                  return std::any_of(c.failure_ports.begin(), c.failure_ports.end(),
                                                     [&](const FailurePort& f) {
                                                       return f.traces_to == *qfrom;
                                                     });
                                });
      if (!traced) {
        cs.notes.push_back("rename hint '" + from + "' matches no failure port trace");
        continue;
      }
      emit({ChangeKind::kRenameElement, qfrom->str(),
            change::Rename{change::RenameScope::kPort, to}});
    }
  }

  // Removals: connections, then ports, then components.
  std::vector<std::string> dead_connections;
  for (const FailureConnection& fc : draft.connections) {
    bool backed = Represents(sm, draft, fc.source) && Represents(sm, draft, fc.target) &&
                  sm.has_connection(draft.port(fc.source)->traces_to,
                                    draft.port(fc.target)->traces_to);
    if (!backed) dead_connections.push_back(fc.name);
  }
  std::sort(dead_connections.begin(), dead_connections.end());
  for (const std::string& name : dead_connections)
    emit({ChangeKind::kRemoveFailureConnection, name, {}});

  std::vector<QualifiedName> dead_ports;
  std::vector<std::string> dead_components;
  for (const SamComponent& c : draft.components) {
    bool orphan = !sm.has_component(c.name);
    if (orphan) dead_components.push_back(c.name);
    for (const FailurePort& f : c.failure_ports) {
      QualifiedName ref{c.name, f.name};
      if (!orphan && Represents(sm, draft, ref)) continue;
      dead_ports.push_back(ref);
      if (!orphan) {
        const Port* p = sm.find_port(f.traces_to);
        if (p && p->owner == c.name && p->direction != f.direction)
          cs.notes.push_back("failure port '" + ref.str() + "' direction differs from '" +
                             f.traces_to.str() + "'; removed and recreated");
      }
      if (!orphan && f.direction == Direction::kIn)
        for (const auto& [out, def] : c.definitions)
          if (def && LeafNames(*def).count(f.name))
            cs.notes.push_back("logic of '" + c.name + "." + out + "' reads removed inport '" +
                               f.name + "'; reset to undefined");
    }
  }
  std::sort(dead_ports.begin(), dead_ports.end());
  std::sort(dead_components.begin(), dead_components.end());
  for (const QualifiedName& ref : dead_ports)
    emit({ChangeKind::kRemoveFailurePort, ref.str(), {}});
  for (const std::string& name : dead_components)
    emit({ChangeKind::kRemoveSamComponent, name, {}});

  // Creations: components, then ports, then connections.
  for (const Component& c : sm.components()) {
    if (draft.component(c.name)) continue;
    change::CreateComponent payload;
    payload.component.name = c.name;
    if (repo) {
      if (const SamComponent* stored = repo->find(c.name)) {
        payload.component = Instantiate(sm, *stored, c.name, cs.notes);
        payload.repo_key = c.name;
      }
    }
    emit({ChangeKind::kCreateSamComponent, c.name, std::move(payload)});
  }

  for (const Port& p : sm.ports()) {
    if (!Representatives(sm, draft, p.ref()).empty()) continue;
    const SamComponent* owner = draft.component(p.owner);
    std::string name = FreshName(p.name + "_om", [&](const std::string& n) {
      return owner->has_element(n);
    });
    emit({ChangeKind::kCreateFailurePort, QualifiedName{p.owner, name}.str(),
          change::CreatePort{p.direction, p.ref(), kDefaultFailureMode}});
  }

  for (const Connection& con : sm.connections()) {
    auto sources = Representatives(sm, draft, con.source);
    auto targets = Representatives(sm, draft, con.target);
    auto is_source = [&](const QualifiedName& q) {
      return q.component == con.source.component &&
             std::any_of(sources.begin(), sources.end(),
                         [&](const FailurePort* f) { return f->name == q.element; });
    };
    auto is_target = [&](const QualifiedName& q) {
      return q.component == con.target.component &&
             std::any_of(targets.begin(), targets.end(),
                         [&](const FailurePort* f) { return f->name == q.element; });
    };
    bool covered = std::any_of(draft.connections.begin(), draft.connections.end(),
                               [&](const FailureConnection& fc) {
                                 return is_source(fc.source) && is_target(fc.target);
                               });
    if (covered) continue;

    std::vector<std::pair<const FailurePort*, const FailurePort*>> pairs;
    std::map<std::string, const FailurePort*> source_by_mode;
    for (const FailurePort* f : sources) source_by_mode.try_emplace(f->failure_mode, f);
    std::set<std::string> modes_done;
    for (const FailurePort* t : targets) {
      auto it = source_by_mode.find(t->failure_mode);
      if (it != source_by_mode.end() && modes_done.insert(t->failure_mode).second)
        pairs.emplace_back(it->second, t);
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      return a.first->failure_mode < b.first->failure_mode;
    });
    if (pairs.empty()) {
      pairs.emplace_back(sources.front(), targets.front());
      cs.notes.push_back("connection '" + con.name + "': no failure modes match; linked '" +
                         sources.front()->name + "' to '" + targets.front()->name + "'");
    }
    for (const auto& [src, dst] : pairs) {
      std::string name = FreshName(con.name + "_" + src->failure_mode, [&](const std::string& n) {
        return draft.has_connection(n);
      });
      emit({ChangeKind::kCreateFailureConnection, name,
            change::CreateConnection{{con.source.component, src->name},
                                     {con.target.component, dst->name}}});
    }
  }
  return cs;
}

/// Replays @p cs on @p sam. Throws StaleChangeSet if the ChangeSet was
/// planned against another model, InapplicableOp if an op does not apply.
inline SafetyAnalysisModel ApplyChangeSet(const SafetyAnalysisModel& sam, const ChangeSet& cs) {
  if (Fingerprint(sam) != cs.sam_fingerprint)
    throw Error(ErrorCode::kStaleChangeSet,
                "change set was planned for safety model " + cs.sam_fingerprint);
  sync_detail::Draft draft(sam);
  for (const ChangeOp& op : cs.ops) sync_detail::ApplyOp(draft, op);
  return sync_detail::Finish(std::move(draft));
}

struct SyncResult {
  SafetyAnalysisModel model;
  ChangeSet change_set;
};

inline SyncResult Synchronize(const SystemModel& sm, const SafetyAnalysisModel& sam,
                              const RenameHints* hints = nullptr,
                              const ComponentRepository* repo = nullptr) {
  ChangeSet cs = PlanSync(sm, sam, Bind(sm, sam), hints, repo);
  SafetyAnalysisModel model = ApplyChangeSet(sam, cs);
  return {std::move(model), std::move(cs)};
}

}  // namespace insider
