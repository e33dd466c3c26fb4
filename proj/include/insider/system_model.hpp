#pragma once

/// @file system_model.hpp
/// The system design model: components, directed ports and connections.
///
/// A SystemModel can only be obtained through BuildSystemModel() or
/// ApplySystemEdit(), so every instance satisfies the model invariants:
/// unique names, every port owned by an existing component, connections run
/// from an Out port to an In port of a different component, and no In port
/// has more than one incoming connection. Unconnected ports are legal.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "insider/error.hpp"
#include "insider/names.hpp"

namespace insider {

struct Component {
  std::string name;

  friend auto operator<=>(const Component&, const Component&) = default;
};

struct Port {
  std::string name;
  std::string owner;
  Direction direction = Direction::kIn;

  QualifiedName ref() const { return {owner, name}; }

  friend bool operator==(const Port&, const Port&) = default;
};

struct Connection {
  std::string name;
  QualifiedName source;
  QualifiedName target;

  friend bool operator==(const Connection&, const Connection&) = default;
};

/// Collects every invariant violation in the raw element lists.
inline std::vector<Issue> ValidateSystemModel(const std::vector<Component>& components,
                                              const std::vector<Port>& ports,
                                              const std::vector<Connection>& connections) {
  std::vector<Issue> issues;
  auto report = [&issues](ErrorCode code, std::string message) {
    issues.push_back({code, std::move(message)});
  };

  std::set<std::string> component_names;
  for (const Component& c : components) {
    if (!IsIdentifier(c.name)) {
      report(ErrorCode::kInvalidIdentifier, "component name '" + c.name + "'");
      continue;
    }
    if (!component_names.insert(c.name).second)
      report(ErrorCode::kDuplicateName, "component '" + c.name + "' declared twice");
  }

  std::map<QualifiedName, Direction> port_dirs;
  for (const Port& p : ports) {
    if (!IsIdentifier(p.name)) {
      report(ErrorCode::kInvalidIdentifier, "port name '" + p.name + "'");
      continue;
    }
    if (!component_names.count(p.owner)) {
      report(ErrorCode::kUnknownOwner,
             "port '" + p.name + "' is allocated to unknown component '" + p.owner + "'");
      continue;
    }
    if (!port_dirs.emplace(p.ref(), p.direction).second)
      report(ErrorCode::kDuplicateName, "port '" + p.ref().str() + "' declared twice");
  }

  std::set<std::string> connection_names;
  std::map<QualifiedName, std::string> driver_of;
  for (const Connection& con : connections) {
    if (!IsIdentifier(con.name)) {
      report(ErrorCode::kInvalidIdentifier, "connection name '" + con.name + "'");
      continue;
    }
    if (!connection_names.insert(con.name).second)
      report(ErrorCode::kDuplicateName, "connection '" + con.name + "' declared twice");
    auto src = port_dirs.find(con.source);
    auto dst = port_dirs.find(con.target);
    bool resolved = true;
    if (src == port_dirs.end()) {
      report(ErrorCode::kUnknownPort,
             "connection '" + con.name + "' source '" + con.source.str() + "' does not exist");
      resolved = false;
    }
    if (dst == port_dirs.end()) {
      report(ErrorCode::kUnknownPort,
             "connection '" + con.name + "' target '" + con.target.str() + "' does not exist");
      resolved = false;
    }
    if (!resolved) continue;
    if (src->second != Direction::kOut)
      report(ErrorCode::kDirectionViolation,
             "connection '" + con.name + "' starts at input port '" + con.source.str() + "'");
    if (dst->second != Direction::kIn)
      report(ErrorCode::kDirectionViolation,
             "connection '" + con.name + "' ends at output port '" + con.target.str() + "'");
    if (con.source.component == con.target.component)
      report(ErrorCode::kSelfConnection,
             "connection '" + con.name + "' links component '" + con.source.component +
                 "' to itself");
    auto [it, fresh] = driver_of.emplace(con.target, con.name);
    if (!fresh)
      report(ErrorCode::kMultipleDrivers, "input port '" + con.target.str() +
                                              "' is driven by both '" + it->second +
                                              "' and '" + con.name + "'");
  }
  return issues;
}

class SystemModel {
 public:
  /// The empty model.
  SystemModel() = default;

  const std::vector<Component>& components() const { return components_; }
  const std::vector<Port>& ports() const { return ports_; }
  const std::vector<Connection>& connections() const { return connections_; }

  bool has_component(const std::string& name) const {
    return std::binary_search(components_.begin(), components_.end(), Component{name});
  }

  const Port* find_port(const QualifiedName& ref) const {
    auto it = std::lower_bound(ports_.begin(), ports_.end(), ref,
                               [](const Port& p, const QualifiedName& r) { return p.ref() < r; });
    return it != ports_.end() && it->ref() == ref ? &*it : nullptr;
  }

  const Connection* find_connection(const std::string& name) const {
    auto it = std::find_if(connections_.begin(), connections_.end(),
                           [&](const Connection& c) { return c.name == name; });
    return it != connections_.end() ? &*it : nullptr;
  }

  bool has_connection(const QualifiedName& source, const QualifiedName& target) const {
    return std::any_of(connections_.begin(), connections_.end(), [&](const Connection& c) {
      return c.source == source && c.target == target;
    });
  }

  std::vector<const Port*> ports_of(const std::string& component) const {
    std::vector<const Port*> out;
    for (const Port& p : ports_)
      if (p.owner == component) out.push_back(&p);
    return out;
  }

  /// Accepts `component.port`, or a bare port name when it is unique in the
  /// model. Throws UnknownPort otherwise.
  const Port& resolve_port(const std::string& text) const {
    if (auto ref = QualifiedName::Parse(text)) {
      if (const Port* p = find_port(*ref)) return *p;
    } else {
      const Port* match = nullptr;
      for (const Port& p : ports_) {
        if (p.name != text) continue;
        if (match)
          throw Error(ErrorCode::kUnknownPort,
                      "port name '" + text + "' is ambiguous; qualify it");
        match = &p;
      }
      if (match) return *match;
    }
    throw Error(ErrorCode::kUnknownPort, "port '" + text + "' does not exist");
  }

  friend bool operator==(const SystemModel&, const SystemModel&) = default;

 private:
  friend SystemModel BuildSystemModel(std::vector<Component>, std::vector<Port>,
                                      std::vector<Connection>);

  std::vector<Component> components_;  // sorted by name
  std::vector<Port> ports_;            // sorted by (owner, name)
  std::vector<Connection> connections_;  // sorted by name
};

/// Validates and canonicalizes the element lists. Throws an Error listing
/// every violation.
inline SystemModel BuildSystemModel(std::vector<Component> components, std::vector<Port> ports,
                                    std::vector<Connection> connections) {
  ThrowIfAny(ValidateSystemModel(components, ports, connections));
  SystemModel sm;
  std::sort(components.begin(), components.end());
  std::sort(ports.begin(), ports.end(),
            [](const Port& a, const Port& b) { return a.ref() < b.ref(); });
  std::sort(connections.begin(), connections.end(),
            [](const Connection& a, const Connection& b) { return a.name < b.name; });
  sm.components_ = std::move(components);
  sm.ports_ = std::move(ports);
  sm.connections_ = std::move(connections);
  return sm;
}

/// The allocation of a port to its owning component.
inline const std::string& PortOwner(const SystemModel& sm, const std::string& port) {
  return sm.resolve_port(port).owner;
}

// Edits ----------------------------------------------------------------------

namespace edit {

struct AddComponent { std::string name; };
/// Also removes the component's ports and every connection touching them.
struct RemoveComponent { std::string name; };
struct AddPort { Port port; };
/// Also removes connections touching the port.
struct RemovePort { QualifiedName port; };
struct AddConnection { Connection connection; };
struct RemoveConnection { std::string name; };

enum class ElementKind { kComponent, kPort, kConnection };

/// Renames a component (target = name), a port (target = `component.port`)
/// or a connection (target = name). new_name is always a plain identifier;
/// references are rewritten.
struct Rename {
  ElementKind kind;
  std::string target;
  std::string new_name;
};

}  // namespace edit

using SystemEdit = std::variant<edit::AddComponent, edit::RemoveComponent, edit::AddPort,
                                edit::RemovePort, edit::AddConnection, edit::RemoveConnection,
                                edit::Rename>;

namespace detail {

inline void RenameRef(QualifiedName& ref, const QualifiedName& from, const QualifiedName& to) {
  if (ref == from) ref = to;
}

}  // namespace detail

/// Returns the model with @p change applied.
///
/// Throws UnknownTarget when a removed or renamed element is missing,
/// NameCollision when an added or renamed element clashes with an existing
/// one, and WouldViolateInvariant (carrying the underlying issues) when the
/// result would be invalid.
inline SystemModel ApplySystemEdit(const SystemModel& sm, const SystemEdit& change) {
  std::vector<Component> components = sm.components();
  std::vector<Port> ports = sm.ports();
  std::vector<Connection> connections = sm.connections();

  auto unknown = [](const std::string& what) {
    return Error(ErrorCode::kUnknownTarget, what + " does not exist");
  };
  auto collision = [](const std::string& what) {
    return Error(ErrorCode::kNameCollision, what + " already exists");
  };

  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, edit::AddComponent>) {
          if (sm.has_component(e.name)) throw collision("component '" + e.name + "'");
          components.push_back({e.name});
        } else if constexpr (std::is_same_v<E, edit::RemoveComponent>) {
          if (!sm.has_component(e.name)) throw unknown("component '" + e.name + "'");
          std::erase_if(components, [&](const Component& c) { return c.name == e.name; });
          std::erase_if(ports, [&](const Port& p) { return p.owner == e.name; });
          std::erase_if(connections, [&](const Connection& c) {
            return c.source.component == e.name || c.target.component == e.name;
          });
        } else if constexpr (std::is_same_v<E, edit::AddPort>) {
          if (sm.find_port(e.port.ref())) throw collision("port '" + e.port.ref().str() + "'");
          ports.push_back(e.port);
        } else if constexpr (std::is_same_v<E, edit::RemovePort>) {
          if (!sm.find_port(e.port)) throw unknown("port '" + e.port.str() + "'");
          std::erase_if(ports, [&](const Port& p) { return p.ref() == e.port; });
          std::erase_if(connections, [&](const Connection& c) {
            return c.source == e.port || c.target == e.port;
          });
        } else if constexpr (std::is_same_v<E, edit::AddConnection>) {
          if (sm.find_connection(e.connection.name))
            throw collision("connection '" + e.connection.name + "'");
          connections.push_back(e.connection);
        } else if constexpr (std::is_same_v<E, edit::RemoveConnection>) {
          if (!sm.find_connection(e.name)) throw unknown("connection '" + e.name + "'");
          std::erase_if(connections, [&](const Connection& c) { return c.name == e.name; });
        } else if constexpr (std::is_same_v<E, edit::Rename>) {
          if (!IsIdentifier(e.new_name))
            throw Error(ErrorCode::kInvalidIdentifier, "new name '" + e.new_name + "'");
          switch (e.kind) {
            case edit::ElementKind::kComponent: {
              if (!sm.has_component(e.target)) throw unknown("component '" + e.target + "'");
              if (e.target == e.new_name) return;
              if (sm.has_component(e.new_name))
                throw collision("component '" + e.new_name + "'");
              for (Component& c : components)
                if (c.name == e.target) c.name = e.new_name;
              for (Port& p : ports)
                if (p.owner == e.target) p.owner = e.new_name;
              for (Connection& c : connections) {
                if (c.source.component == e.target) c.source.component = e.new_name;
                if (c.target.component == e.target) c.target.component = e.new_name;
              }
              break;
            }
            case edit::ElementKind::kPort: {
              auto from = QualifiedName::Parse(e.target);
              if (!from || !sm.find_port(*from)) throw unknown("port '" + e.target + "'");
              QualifiedName to{from->component, e.new_name};
              if (*from == to) return;
              if (sm.find_port(to)) throw collision("port '" + to.str() + "'");
              for (Port& p : ports)
                if (p.ref() == *from) p.name = e.new_name;
              for (Connection& c : connections) {
                detail::RenameRef(c.source, *from, to);
                detail::RenameRef(c.target, *from, to);
              }
              break;
            }
            case edit::ElementKind::kConnection: {
              if (!sm.find_connection(e.target)) throw unknown("connection '" + e.target + "'");
              if (e.target == e.new_name) return;
              if (sm.find_connection(e.new_name))
                throw collision("connection '" + e.new_name + "'");
              for (Connection& c : connections)
                if (c.name == e.target) c.name = e.new_name;
              break;
            }
          }
        }
      },
      change);

  auto issues = ValidateSystemModel(components, ports, connections);
  if (!issues.empty()) {
    std::vector<Issue> wrapped{{ErrorCode::kWouldViolateInvariant, "edit rejected"}};
    wrapped.insert(wrapped.end(), issues.begin(), issues.end());
    throw Error(std::move(wrapped));
  }
  return BuildSystemModel(std::move(components), std::move(ports), std::move(connections));
}

}  // namespace insider
