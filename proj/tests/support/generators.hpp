#pragma once

// Seeded random generators for property tests.

#include <random>
#include <string>
#include <vector>

#include "insider/insider.hpp"

namespace insider::testing {

using Rng = std::mt19937_64;

inline bool Coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline std::size_t Pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// Random gate tree over @p leaves; negation only when @p allow_not.
inline Expr RandomExpr(Rng& rng, const std::vector<Expr>& leaves, int depth, bool allow_not) {
  if (depth == 0 || leaves.size() == 1 || Coin(rng, 0.3)) {
    Expr leaf = leaves[Pick(rng, leaves.size())];
    if (allow_not && Coin(rng, 0.15)) return Expr::Not(leaf);
    return leaf;
  }
  if (allow_not && Coin(rng, 0.1)) return Expr::Not(RandomExpr(rng, leaves, depth - 1, allow_not));
  std::vector<Expr> args;
  std::size_t n = 2 + Pick(rng, 2);
  for (std::size_t i = 0; i < n; ++i) args.push_back(RandomExpr(rng, leaves, depth - 1, allow_not));
  return Coin(rng, 0.5) ? Expr::And(std::move(args)) : Expr::Or(std::move(args));
}

/// Up to @p max_components components and @p max_ports ports; about half of
/// the inports are driven.
inline SystemModel RandomSystemModel(Rng& rng, std::size_t max_components = 10,
                                     std::size_t max_ports = 30) {
  std::vector<Component> components;
  std::vector<Port> ports;
  std::vector<Connection> connections;
  std::size_t nc = Pick(rng, max_components + 1);
  for (std::size_t i = 0; i < nc; ++i) components.push_back({"c" + std::to_string(i)});
  if (nc == 0) return BuildSystemModel({}, {}, {});
  std::size_t np = Pick(rng, max_ports + 1);
  for (std::size_t j = 0; j < np; ++j)
    ports.push_back({"p" + std::to_string(j), components[Pick(rng, nc)].name,
                     Coin(rng, 0.5) ? Direction::kIn : Direction::kOut});
  std::size_t k = 0;
  for (const Port& in : ports) {
    if (in.direction != Direction::kIn || !Coin(rng, 0.6)) continue;
    std::vector<const Port*> sources;
    for (const Port& out : ports)
      if (out.direction == Direction::kOut && out.owner != in.owner) sources.push_back(&out);
    if (sources.empty()) continue;
    const Port* src = sources[Pick(rng, sources.size())];
    connections.push_back({"n" + std::to_string(k++), src->ref(), in.ref()});
  }
  return BuildSystemModel(std::move(components), std::move(ports), std::move(connections));
}

/// A safety model that partially matches @p sm: missing and orphan
/// components, missing, dangling, misdirected and foreign failure ports,
/// undefined logic, and both backed and unbacked failure connections.
inline SafetyAnalysisModel RandomSafetyModel(Rng& rng, const SystemModel& sm) {
  static const char* kModes[] = {"omission", "commission", "value"};
  std::vector<SamComponent> components;
  std::vector<std::string> names;
  for (const Component& c : sm.components())
    if (Coin(rng, 0.7)) names.push_back(c.name);
  for (int i = 0; i < 2; ++i)
    if (Coin(rng, 0.3)) names.push_back("x" + std::to_string(i));

  for (const std::string& name : names) {
    SamComponent c;
    c.name = name;
    std::size_t ne = Pick(rng, 4);
    for (std::size_t i = 0; i < ne; ++i) c.events.push_back({"e" + std::to_string(i), std::nullopt});
    std::size_t fp = 0;
    auto add_port = [&](Direction d, QualifiedName traces, const std::string& mode) {
      for (const FailurePort& f : c.failure_ports)
        if (f.traces_to == traces && f.failure_mode == mode) return;
      c.failure_ports.push_back({"f" + std::to_string(fp++), d, traces, mode});
    };
    for (const Port* p : sm.ports_of(name)) {
      if (!Coin(rng, 0.7)) continue;
      std::size_t copies = 1 + Pick(rng, 2);
      for (std::size_t i = 0; i < copies; ++i) {
        Direction d = p->direction;
        if (Coin(rng, 0.08)) d = d == Direction::kIn ? Direction::kOut : Direction::kIn;
        add_port(d, p->ref(), kModes[Pick(rng, 3)]);
      }
    }
    if (Coin(rng, 0.2))
      add_port(Coin(rng, 0.5) ? Direction::kIn : Direction::kOut, {name, "ghost"}, "omission");
    if (Coin(rng, 0.1) && !sm.ports().empty()) {
      const Port& foreign = sm.ports()[Pick(rng, sm.ports().size())];
      add_port(foreign.direction, foreign.ref(), "value");
    }
    std::vector<Expr> leaves;
    for (const BasicEvent& e : c.events) leaves.push_back(Expr::Event(e.name));
    for (const FailurePort& f : c.failure_ports)
      if (f.direction == Direction::kIn) leaves.push_back(Expr::Input(f.name));
    for (const FailurePort& f : c.failure_ports) {
      if (f.direction != Direction::kOut) continue;
      if (!leaves.empty() && Coin(rng, 0.8))
        c.definitions[f.name] = RandomExpr(rng, leaves, 2, true);
      else
        c.definitions[f.name] = std::nullopt;
    }
    components.push_back(std::move(c));
  }

  std::vector<QualifiedName> outs, ins;
  for (const SamComponent& c : components)
    for (const FailurePort& f : c.failure_ports)
      (f.direction == Direction::kOut ? outs : ins).push_back({c.name, f.name});
  std::vector<FailureConnection> connections;
  std::set<QualifiedName> driven;
  std::size_t k = 0;
  auto connect = [&](const QualifiedName& src, const QualifiedName& dst) {
    if (src.component == dst.component || driven.count(dst)) return;
    driven.insert(dst);
    connections.push_back({"fc" + std::to_string(k++), src, dst});
  };
  // Mirror some system connections, then add noise.
  for (const Connection& con : sm.connections()) {
    if (!Coin(rng, 0.6)) continue;
    for (const SamComponent& c : components) {
      if (c.name != con.source.component) continue;
      for (const FailurePort& f : c.failure_ports) {
        if (f.traces_to != con.source || f.direction != Direction::kOut) continue;
        for (const QualifiedName& in : ins) {
          const SamComponent* tc = nullptr;
          for (const SamComponent& t : components)
            if (t.name == in.component) tc = &t;
          const FailurePort* tf = tc->find_port(in.element);
          if (tf->traces_to == con.target) connect({c.name, f.name}, in);
        }
      }
    }
  }
  if (!outs.empty() && !ins.empty()) {
    std::size_t noise = Pick(rng, 4);
    for (std::size_t i = 0; i < noise; ++i) connect(outs[Pick(rng, outs.size())], ins[Pick(rng, ins.size())]);
  }
  return BuildSafetyModel(std::move(components), std::move(connections));
}

/// An acyclic, fully defined safety model whose flattened trees have at
/// most @p max_leaves distinct leaves in total. Failure connections only
/// run from lower- to higher-numbered components.
inline SafetyAnalysisModel RandomAcyclicSafetyModel(Rng& rng, std::size_t max_leaves = 12,
                                                    bool allow_not = true) {
  for (;;) {
    std::vector<SamComponent> components;
    std::size_t nc = 1 + Pick(rng, 4);
    for (std::size_t i = 0; i < nc; ++i) {
      SamComponent c;
      c.name = "k" + std::to_string(i);
      std::size_t ne = 1 + Pick(rng, 3), ni = Pick(rng, 3), no = 1 + Pick(rng, 2);
      for (std::size_t e = 0; e < ne; ++e) c.events.push_back({"e" + std::to_string(e), std::nullopt});
      for (std::size_t p = 0; p < ni; ++p)
        c.failure_ports.push_back({"i" + std::to_string(p), Direction::kIn,
                                   {c.name, "pi" + std::to_string(p)}, "omission"});
      for (std::size_t p = 0; p < no; ++p)
        c.failure_ports.push_back({"o" + std::to_string(p), Direction::kOut,
                                   {c.name, "po" + std::to_string(p)}, "omission"});
      std::vector<Expr> leaves;
      for (const BasicEvent& e : c.events) leaves.push_back(Expr::Event(e.name));
      for (std::size_t p = 0; p < ni; ++p) leaves.push_back(Expr::Input("i" + std::to_string(p)));
      for (std::size_t p = 0; p < no; ++p)
        c.definitions["o" + std::to_string(p)] = RandomExpr(rng, leaves, 3, allow_not);
      components.push_back(std::move(c));
    }
    std::vector<FailureConnection> connections;
    std::size_t leaf_count = 0, k = 0;
    for (std::size_t j = 0; j < nc; ++j) {
      leaf_count += components[j].events.size();
      for (const FailurePort& f : components[j].failure_ports) {
        if (f.direction != Direction::kIn) continue;
        if (j > 0 && Coin(rng, 0.6)) {
          const SamComponent& src = components[Pick(rng, j)];
          std::vector<std::string> outs;
          for (const FailurePort& o : src.failure_ports)
            if (o.direction == Direction::kOut) outs.push_back(o.name);
          connections.push_back({"l" + std::to_string(k++), {src.name, outs[Pick(rng, outs.size())]},
                                 {components[j].name, f.name}});
        } else {
          ++leaf_count;
        }
      }
    }
    if (leaf_count <= max_leaves)
      return BuildSafetyModel(std::move(components), std::move(connections));
  }
}

/// Every event and undriven inport of @p sam, qualified.
inline std::vector<std::string> AllLeaves(const SafetyAnalysisModel& sam) {
  std::vector<std::string> out;
  for (const SamComponent& c : sam.components()) {
    for (const BasicEvent& e : c.events) out.push_back(c.name + "." + e.name);
    for (const FailurePort& f : c.failure_ports)
      if (f.direction == Direction::kIn && !sam.connection_into({c.name, f.name}))
        out.push_back(c.name + "." + f.name);
  }
  return out;
}

}  // namespace insider::testing
