#pragma once

/// @file propagation_graph.hpp
/// Failure propagation graph of a safety model and its cycles.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "insider/safety_model.hpp"

namespace insider {

/// Directed graph over events and failure ports, keyed by qualified name.
/// There is an edge u -> v when u occurs in the definition of v, or a
/// failure connection runs from u to v.
class PropagationGraph {
 public:
  const std::vector<std::string>& nodes() const { return nodes_; }

  const std::vector<std::size_t>& successors(std::size_t node) const { return succ_[node]; }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), name);
    if (it == nodes_.end() || *it != name) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  bool has_edge(const std::string& from, const std::string& to) const {
    auto u = index_of(from), v = index_of(to);
    if (!u || !v) return false;
    const auto& s = succ_[*u];
    return std::find(s.begin(), s.end(), *v) != s.end();
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& s : succ_) n += s.size();
    return n;
  }

  /// Strongly connected components with more than one node, plus single
  /// nodes with a self-loop. Each cycle is sorted; the list is sorted too.
  const std::vector<std::vector<std::string>>& cycles() const { return cycles_; }

  bool acyclic() const { return cycles_.empty(); }

  /// Kahn's algorithm with name order as the tie break; nullopt if cyclic.
  std::optional<std::vector<std::string>> topological_order() const {
    std::vector<std::size_t> indegree(nodes_.size(), 0);
    for (const auto& s : succ_)
      for (std::size_t v : s) ++indegree[v];
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (indegree[i] == 0) ready.push(i);
    std::vector<std::string> order;
    while (!ready.empty()) {
      std::size_t u = ready.top();
      ready.pop();
      order.push_back(nodes_[u]);
      for (std::size_t v : succ_[u])
        if (--indegree[v] == 0) ready.push(v);
    }
    if (order.size() != nodes_.size()) return std::nullopt;
    return order;
  }

 private:
  friend PropagationGraph BuildPropagationGraph(const SafetyAnalysisModel&);

  void FindCycles() {
    // Tarjan's SCC algorithm.
    const std::size_t n = nodes_.size();
    std::vector<long> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    long counter = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t u) {
      index[u] = low[u] = counter++;
      stack.push_back(u);
      on_stack[u] = true;
      for (std::size_t v : succ_[u]) {
        if (index[v] < 0) {
          visit(v);
          low[u] = std::min(low[u], low[v]);
        } else if (on_stack[v]) {
          low[u] = std::min(low[u], index[v]);
        }
      }
      if (low[u] != index[u]) return;
      std::vector<std::string> scc;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        scc.push_back(nodes_[w]);
      } while (w != u);
      bool self_loop = std::find(succ_[u].begin(), succ_[u].end(), u) != succ_[u].end();
      if (scc.size() > 1 || self_loop) {
        std::sort(scc.begin(), scc.end());
        cycles_.push_back(std::move(scc));
      }
    };
    for (std::size_t i = 0; i < n; ++i)
      if (index[i] < 0) visit(i);
    std::sort(cycles_.begin(), cycles_.end());
  }

  std::vector<std::string> nodes_;  // sorted
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::vector<std::string>> cycles_;
};

inline PropagationGraph BuildPropagationGraph(const SafetyAnalysisModel& sam) {
  PropagationGraph g;
  std::set<std::pair<std::string, std::string>> edges;
  for (const SamComponent& c : sam.components()) {
    for (const BasicEvent& e : c.events) g.nodes_.push_back(c.name + "." + e.name);
    for (const FailurePort& p : c.failure_ports) g.nodes_.push_back(c.name + "." + p.name);
    for (const auto& [out, def] : c.definitions) {
      if (!def) continue;
      for (const std::string& leaf : LeafNames(*def))
        edges.emplace(c.name + "." + leaf, c.name + "." + out);
    }
  }
  for (const FailureConnection& fc : sam.failure_connections())
    edges.emplace(fc.source.str(), fc.target.str());

  std::sort(g.nodes_.begin(), g.nodes_.end());
  g.succ_.resize(g.nodes_.size());
  for (const auto& [from, to] : edges) {
    auto u = g.index_of(from), v = g.index_of(to);
    if (u && v) g.succ_[*u].push_back(*v);
  }
  g.FindCycles();
  return g;
}

}  // namespace insider
