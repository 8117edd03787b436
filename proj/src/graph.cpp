#include "gfmp/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "gfmp/errors.hpp"

namespace gfmp {

namespace {

bool by_node(const Neighbor& a, const Neighbor& b) { return a.node < b.node; }

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

private:
  std::vector<std::size_t> parent_;
};

}  // namespace

void UndirectedGraph::add_edge(NodeId u, NodeId v, double weight) {
  if (u == v) throw InvalidArgument("self-loop at node " + std::to_string(u));
  if (u >= size() || v >= size()) throw InvalidArgument("edge endpoint out of range");
  auto& au = adj_[u];
  auto it = std::lower_bound(au.begin(), au.end(), Neighbor{v, 0.0}, by_node);
  if (it != au.end() && it->node == v) return;
  au.insert(it, {v, weight});
  auto& av = adj_[v];
  av.insert(std::lower_bound(av.begin(), av.end(), Neighbor{u, 0.0}, by_node), {u, weight});
  ++edges_;
}

void UndirectedGraph::remove_node(NodeId v) {
  if (!present_[v]) return;
  for (const auto& nb : adj_[v]) {
    auto& other = adj_[nb.node];
    other.erase(std::lower_bound(other.begin(), other.end(), Neighbor{v, 0.0}, by_node));
  }
  edges_ -= adj_[v].size();
  adj_[v].clear();
  present_[v] = false;
}

std::size_t UndirectedGraph::active_count() const noexcept {
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), true));
}

UndirectedGraph build_graph(const GaussianInfoModel& model) {
  UndirectedGraph g(model.size());
  for (const auto& e : model.edges()) {
    if (e.weight != 0.0) g.add_edge(e.i, e.j, std::abs(e.weight));
  }
  return g;
}

UndirectedGraph remove_nodes(const UndirectedGraph& g, std::span<const NodeId> nodes) {
  UndirectedGraph out = g;
  for (auto v : nodes) {
    if (v >= g.size()) throw InvalidArgument("node " + std::to_string(v) + " out of range");
    out.remove_node(v);
  }
  return out;
}

bool is_acyclic(const UndirectedGraph& g) {
  DisjointSets sets(g.size());
  for (NodeId u = 0; u < g.size(); ++u) {
    for (const auto& nb : g.neighbors(u)) {
      if (nb.node > u && !sets.unite(u, nb.node)) return false;
    }
  }
  return true;
}

std::vector<NodeId> find_cycle(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(n, none), depth(n, none);
  std::vector<std::pair<NodeId, std::size_t>> stack;  // (node, next neighbor slot)
  for (NodeId root = 0; root < n; ++root) {
    if (depth[root] != none) continue;
    depth[root] = 0;
    stack.push_back({root, 0});
    while (!stack.empty()) {
      auto& [u, slot] = stack.back();
      auto nbrs = g.neighbors(u);
      if (slot == nbrs.size()) {
        stack.pop_back();
        continue;
      }
      const NodeId v = nbrs[slot++].node;
      if (v == parent[u]) continue;
      if (depth[v] == none) {
        parent[v] = u;
        depth[v] = depth[u] + 1;
        stack.push_back({v, 0});
      } else if (depth[v] < depth[u]) {
        std::vector<NodeId> cycle;
        for (NodeId w = u; w != v; w = parent[w]) cycle.push_back(w);
        cycle.push_back(v);
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
    }
  }
  return {};
}

std::size_t girth(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::size_t best = kInfiniteGirth;
  std::vector<std::size_t> dist(n, none), parent(n, none);
  std::vector<NodeId> touched;
  std::deque<NodeId> queue;
  for (NodeId root = 0; root < n; ++root) {
    if (g.degree(root) < 2) continue;
    for (auto v : touched) dist[v] = parent[v] = none;
    touched.clear();
    queue.clear();
    dist[root] = 0;
    touched.push_back(root);
    queue.push_back(root);
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      // Any cycle found from here on is at least 2*dist[u]+1 long.
      if (best != kInfiniteGirth && 2 * dist[u] + 1 >= best) break;
      for (const auto& nb : g.neighbors(u)) {
        const NodeId v = nb.node;
        if (dist[v] == none) {
          dist[v] = dist[u] + 1;
          parent[v] = u;
          touched.push_back(v);
          queue.push_back(v);
        } else if (v != parent[u]) {
          best = std::min(best, dist[u] + dist[v] + 1);
        }
      }
    }
  }
  return best;
}

TwoCore two_core(const UndirectedGraph& g) {
  TwoCore out{g, {}};
  std::deque<NodeId> queue;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (g.present(v) && g.degree(v) <= 1) queue.push_back(v);
  }
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    if (!out.core.present(v)) continue;
    std::vector<NodeId> nbrs;
    for (const auto& nb : out.core.neighbors(v)) nbrs.push_back(nb.node);
    out.core.remove_node(v);
    out.removed.push_back(v);
    for (auto u : nbrs) {
      if (out.core.degree(u) == 1) queue.push_back(u);
    }
  }
  return out;
}

std::optional<FvsResult> brute_force_min_fvs(const UndirectedGraph& g, std::size_t max_k) {
  // A minimum FVS never contains a node outside the 2-core.
  const TwoCore tc = two_core(g);
  std::vector<NodeId> candidates;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (tc.core.present(v)) candidates.push_back(v);
  }
  const std::size_t limit = std::min(max_k, candidates.size());
  for (std::size_t size = 0; size <= limit; ++size) {
    std::vector<std::size_t> pick(size);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      UndirectedGraph rest = tc.core;
      std::vector<NodeId> chosen;
      for (auto idx : pick) {
        chosen.push_back(candidates[idx]);
        rest.remove_node(candidates[idx]);
      }
      if (is_acyclic(rest)) {
        return FvsResult{chosen, true, std::vector<double>(size, 0.0)};
      }
      // Next combination in lexicographic order.
      std::size_t pos = size;
      while (pos > 0 && pick[pos - 1] == candidates.size() - size + pos - 1) --pos;
      if (pos == 0) break;
      ++pick[pos - 1];
      for (std::size_t q = pos; q < size; ++q) pick[q] = pick[q - 1] + 1;
    }
  }
  return std::nullopt;
}

FvsResult greedy_fvs(const UndirectedGraph& g) {
  FvsResult out;
  UndirectedGraph current = g;
  while (true) {
    TwoCore tc = two_core(current);
    if (tc.core.edge_count() == 0) break;
    NodeId best = 0;
    std::size_t best_deg = 0;
    for (NodeId v = 0; v < tc.core.size(); ++v) {
      if (tc.core.degree(v) > best_deg) {
        best = v;
        best_deg = tc.core.degree(v);
      }
    }
    out.nodes.push_back(best);
    out.scores.push_back(static_cast<double>(best_deg));
    current = std::move(tc.core);
    current.remove_node(best);
  }
  out.is_full_fvs = true;
  return out;
}

FvsResult select_pseudo_fvs(const GaussianInfoModel& model, std::size_t k, SelectionMode mode) {
  if (!model.is_normalized()) throw NotNormalized();
  FvsResult out;
  UndirectedGraph current = build_graph(model);
  while (out.nodes.size() < k) {
    TwoCore tc = two_core(current);
    if (tc.core.edge_count() == 0) break;
    bool found = false;
    NodeId pick = 0;
    double pick_score = 0.0;
    for (NodeId v = 0; v < tc.core.size(); ++v) {
      if (tc.core.degree(v) == 0) continue;
      double s = 0.0;
      for (const auto& nb : tc.core.neighbors(v)) s += nb.weight;
      const bool better = mode == SelectionMode::kLargestScore ? s > pick_score : s < pick_score;
      if (!found || better) {
        found = true;
        pick = v;
        pick_score = s;
      }
    }
    out.nodes.push_back(pick);
    out.scores.push_back(pick_score);
    current = std::move(tc.core);
    current.remove_node(pick);
  }
  out.is_full_fvs = is_acyclic(current);
  return out;
}

}  // namespace gfmp
