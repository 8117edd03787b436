#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "gfmp/model.hpp"

namespace gfmp {

/// Undirected simple graph with nonnegative edge weights |J_ij|. Node ids are
/// stable: removing a node drops its edges but keeps the index space.
class UndirectedGraph {
public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(std::size_t n) : adj_(n), present_(n, true) {}

  /// Adds {u, v}; throws on self-loops. Duplicate edges are ignored.
  void add_edge(NodeId u, NodeId v, double weight = 1.0);
  /// Drops v and all incident edges.
  void remove_node(NodeId v);

  std::size_t size() const noexcept { return adj_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }
  /// Number of nodes not removed.
  std::size_t active_count() const noexcept;
  bool present(NodeId v) const { return present_[v]; }
  std::span<const Neighbor> neighbors(NodeId v) const { return adj_[v]; }
  std::size_t degree(NodeId v) const { return adj_[v].size(); }

private:
  std::vector<std::vector<Neighbor>> adj_;
  std::vector<bool> present_;
  std::size_t edges_ = 0;
};

/// One edge per nonzero stored model edge, weighted by |J_ij|.
UndirectedGraph build_graph(const GaussianInfoModel& model);

/// Copy of g without the listed nodes.
UndirectedGraph remove_nodes(const UndirectedGraph& g, std::span<const NodeId> nodes);

bool is_acyclic(const UndirectedGraph& g);

/// Node sequence of some cycle (first vertex not repeated), or empty.
std::vector<NodeId> find_cycle(const UndirectedGraph& g);

inline constexpr std::size_t kInfiniteGirth = std::numeric_limits<std::size_t>::max();

/// Length of the shortest cycle, kInfiniteGirth for forests.
std::size_t girth(const UndirectedGraph& g);

struct TwoCore {
  UndirectedGraph core;
  std::vector<NodeId> removed;  // in peeling order
};

/// Repeatedly strips nodes of degree <= 1.
TwoCore two_core(const UndirectedGraph& g);

struct FvsResult {
  std::vector<NodeId> nodes;
  bool is_full_fvs = false;
  std::vector<double> scores;
};

/// Minimum-cardinality FVS by enumerating subsets of increasing size
/// (lexicographic within a size). Returns std::nullopt when none of size
/// <= max_k exists.
std::optional<FvsResult> brute_force_min_fvs(const UndirectedGraph& g, std::size_t max_k);

/// Peel to the 2-core, remove the highest-degree node, repeat.
FvsResult greedy_fvs(const UndirectedGraph& g);

enum class SelectionMode {
  kLargestScore,   // the pseudo-FVS criterion
  kSmallestScore,  // "bad selection" control
};

/// Pseudo-FVS of at most k nodes: each round strips tree branches, rescores
/// s(i) = sum_{j in N(i)} |J_ij| on what remains and takes the extreme node.
/// Ties go to the lowest index. Requires a normalized model.
FvsResult select_pseudo_fvs(const GaussianInfoModel& model, std::size_t k,
                            SelectionMode mode = SelectionMode::kLargestScore);

}  // namespace gfmp
