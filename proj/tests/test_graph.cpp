#include <doctest.h>

#include <algorithm>

#include "gfmp/errors.hpp"
#include "gfmp/graph.hpp"
#include "support.hpp"

using namespace gfmp;

namespace {

UndirectedGraph make(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  UndirectedGraph g(n);
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

UndirectedGraph cycle_graph(std::size_t n) {
  UndirectedGraph g(n);
  for (NodeId i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

UndirectedGraph complete_graph(std::size_t n) {
  UndirectedGraph g(n);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

UndirectedGraph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  UndirectedGraph g(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (u(rng) < p) g.add_edge(i, j, u(rng));
  return g;
}

// Shortest cycle by checking, for every edge, the shortest path between its
// endpoints avoiding that edge.
std::size_t naive_girth(const UndirectedGraph& g) {
  std::size_t best = kInfiniteGirth;
  for (NodeId u = 0; u < g.size(); ++u) {
    if (!g.present(u)) continue;
    for (const auto& nb : g.neighbors(u)) {
      const NodeId v = nb.node;
      if (v < u) continue;
      std::vector<std::size_t> dist(g.size(), kInfiniteGirth);
      std::vector<NodeId> queue{u};
      dist[u] = 0;
      for (std::size_t q = 0; q < queue.size(); ++q) {
        const NodeId x = queue[q];
        for (const auto& y : g.neighbors(x)) {
          if ((x == u && y.node == v) || (x == v && y.node == u)) continue;
          if (dist[y.node] == kInfiniteGirth) {
            dist[y.node] = dist[x] + 1;
            queue.push_back(y.node);
          }
        }
      }
      if (dist[v] != kInfiniteGirth) best = std::min(best, dist[v] + 1);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("build_graph") {
  SUBCASE("C3") {
    const auto g = build_graph(testing::cycle(3, 0.3));
    CHECK(g.size() == 3);
    CHECK(g.edge_count() == 3);
    for (NodeId v = 0; v < 3; ++v) CHECK(g.degree(v) == 2);
    CHECK(g.neighbors(0)[0].weight == doctest::Approx(0.3));
  }
  SUBCASE("identity") {
    const auto g = build_graph(GaussianInfoModel({1, 1, 1}, {}, {0, 0, 0}));
    CHECK(g.edge_count() == 0);
  }
  SUBCASE("3x3 grid") {
    const auto g = build_graph(testing::uniform_grid(3, -0.1));
    CHECK(g.size() == 9);
    CHECK(g.edge_count() == 12);
  }
  SUBCASE("zero-weight edges are dropped") {
    const auto g = build_graph(GaussianInfoModel({1, 1, 1}, {{0, 1, 0.0}, {1, 2, -0.2}}, {0, 0, 0}));
    CHECK(g.edge_count() == 1);
    CHECK(g.degree(0) == 0);
  }
}

TEST_CASE("graph mutation") {
  auto g = make(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  CHECK_THROWS_AS(g.add_edge(2, 2), InvalidArgument);
  g.add_edge(1, 0);  // duplicate ignored
  CHECK(g.edge_count() == 4);
  g.remove_node(1);
  CHECK(g.edge_count() == 2);
  CHECK(g.active_count() == 3);
  CHECK_FALSE(g.present(1));
  const NodeId drop[] = {3};
  const auto h = remove_nodes(g, drop);
  CHECK(h.edge_count() == 0);
  CHECK(g.edge_count() == 2);  // original untouched
}

TEST_CASE("is_acyclic and find_cycle") {
  const auto path = make(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  CHECK(is_acyclic(path));
  CHECK(find_cycle(path).empty());
  const auto c4 = cycle_graph(4);
  CHECK_FALSE(is_acyclic(c4));
  auto cyc = find_cycle(c4);
  std::sort(cyc.begin(), cyc.end());
  CHECK(cyc == std::vector<NodeId>{0, 1, 2, 3});
  CHECK(is_acyclic(make(6, {{0, 1}, {1, 2}, {3, 4}, {3, 5}})));
}

TEST_CASE("find_cycle returns a real cycle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_graph(12, 0.2, rng);
    const auto cyc = find_cycle(g);
    CHECK(cyc.empty() == is_acyclic(g));
    if (cyc.empty()) continue;
    CHECK(cyc.size() >= 3);
    auto sorted = cyc;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const NodeId a = cyc[i], b = cyc[(i + 1) % cyc.size()];
      const auto nb = g.neighbors(a);
      CHECK(std::any_of(nb.begin(), nb.end(), [&](const Neighbor& x) { return x.node == b; }));
    }
  }
}

TEST_CASE("girth") {
  CHECK(girth(build_graph(testing::uniform_grid(3, -0.1))) == 4);
  CHECK(girth(cycle_graph(5)) == 5);
  CHECK(girth(make(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}})) == kInfiniteGirth);
  CHECK(girth(UndirectedGraph(3)) == kInfiniteGirth);
  CHECK(girth(complete_graph(4)) == 3);
}

TEST_CASE("girth matches edge-deletion search and never drops under node removal") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = random_graph(14, 0.18, rng);
    const std::size_t gg = girth(g);
    CHECK(gg == naive_girth(g));
    for (NodeId v = 0; v < g.size(); v += 3) {
      const NodeId drop[] = {v};
      CHECK(girth(remove_nodes(g, drop)) >= gg);
    }
  }
}

TEST_CASE("two_core") {
  SUBCASE("tree empties") {
    const auto tc = two_core(make(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}}));
    CHECK(tc.core.active_count() == 0);
    CHECK(tc.removed.size() == 5);
  }
  SUBCASE("C5 with a pendant") {
    const auto g = make(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {2, 5}});
    const auto tc = two_core(g);
    CHECK(tc.removed == std::vector<NodeId>{5});
    CHECK(tc.core.active_count() == 5);
    CHECK(tc.core.edge_count() == 5);
  }
  SUBCASE("C4 unchanged") {
    const auto tc = two_core(cycle_graph(4));
    CHECK(tc.removed.empty());
    CHECK(tc.core.edge_count() == 4);
  }
}

TEST_CASE("brute_force_min_fvs") {
  const auto c4 = brute_force_min_fvs(cycle_graph(4), 3);
  REQUIRE(c4);
  CHECK(c4->nodes == std::vector<NodeId>{0});
  CHECK(c4->is_full_fvs);

  // Removing one node of K4 leaves a triangle; the first size-2 subset works.
  const auto k4 = complete_graph(4);
  for (NodeId v = 0; v < 4; ++v) {
    const NodeId drop[] = {v};
    CHECK_FALSE(is_acyclic(remove_nodes(k4, drop)));
  }
  const auto r = brute_force_min_fvs(k4, 3);
  REQUIRE(r);
  CHECK(r->nodes == std::vector<NodeId>{0, 1});
  CHECK_FALSE(brute_force_min_fvs(k4, 1).has_value());

  const auto tree = brute_force_min_fvs(make(4, {{0, 1}, {1, 2}, {2, 3}}), 2);
  REQUIRE(tree);
  CHECK(tree->nodes.empty());
}

TEST_CASE("greedy_fvs") {
  CHECK(greedy_fvs(cycle_graph(4)).nodes.size() == 1);
  const auto tri = greedy_fvs(make(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}}));
  REQUIRE(tri.nodes.size() == 2);
  CHECK(tri.nodes[0] < 3);
  CHECK(tri.nodes[1] >= 3);
  CHECK(greedy_fvs(make(5, {{0, 1}, {1, 2}, {1, 3}})).nodes.empty());
}

TEST_CASE("greedy_fvs is a full FVS and never beats the exact minimum") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 6 + trial % 10;
    const auto g = random_graph(n, 0.3, rng);
    const auto greedy = greedy_fvs(g);
    CHECK(greedy.is_full_fvs);
    CHECK(is_acyclic(remove_nodes(g, greedy.nodes)));
    const auto exact = brute_force_min_fvs(g, greedy.nodes.size());
    REQUIRE(exact);
    CHECK(exact->is_full_fvs);
    CHECK(is_acyclic(remove_nodes(g, exact->nodes)));
    CHECK(exact->nodes.size() <= greedy.nodes.size());
  }
}

TEST_CASE("select_pseudo_fvs") {
  SUBCASE("weighted C4 picks the heaviest node and stops") {
    const GaussianInfoModel m({1, 1, 1, 1}, {{0, 1, -0.3}, {1, 2, 0.2}, {2, 3, -0.2}, {0, 3, 0.1}}, {0, 0, 0, 0});
    const auto r = select_pseudo_fvs(m, 3);
    CHECK(r.nodes == std::vector<NodeId>{1});
    CHECK(r.is_full_fvs);
    REQUIRE(r.scores.size() == 1);
    CHECK(r.scores[0] == doctest::Approx(0.5));
  }
  SUBCASE("tree gives nothing") {
    const GaussianInfoModel m({1, 1, 1, 1}, {{0, 1, 0.3}, {1, 2, 0.3}, {1, 3, 0.3}}, {0, 0, 0, 0});
    const auto r = select_pseudo_fvs(m, 5);
    CHECK(r.nodes.empty());
    CHECK(r.is_full_fvs);
  }
  SUBCASE("ties go to the lowest index") {
    CHECK(select_pseudo_fvs(testing::cycle(3, 0.3), 1).nodes == std::vector<NodeId>{0});
    CHECK(select_pseudo_fvs(testing::cycle(3, 0.3), 1, SelectionMode::kSmallestScore).nodes ==
          std::vector<NodeId>{0});
  }
  SUBCASE("budget zero") {
    const auto r = select_pseudo_fvs(testing::cycle(4, 0.3), 0);
    CHECK(r.nodes.empty());
    CHECK_FALSE(r.is_full_fvs);
  }
  SUBCASE("requires normalization") {
    CHECK_THROWS_AS(select_pseudo_fvs(GaussianInfoModel({2, 2}, {{0, 1, 0.5}}, {0, 0}), 1), NotNormalized);
  }
}

TEST_CASE("select_pseudo_fvs is prefix-monotone and full sets are acyclic") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + trial;
    const auto m = testing::random_model(n, testing::connected_pairs(n, n, rng), rng, 0.2);
    for (auto mode : {SelectionMode::kLargestScore, SelectionMode::kSmallestScore}) {
      const auto big = select_pseudo_fvs(m, n, mode);
      CHECK(big.is_full_fvs);
      CHECK(is_acyclic(remove_nodes(build_graph(m), big.nodes)));
      for (std::size_t k = 0; k <= big.nodes.size(); ++k) {
        const auto small = select_pseudo_fvs(m, k, mode);
        CHECK(std::equal(small.nodes.begin(), small.nodes.end(), big.nodes.begin()));
        if (small.is_full_fvs) CHECK(is_acyclic(remove_nodes(build_graph(m), small.nodes)));
      }
    }
  }
}
