#pragma once

// Seeded random model generation for grid and Erdős–Rényi experiments.
//
// Random numbers come from keyed SplitMix64 substreams: the value used for
// an edge {i, j} (i < j) depends only on (seed, purpose, i, j), and the value
// for a node potential only on (seed, purpose, i). Growing a model therefore
// never changes the draws of pairs it already had.

#include <cstdint>
#include <optional>
#include <utility>

#include "gfmp/model.hpp"

namespace gfmp {

/// SplitMix64 stream whose starting state is derived from a key.
class Substream {
public:
  Substream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t a, std::uint64_t b = 0);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::uint64_t state_;
};

enum class Topology { kGrid, kErdosRenyi };

struct GenSpec {
  Topology topology = Topology::kGrid;
  std::size_t side = 0;   // grid: l, giving n = l*l
  std::size_t nodes = 0;  // ER: n
  double c = 0.0;         // ER: edge probability c/n
  std::uint64_t seed = 0;
  double delta = 0.1;  // margin added on top of |λ_min(J0)|
  /// When set, delta is bisected until ρ(R̄) lies strictly inside.
  std::optional<std::pair<double, double>> target_rho;
  /// Draw off-diagonals from [-1, 0] (all partial correlations >= 0).
  bool attractive = false;

  static GenSpec grid(std::size_t side, std::uint64_t seed) {
    GenSpec s;
    s.topology = Topology::kGrid;
    s.side = side;
    s.seed = seed;
    return s;
  }
  static GenSpec erdos_renyi(std::size_t nodes, double c, std::uint64_t seed) {
    GenSpec s;
    s.topology = Topology::kErdosRenyi;
    s.nodes = nodes;
    s.c = c;
    s.seed = seed;
    return s;
  }
};

/// l x l 4-neighbor grid, off-diagonals i.i.d. uniform on [-1, 1], h uniform
/// on [-1, 1], diagonal shifted to |λ_min(J0)| + delta, then normalized.
GaussianInfoModel gen_grid(const GenSpec& spec);

/// G(n, c/n) with the same weight, potential and shift rules as gen_grid.
GaussianInfoModel gen_er(const GenSpec& spec);

GaussianInfoModel generate(const GenSpec& spec);

}  // namespace gfmp
