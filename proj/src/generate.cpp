#include "gfmp/generate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gfmp/analysis.hpp"
#include "gfmp/errors.hpp"

namespace gfmp {

namespace {

constexpr std::uint64_t kEdgeWeight = 1;
constexpr std::uint64_t kEdgePresence = 2;
constexpr std::uint64_t kPotential = 3;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double edge_weight(const GenSpec& spec, NodeId i, NodeId j) {
  Substream s(spec.seed, kEdgeWeight, i, j);
  return spec.attractive ? -s.uniform() : s.uniform(-1.0, 1.0);
}

// Shifts J0 to positive definiteness, picks the margin and normalizes.
GaussianInfoModel finish(const GenSpec& spec, std::size_t n, std::vector<Edge> edges) {
  if (!(spec.delta > 0.0)) throw InvalidArgument("delta must be positive");
  Vector h(n);
  for (NodeId i = 0; i < n; ++i) h[i] = Substream(spec.seed, kPotential, i).uniform(-1.0, 1.0);

  const GaussianInfoModel j0(Vector(n, 0.0), edges, h);
  const double lambda_min = min_eigenvalue(j0);
  const double base = std::max(0.0, -lambda_min);

  double delta = spec.delta;
  if (spec.target_rho) {
    const auto [lo, hi] = *spec.target_rho;
    if (!(lo < hi)) throw InvalidArgument("target interval needs lower < upper");
    // After shifting by base + delta and normalizing, ρ(R̄) = ρ(|J0|) / (base + delta).
    const double rho0 = spectral_radius_nonnegative(build_graph(j0)).value;
    auto rho_at = [&](double d) { return rho0 / (base + d); };
    const double rho_max = base > 0.0 ? rho0 / base : (rho0 > 0.0 ? INFINITY : 0.0);
    if (!(rho_max > lo)) {
      std::ostringstream msg;
      msg << "target rho (" << lo << ", " << hi << ") unreachable: achievable range is (0, " << rho_max << ")";
      throw InvalidArgument(msg.str());
    }
    // Aim at the middle of the reachable part so delta stays clear of zero.
    const double mid = 0.5 * (lo + std::min(hi, rho_max));
    double a = 0.0, b = 1.0;
    while (rho_at(b) > mid) b *= 2.0;
    for (int step = 0; step < 60; ++step) {
      const double m = 0.5 * (a + b);
      (rho_at(m) > mid ? a : b) = m;
    }
    const double rb = rho_at(b);
    if (rb > lo && rb < hi) {
      delta = b;
    } else if (a > 0.0 && rho_at(a) > lo && rho_at(a) < hi) {
      delta = a;
    } else {
      std::ostringstream msg;
      msg << "target rho (" << lo << ", " << hi << ") unreachable after bisection: achievable range is (0, "
          << rho_max << ")";
      throw InvalidArgument(msg.str());
    }
  }

  const double lambda = base + delta;
  GaussianInfoModel shifted(Vector(n, lambda), std::move(edges), std::move(h));
  GaussianInfoModel model = normalize(shifted).model;
  if (spec.target_rho) {
    const double rho = spectral_radius_abs(model).value;
    if (!(rho > spec.target_rho->first && rho < spec.target_rho->second)) {
      std::ostringstream msg;
      msg << "generated rho " << rho << " fell outside the target interval";
      throw InvalidArgument(msg.str());
    }
  }
  return model;
}

}  // namespace

Substream::Substream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t a, std::uint64_t b) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ purpose);
  key = splitmix64(key ^ a);
  key = splitmix64(key ^ b);
  state_ = key;
}

std::uint64_t Substream::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Substream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

GaussianInfoModel gen_grid(const GenSpec& spec) {
  if (spec.topology != Topology::kGrid) throw InvalidArgument("gen_grid needs a grid spec");
  const std::size_t l = spec.side;
  if (l < 2) throw InvalidArgument("grid side must be at least 2");
  std::vector<Edge> edges;
  edges.reserve(2 * l * (l - 1));
  for (std::size_t r = 0; r < l; ++r) {
    for (std::size_t c = 0; c < l; ++c) {
      const NodeId v = r * l + c;
      if (c + 1 < l) edges.push_back({v, v + 1, edge_weight(spec, v, v + 1)});
      if (r + 1 < l) edges.push_back({v, v + l, edge_weight(spec, v, v + l)});
    }
  }
  return finish(spec, l * l, std::move(edges));
}

GaussianInfoModel gen_er(const GenSpec& spec) {
  if (spec.topology != Topology::kErdosRenyi) throw InvalidArgument("gen_er needs an Erdos-Renyi spec");
  const std::size_t n = spec.nodes;
  if (n < 2) throw InvalidArgument("Erdos-Renyi model needs at least 2 nodes");
  if (spec.c < 0.0 || spec.c > static_cast<double>(n)) throw InvalidArgument("c must lie in [0, n]");
  const double p = spec.c / static_cast<double>(n);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (Substream(spec.seed, kEdgePresence, i, j).uniform() < p) {
        edges.push_back({i, j, edge_weight(spec, i, j)});
      }
    }
  }
  return finish(spec, n, std::move(edges));
}

GaussianInfoModel generate(const GenSpec& spec) {
  return spec.topology == Topology::kGrid ? gen_grid(spec) : gen_er(spec);
}

}  // namespace gfmp
