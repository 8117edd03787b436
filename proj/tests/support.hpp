#pragma once

// Test-side helpers. The dense inverse here is plain Gauss-Jordan with partial
// pivoting so library results are never checked against the library's own
// Eigen-based oracle.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "gfmp/model.hpp"

namespace testing {

using gfmp::Edge;
using gfmp::GaussianInfoModel;
using gfmp::NodeId;
using gfmp::Vector;
using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const GaussianInfoModel& m) {
  const std::size_t n = m.size();
  Dense a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = m.diag()[i];
  for (const auto& e : m.edges()) a[e.i][e.j] = a[e.j][e.i] = e.weight;
  return a;
}

inline Dense inverse(Dense a) {
  const std::size_t n = a.size();
  Dense inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0.0) throw std::runtime_error("singular");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const double d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0.0) continue;
      const double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

struct Truth {
  Dense cov;
  Vector means;
  Vector variances;
};

inline Truth truth(const GaussianInfoModel& m) {
  Truth t;
  t.cov = inverse(to_dense(m));
  const std::size_t n = m.size();
  t.means.assign(n, 0.0);
  t.variances.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.means[i] += t.cov[i][j] * m.h()[j];
    t.variances[i] = t.cov[i][i];
  }
  return t;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

/// Smallest eigenvalue of a small symmetric matrix by cyclic Jacobi rotations.
inline double min_eig(Dense a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  double m = INFINITY;
  for (std::size_t i = 0; i < n; ++i) m = std::min(m, a[i][i]);
  return m;
}

// --- small fixed models -------------------------------------------------------

/// J = [[1, -0.5], [-0.5, 1]], h = (1, 0).
inline GaussianInfoModel chain2() { return GaussianInfoModel({1, 1}, {{0, 1, -0.5}}, {1, 0}); }

/// Unit-diagonal cycle with every J_ij = -r.
inline GaussianInfoModel cycle(std::size_t n, double r, Vector h = {}) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, -r});
  if (h.empty()) {
    for (std::size_t i = 0; i < n; ++i) h.push_back(1.0 + 0.5 * static_cast<double>(i));
  }
  return GaussianInfoModel(Vector(n, 1.0), e, h);
}

/// C3 with |R| = 0.6 and one positive J entry: PD, not walk-summable.
inline GaussianInfoModel frustrated_c3() {
  return GaussianInfoModel({1, 1, 1}, {{0, 1, -0.6}, {1, 2, -0.6}, {0, 2, 0.6}}, {1, -0.5, 0.25});
}

/// Unit-diagonal l x l grid with the given weight on every edge.
inline GaussianInfoModel uniform_grid(std::size_t l, double w) {
  std::vector<Edge> e;
  for (std::size_t r = 0; r < l; ++r)
    for (std::size_t c = 0; c < l; ++c) {
      const std::size_t v = r * l + c;
      if (c + 1 < l) e.push_back({v, v + 1, w});
      if (r + 1 < l) e.push_back({v, v + l, w});
    }
  Vector h(l * l);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::sin(1.0 + static_cast<double>(i));
  return GaussianInfoModel(Vector(l * l, 1.0), e, h);
}

/// Random normalized PD model on the given edge list: weights uniform on
/// [-1, 1] (or [-1, 0] when attractive), diagonal shifted to
/// |λ_min| + margin, then scaled to unit diagonal.
inline GaussianInfoModel random_model(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& pairs,
                                      std::mt19937_64& rng, double margin, bool attractive = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Edge> e;
  for (auto [a, b] : pairs) e.push_back({a, b, attractive ? -std::fabs(u(rng)) : u(rng)});
  Vector h(n);
  for (auto& x : h) x = u(rng);
  const GaussianInfoModel j0(Vector(n, 0.0), e, h);
  const double lam = std::max(0.0, -min_eig(to_dense(j0))) + margin;
  for (auto& x : e) x.weight /= lam;
  for (auto& x : h) x /= std::sqrt(lam);
  return GaussianInfoModel(Vector(n, 1.0), e, h);
}

inline std::vector<std::pair<NodeId, NodeId>> grid_pairs(std::size_t l) {
  std::vector<std::pair<NodeId, NodeId>> p;
  for (std::size_t r = 0; r < l; ++r)
    for (std::size_t c = 0; c < l; ++c) {
      const std::size_t v = r * l + c;
      if (c + 1 < l) p.emplace_back(v, v + 1);
      if (r + 1 < l) p.emplace_back(v, v + l);
    }
  return p;
}

/// Random spanning tree plus `extra` random chords (connected).
inline std::vector<std::pair<NodeId, NodeId>> connected_pairs(std::size_t n, std::size_t extra,
                                                              std::mt19937_64& rng) {
  std::vector<std::pair<NodeId, NodeId>> p;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (std::size_t v = 1; v < n; ++v) {
    const std::size_t u = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
    p.emplace_back(u, v);
    used[u][v] = used[v][u] = true;
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t tries = 0; extra > 0 && tries < 50 * n; ++tries) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a == b || used[a][b]) continue;
    used[a][b] = used[b][a] = true;
    p.emplace_back(std::min(a, b), std::max(a, b));
    --extra;
  }
  return p;
}

/// Random forest: each node after the first attaches to an earlier one with
/// probability `attach`.
inline std::vector<std::pair<NodeId, NodeId>> forest_pairs(std::size_t n, double attach, std::mt19937_64& rng) {
  std::vector<std::pair<NodeId, NodeId>> p;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t v = 1; v < n; ++v) {
    if (u(rng) < attach) p.emplace_back(std::uniform_int_distribution<std::size_t>(0, v - 1)(rng), v);
  }
  return p;
}

}  // namespace testing
