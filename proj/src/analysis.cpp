#include "gfmp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gfmp/errors.hpp"

namespace gfmp {

namespace {

Eigen::MatrixXd dense_matrix(const GaussianInfoModel& model) {
  const auto n = static_cast<Eigen::Index>(model.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < model.size(); ++i) j(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = model.diag()[i];
  for (const auto& e : model.edges()) {
    const auto a = static_cast<Eigen::Index>(e.i), b = static_cast<Eigen::Index>(e.j);
    j(a, b) = e.weight;
    j(b, a) = e.weight;
  }
  return j;
}

RowSumBounds row_sums_of(const UndirectedGraph& g) {
  RowSumBounds b;
  bool any = false;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (!g.present(v)) continue;
    double s = 0.0;
    for (const auto& nb : g.neighbors(v)) s += nb.weight;
    if (!any) {
      b.lower = b.upper = s;
      any = true;
    } else {
      b.lower = std::min(b.lower, s);
      b.upper = std::max(b.upper, s);
    }
  }
  return b;
}

UndirectedGraph abs_weight_graph(const GaussianInfoModel& model) {
  if (!model.is_normalized()) throw NotNormalized();
  return build_graph(model);
}

// λ_min(J) by power iteration on cI - J, with c a Gershgorin bound on λ_max(J).
// The Rayleigh quotient under-estimates c - λ_min, so the result errs high.
double power_min_eigenvalue(const GaussianInfoModel& model) {
  const std::size_t n = model.size();
  if (n == 0) return 0.0;
  double c = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    double s = model.diag()[i];
    for (const auto& nb : model.neighbors(i)) s += std::abs(nb.weight);
    c = std::max(c, s);
  }
  Vector x(n), y(n);
  for (NodeId i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * std::sin(static_cast<double>(i) + 1.0);
  double mu = 0.0;
  for (std::size_t it = 0; it < 200000; ++it) {
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
    double rq = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      double s = (c - model.diag()[i]) * x[i];
      for (const auto& nb : model.neighbors(i)) s -= nb.weight * x[nb.node];
      y[i] = s;
      rq += x[i] * s;
    }
    const bool done = it > 0 && std::abs(rq - mu) <= 1e-12 * std::max(1.0, std::abs(rq));
    mu = rq;
    std::swap(x, y);
    if (done) break;
  }
  return c - mu;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dense ground truth

ExactSolution dense_oracle(const GaussianInfoModel& model, const OracleOptions& options) {
  const std::size_t n = model.size();
  if (n > options.max_nodes) {
    throw InvalidArgument("dense oracle limited to " + std::to_string(options.max_nodes) +
                          " nodes, model has " + std::to_string(n));
  }
  ExactSolution out;
  if (n == 0) return out;
  const Eigen::MatrixXd j = dense_matrix(model);
  Eigen::LLT<Eigen::MatrixXd> llt(j);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("not positive definite");

  const Eigen::Map<const Eigen::VectorXd> h(model.h().data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd mu = llt.solve(h);
  out.means.assign(mu.data(), mu.data() + n);

  // P = L^{-T} L^{-1}, so P_ii is the squared norm of column i of L^{-1}.
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd linv = Eigen::MatrixXd::Identity(nn, nn);
  llt.matrixL().solveInPlace(linv);
  out.variances.resize(n);
  for (Eigen::Index i = 0; i < nn; ++i) out.variances[static_cast<std::size_t>(i)] = linv.col(i).squaredNorm();
  if (n <= options.full_cov_max_nodes) out.full_cov = linv.transpose() * linv;
  return out;
}

ValidationReport validate(const GaussianInfoModel& model, std::size_t dense_limit) {
  ValidationReport r;
  if (model.size() <= dense_limit) {
    Eigen::LLT<Eigen::MatrixXd> llt(dense_matrix(model));
    r.positive_definite = llt.info() == Eigen::Success;
    r.method = "cholesky";
    r.min_eigenvalue_estimate = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.min_eigenvalue_estimate = power_min_eigenvalue(model);
  r.positive_definite = r.min_eigenvalue_estimate > 0.0;
  r.heuristic = true;
  r.method = "power-iteration";
  return r;
}

double min_eigenvalue(const GaussianInfoModel& model, std::size_t dense_limit) {
  if (model.size() == 0) return 0.0;
  if (model.size() <= dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense_matrix(model), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
  }
  return power_min_eigenvalue(model);
}

// ---------------------------------------------------------------------------
// Spectral radius of |R|

SpectralEstimate spectral_radius_nonnegative(const UndirectedGraph& g, const PowerOptions& options) {
  SpectralEstimate total;
  const std::size_t n = g.size();
  std::vector<std::size_t> comp(n, static_cast<std::size_t>(-1));
  std::vector<NodeId> members;
  Vector x(n, 0.0), y(n, 0.0);
  for (NodeId root = 0; root < n; ++root) {
    if (comp[root] != static_cast<std::size_t>(-1) || g.degree(root) == 0) continue;
    members.clear();
    comp[root] = root;
    members.push_back(root);
    for (std::size_t head = 0; head < members.size(); ++head) {
      for (const auto& nb : g.neighbors(members[head])) {
        if (comp[nb.node] == static_cast<std::size_t>(-1)) {
          comp[nb.node] = root;
          members.push_back(nb.node);
        }
      }
    }

    for (auto v : members) x[v] = 1.0;
    SpectralEstimate est;
    est.converged = false;
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
      double xx = 0.0, xy = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (auto v : members) {
        double s = 0.0;
        for (const auto& nb : g.neighbors(v)) s += nb.weight * x[nb.node];
        y[v] = s;
        xx += x[v] * x[v];
        xy += x[v] * s;
        const double ratio = s / x[v];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      est.value = xy / xx;
      est.lower = lo;
      est.upper = hi;
      est.iterations = it;
      if (hi - lo <= options.tolerance * hi) {
        est.converged = true;
        break;
      }
      // Shifted update (R̄ + I)x avoids oscillation on bipartite components.
      double scale = 0.0;
      for (auto v : members) {
        x[v] += y[v];
        scale = std::max(scale, x[v]);
      }
      for (auto v : members) x[v] /= scale;
    }
    total.value = std::max(total.value, est.value);
    total.lower = std::max(total.lower, est.lower);
    total.upper = std::max(total.upper, est.upper);
    total.iterations = std::max(total.iterations, est.iterations);
    total.converged = total.converged && est.converged;
  }
  return total;
}

SpectralEstimate spectral_radius_abs(const GaussianInfoModel& model, const PowerOptions& options) {
  return spectral_radius_nonnegative(abs_weight_graph(model), options);
}

SpectralEstimate spectral_radius_abs(const GaussianInfoModel& model, std::span<const NodeId> removed,
                                     const PowerOptions& options) {
  return spectral_radius_nonnegative(remove_nodes(abs_weight_graph(model), removed), options);
}

RowSumBounds row_sum_bounds(const GaussianInfoModel& model) {
  return row_sums_of(abs_weight_graph(model));
}

// ---------------------------------------------------------------------------
// Error bounds and metrics

double walk_bound(double rho, std::size_t g) {
  if (g == kInfiniteGirth) return 0.0;
  if (rho >= 1.0) return std::numeric_limits<double>::infinity();
  return std::pow(rho, static_cast<double>(g)) / (1.0 - rho);
}

ErrorBounds error_bounds(const GaussianInfoModel& model, std::span<const NodeId> pseudo_fvs,
                         const PowerOptions& options) {
  const UndirectedGraph g = abs_weight_graph(model);
  const UndirectedGraph rest = remove_nodes(g, pseudo_fvs);
  ErrorBounds b;
  b.rho = spectral_radius_nonnegative(g, options).value;
  b.girth = girth(g);
  b.rho_remainder = pseudo_fvs.empty() ? b.rho : spectral_radius_nonnegative(rest, options).value;
  b.girth_remainder = pseudo_fvs.empty() ? b.girth : girth(rest);
  b.lbp_bound = walk_bound(b.rho, b.girth);
  const double n = static_cast<double>(model.size());
  const double k = static_cast<double>(pseudo_fvs.size());
  const double tail = walk_bound(b.rho_remainder, b.girth_remainder);
  b.fmp_bound = (n == 0.0 || tail == 0.0) ? 0.0 : (n - k) / n * tail;
  return b;
}

double variance_error(std::span<const double> estimate, std::span<const double> exact) {
  if (estimate.size() != exact.size()) {
    throw InvalidArgument("error metric needs equal lengths, got " + std::to_string(estimate.size()) +
                          " and " + std::to_string(exact.size()));
  }
  if (exact.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) s += std::abs(estimate[i] - exact[i]);
  return s / static_cast<double>(exact.size());
}

double truncated_walk_sum(const GaussianInfoModel& model, NodeId i, NodeId j, std::size_t max_len) {
  if (!model.is_normalized()) throw NotNormalized();
  const std::size_t n = model.size();
  if (i >= n || j >= n) throw InvalidArgument("node index out of range");
  Vector x(n, 0.0), y(n, 0.0);
  x[j] = 1.0;
  double acc = i == j ? 1.0 : 0.0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    for (NodeId u = 0; u < n; ++u) {
      double s = 0.0;
      for (const auto& nb : model.neighbors(u)) s -= nb.weight * x[nb.node];  // R = I - J
      y[u] = s;
    }
    std::swap(x, y);
    acc += x[i];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Reports

DiagnosisReport diagnose(const GaussianInfoModel& model, const PowerOptions& options) {
  const UndirectedGraph g = abs_weight_graph(model);
  DiagnosisReport r;
  r.n = model.size();
  r.m = g.edge_count();
  const SpectralEstimate rho = spectral_radius_nonnegative(g, options);
  r.rho_bar = rho.value;
  r.rho_converged = rho.converged;
  const RowSumBounds rs = row_sums_of(g);
  r.rho_lower = rs.lower;
  r.rho_upper = rs.upper;
  r.girth = girth(g);
  r.walk_summable = r.rho_bar < 1.0;
  r.lbp_error_bound = walk_bound(r.rho_bar, r.girth);
  return r;
}

PrefixCurve pseudo_fvs_curve(const GaussianInfoModel& model, std::size_t k, SelectionMode mode,
                             const PowerOptions& options) {
  const FvsResult fvs = select_pseudo_fvs(model, k, mode);
  UndirectedGraph rest = abs_weight_graph(model);
  const double n = static_cast<double>(model.size());
  PrefixCurve curve;
  curve.reached_forest = fvs.is_full_fvs;
  for (std::size_t r = 0; r <= fvs.nodes.size(); ++r) {
    PrefixPoint pt;
    pt.removed = r;
    if (r > 0) {
      pt.node = fvs.nodes[r - 1];
      rest.remove_node(fvs.nodes[r - 1]);
    }
    pt.rho_bar = spectral_radius_nonnegative(rest, options).value;
    const RowSumBounds rs = row_sums_of(rest);
    pt.rho_lower = rs.lower;
    pt.rho_upper = rs.upper;
    pt.girth = girth(rest);
    const double tail = walk_bound(pt.rho_bar, pt.girth);
    pt.fmp_error_bound = tail == 0.0 ? 0.0 : (n - static_cast<double>(r)) / n * tail;
    if (!curve.points.empty()) {
      const double prev = curve.points.back().rho_bar;
      if (pt.rho_bar > prev + 2.0 * options.tolerance * std::max(1.0, prev)) curve.non_increasing = false;
    }
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace gfmp
