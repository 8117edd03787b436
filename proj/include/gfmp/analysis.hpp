#pragma once

// Ground truth and walk-sum diagnostics.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfmp/graph.hpp"
#include "gfmp/model.hpp"

namespace gfmp {

struct ExactSolution {
  Vector means;
  Vector variances;
  std::optional<Eigen::MatrixXd> full_cov;
};

struct OracleOptions {
  std::size_t max_nodes = 5000;
  std::size_t full_cov_max_nodes = 200;
};

/// μ = J^{-1} h and diag(J^{-1}) by dense Cholesky. Throws
/// NotPositiveDefinite when the factorization fails and InvalidArgument when
/// the model exceeds `max_nodes`.
ExactSolution dense_oracle(const GaussianInfoModel& model, const OracleOptions& options = {});

struct ValidationReport {
  bool positive_definite = false;
  /// True when the answer comes from an iterative estimate rather than a
  /// factorization.
  bool heuristic = false;
  double min_eigenvalue_estimate = 0.0;
  std::string method;
};

/// Positive-definiteness check: dense factorization up to `dense_limit` nodes,
/// a power-iteration estimate of λ_min beyond that.
ValidationReport validate(const GaussianInfoModel& model, std::size_t dense_limit = 4096);

/// Smallest eigenvalue of J: dense symmetric eigensolve up to `dense_limit`
/// nodes, power iteration on a shifted matrix beyond.
double min_eigenvalue(const GaussianInfoModel& model, std::size_t dense_limit = 4096);

struct SpectralEstimate {
  double value = 0.0;
  /// Collatz-Wielandt bounds from the final iterate.
  double lower = 0.0;
  double upper = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};

struct PowerOptions {
  double tolerance = 1e-8;  // relative
  std::size_t max_iterations = 100000;
};

/// ρ(R̄) for R̄ = |I - J| of a normalized model, by power iteration on each
/// connected component from the all-ones vector.
SpectralEstimate spectral_radius_abs(const GaussianInfoModel& model, const PowerOptions& options = {});

/// ρ(R̄) restricted to the nodes that remain after removing `removed`.
SpectralEstimate spectral_radius_abs(const GaussianInfoModel& model, std::span<const NodeId> removed,
                                     const PowerOptions& options = {});

/// Spectral radius of a symmetric nonnegative sparse matrix given as weighted
/// adjacency (zero diagonal). Shared by the above and by model generation.
SpectralEstimate spectral_radius_nonnegative(const UndirectedGraph& weights,
                                             const PowerOptions& options = {});

struct RowSumBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// min_i Σ_j |R_ij| and max_i Σ_j |R_ij|.
RowSumBounds row_sum_bounds(const GaussianInfoModel& model);

struct ErrorBounds {
  double lbp_bound = 0.0;
  double fmp_bound = 0.0;
  double rho = 0.0;
  double rho_remainder = 0.0;
  std::size_t girth = kInfiniteGirth;
  std::size_t girth_remainder = kInfiniteGirth;
};

/// ε_LBP <= ρ^g/(1-ρ) and ε_FMP <= (n-k)/n · ρ̃^g̃/(1-ρ̃), with ρ̃, g̃ taken on
/// the graph without `pseudo_fvs`. A bound is 0 for forests and +inf when the
/// relevant spectral radius is >= 1.
ErrorBounds error_bounds(const GaussianInfoModel& model, std::span<const NodeId> pseudo_fvs,
                         const PowerOptions& options = {});

/// Single walk-sum bound term ρ^g/(1-ρ) with the conventions above.
double walk_bound(double rho, std::size_t girth);

/// (1/n) Σ |estimate_i - exact_i|. Used for both variances and means.
double variance_error(std::span<const double> estimate, std::span<const double> exact);
inline double mean_error(std::span<const double> estimate, std::span<const double> exact) {
  return variance_error(estimate, exact);
}

/// Σ_{l=0}^{max_len} (R^l)_ij: walks of length <= max_len from i to j.
double truncated_walk_sum(const GaussianInfoModel& model, NodeId i, NodeId j, std::size_t max_len);

struct DiagnosisReport {
  std::size_t n = 0;
  std::size_t m = 0;
  double rho_bar = 0.0;
  double rho_lower = 0.0;
  double rho_upper = 0.0;
  bool rho_converged = true;
  std::size_t girth = kInfiniteGirth;
  bool walk_summable = false;
  double lbp_error_bound = 0.0;
};

DiagnosisReport diagnose(const GaussianInfoModel& model, const PowerOptions& options = {});

/// One point of the pseudo-FVS curve: the remainder after removing the first
/// `removed` selected nodes.
struct PrefixPoint {
  std::size_t removed = 0;
  std::optional<NodeId> node;  // the node added at this step
  double rho_bar = 0.0;
  double rho_lower = 0.0;
  double rho_upper = 0.0;
  std::size_t girth = kInfiniteGirth;
  double fmp_error_bound = 0.0;
};

struct PrefixCurve {
  std::vector<PrefixPoint> points;
  bool non_increasing = true;  // within 2x the power-iteration tolerance
  bool reached_forest = false;
};

/// ρ(R̄) of the remainder for every prefix of select_pseudo_fvs(model, k).
PrefixCurve pseudo_fvs_curve(const GaussianInfoModel& model, std::size_t k,
                             SelectionMode mode = SelectionMode::kLargestScore,
                             const PowerOptions& options = {});

}  // namespace gfmp
