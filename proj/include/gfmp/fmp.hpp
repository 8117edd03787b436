#pragma once

// Feedback message passing.
//
// With a feedback set F and remainder T = V \ F, BP on T is run with the
// potentials h_T and h^p = J_{T,p} (p in F). Its outputs (partial variances,
// partial means μ^T, feedback gains g^p = J_T^{-1} h^p) give a k x k system
// on F whose solution P_F, μ_F is then pushed back into T through a revised
// potential and a rank-k variance correction. With a full FVS and exact BP
// the answer is exact; with a pseudo-FVS and loopy BP it is exact for all
// means and for the variances on F once both rounds converge.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfmp/bp.hpp"
#include "gfmp/model.hpp"

namespace gfmp {

struct FmpResult {
  Vector means;
  Vector variances;
  std::vector<NodeId> feedback_set;
  bool converged = false;
  Eigen::MatrixXd feedback_cov;    // P_F
  Eigen::VectorXd feedback_means;  // μ_F
  std::vector<NodeId> remainder;   // T, ascending
  std::vector<Vector> gains;       // g^p over T, one per feedback node
  std::size_t round1_iterations = 0;
  std::size_t round2_iterations = 0;
  /// Largest |Ĵ_F - Ĵ_F'| before symmetrization.
  double feedback_asymmetry = 0.0;
  std::string diagnostic;
};

/// Reduced k x k information form (Ĵ_F, ĥ_F) on the feedback nodes.
struct FeedbackSystem {
  Eigen::MatrixXd j_hat;
  Eigen::VectorXd h_hat;
  double asymmetry = 0.0;
};

/// Asymmetry above which gains are considered unconverged.
inline constexpr double kFeedbackAsymmetryWarning = 1e-6;

/// Builds (Ĵ_F)_pq = J_pq - Σ_{j∈N(p)∩T} J_pj g^q_j and
/// (ĥ_F)_p = h_p - Σ_{j∈N(p)∩T} J_pj μ^T_j, symmetrizing Ĵ_F. Throws
/// FeedbackIndefinite when Ĵ_F is not positive definite.
FeedbackSystem feedback_system(const GaussianInfoModel& model, const SubmodelExtract& extract,
                               std::span<const Vector> gains, const Vector& partial_means);

/// Exact FMP. `fvs` must leave a forest; otherwise NotAForest is thrown with a
/// cycle in original node ids.
FmpResult exact_fmp(const GaussianInfoModel& model, std::span<const NodeId> fvs);

/// Approximate FMP: loopy BP on the remainder in both rounds, cold-started,
/// sharing `options`. Solver failures are reported via `converged` and
/// `diagnostic` rather than thrown.
FmpResult approx_fmp(const GaussianInfoModel& model, std::span<const NodeId> pseudo_fvs,
                     const BpOptions& options = {});

/// Potentials for the first round on the remainder: h_T followed by h^p for
/// each feedback node in order.
std::vector<Vector> first_round_potentials(const SubmodelExtract& extract);

/// Steps 3-5 of approximate FMP given a first-round result computed on
/// extract.j_sub with first_round_potentials(extract). Lets callers that step
/// the first round themselves reuse it.
FmpResult complete_approx_fmp(const GaussianInfoModel& model, const SubmodelExtract& extract,
                              const BpResult& round1, const BpOptions& options);

}  // namespace gfmp
