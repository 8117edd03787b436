#pragma once

// Gaussian belief propagation in information form.
//
// Messages are (ΔJ_{i→j}, Δh_{i→j}) pairs. For a node i sending to j:
//   Ĵ_{i\j} = J_ii + Σ_{k∈N(i)\j} ΔJ_{k→i},   ĥ_{i\j} = h_i + Σ_{k∈N(i)\j} Δh_{k→i}
//   ΔJ_{i→j} = -J_ji Ĵ_{i\j}^{-1} J_ij,       Δh_{i→j} = -J_ji Ĵ_{i\j}^{-1} ĥ_{i\j}
// and marginals are P_ii = Ĵ_i^{-1}, μ_i = Ĵ_i^{-1} ĥ_i with sums over all of N(i).
// Incoming sums are always accumulated in ascending neighbor order.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gfmp/model.hpp"

namespace gfmp {

struct BpOptions {
  std::size_t max_iterations = 1000;
  double tolerance = 1e-10;  // on the max absolute message change per round
};

enum class BpStatus {
  kConverged,
  kMaxIterations,
  kBreakdown,  // some Ĵ_{i\j} <= 0; messages are no longer defined
  kNonFinite,  // messages overflowed
};

const char* to_string(BpStatus status);

/// Messages on directed edges. Entry `offset(i) + r` holds the message sent to
/// node i by its r-th neighbor (ascending order), for every i.
struct MessageState {
  std::vector<std::size_t> offsets;  // size n + 1
  Vector delta_j;
  std::vector<Vector> delta_h;  // one per potential vector
  std::size_t iteration = 0;
};

struct BpResult {
  std::vector<Vector> means;  // one per potential vector
  Vector variances;
  bool converged = false;
  BpStatus status = BpStatus::kMaxIterations;
  std::size_t iterations = 0;
  /// Round at which each potential's messages met the tolerance (or stopped).
  std::vector<std::size_t> potential_iterations;
  Vector residual_history;
  std::string diagnostic;
};

/// Exact BP on a forest by one leaf-to-root and one root-to-leaf sweep per
/// component. Throws NotAForest for graphs with cycles and NotPositiveDefinite
/// when a cavity precision Ĵ_{i\j} is not positive.
BpResult tree_bp(const GaussianInfoModel& model, std::span<const Vector> potentials);

/// Synchronous loopy BP with all-zero initial messages, stepped one round at a
/// time. ΔJ messages are shared by all potential vectors; each potential's Δh
/// messages stop updating (and its means are frozen) once
/// max(|ΔJ change|, |Δh change|) <= tolerance, so the means for every
/// potential equal those of a separate single-potential run.
class LoopyBp {
public:
  LoopyBp(const GaussianInfoModel& model, std::vector<Vector> potentials, BpOptions options);

  /// Runs one synchronous round. Returns false once the run has finished
  /// (converged, iteration cap, breakdown or overflow).
  bool step();
  bool done() const noexcept { return done_; }
  std::size_t iteration() const noexcept { return iteration_; }

  /// Marginals from the current messages.
  BpResult result() const;
  MessageState state() const;

private:
  Vector marginal_precisions() const;
  Vector means_for(std::size_t p, const Vector& precisions) const;
  void finish(BpStatus status);

  BpOptions options_;
  Vector diag_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> nbr_;
  std::vector<double> weight_;
  std::vector<std::size_t> reverse_;  // slot of the opposite direction
  std::vector<Vector> potentials_;

  Vector dj_, dj_next_;
  std::vector<Vector> dh_, dh_next_;
  std::vector<bool> active_;
  std::vector<BpStatus> potential_status_;
  std::vector<std::size_t> potential_iterations_;
  std::vector<Vector> frozen_means_;
  Vector residuals_;
  std::size_t iteration_ = 0;
  bool done_ = false;
  BpStatus status_ = BpStatus::kMaxIterations;
  std::string diagnostic_;
};

/// Loopy BP for one potential vector (the model's own h when omitted).
BpResult lbp(const GaussianInfoModel& model, const Vector& potential, const BpOptions& options = {});
BpResult lbp(const GaussianInfoModel& model, const BpOptions& options = {});

/// Loopy BP for several potential vectors sharing one set of ΔJ messages.
BpResult lbp_multi(const GaussianInfoModel& model, std::span<const Vector> potentials,
                   const BpOptions& options = {});

}  // namespace gfmp
