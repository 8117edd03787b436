#pragma once

// Information-form Gaussian model: p(x) ∝ exp(-x'Jx/2 + h'x).

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gfmp {

using NodeId = std::size_t;
using Vector = std::vector<double>;

struct Edge {
  NodeId i;
  NodeId j;
  double weight;  // J_ij

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One entry of a node's neighbor list.
struct Neighbor {
  NodeId node;
  double weight;  // J_ij, never zero
};

/// Sparse symmetric information matrix J plus potential vector h.
///
/// Each undirected edge is stored once with i < j, sorted by (i, j). The
/// constructor canonicalizes the edge order and rejects self-edges,
/// duplicates and out-of-range indices. Positive definiteness is not
/// checked here (see analysis::validate).
class GaussianInfoModel {
public:
  GaussianInfoModel() = default;
  GaussianInfoModel(Vector diag, std::vector<Edge> edges, Vector h);

  std::size_t size() const noexcept { return diag_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const Vector& diag() const noexcept { return diag_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Vector& h() const noexcept { return h_; }

  /// Nonzero off-diagonal entries of row i, ascending by neighbor index.
  std::span<const Neighbor> neighbors(NodeId i) const {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }

  /// J_ij (diagonal included); zero when i and j are not adjacent.
  double entry(NodeId i, NodeId j) const;

  /// True when every diagonal entry equals 1 exactly.
  bool is_normalized() const noexcept;

  /// Same J with a different potential vector.
  GaussianInfoModel with_potential(Vector h) const;

  friend bool operator==(const GaussianInfoModel& a, const GaussianInfoModel& b) {
    return a.diag_ == b.diag_ && a.edges_ == b.edges_ && a.h_ == b.h_;
  }

private:
  Vector diag_;
  std::vector<Edge> edges_;
  Vector h_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
};

/// Parses the line-oriented `ggm 1` text format.
GaussianInfoModel load_model(std::istream& in);
GaussianInfoModel load_model_file(const std::string& path);

/// Canonical serialization: sorted edges, 17 significant digits.
void save_model(const GaussianInfoModel& model, std::ostream& out);
std::string save_model(const GaussianInfoModel& model);
void save_model_file(const GaussianInfoModel& model, const std::string& path);

/// Result of rescaling J to unit diagonal. `inv_sqrt_diag[i]` is D^{-1/2}_ii
/// of the original model, so that mu = D^{-1/2} mu' and P_ii = P'_ii / D_ii.
struct Normalized {
  GaussianInfoModel model;
  Vector inv_sqrt_diag;

  Vector denormalize_means(std::span<const double> means) const;
  Vector denormalize_variances(std::span<const double> variances) const;
};

/// Returns D^{-1/2} J D^{-1/2} and D^{-1/2} h. Throws InvalidArgument naming
/// the first node with a non-positive diagonal entry.
Normalized normalize(const GaussianInfoModel& model);

/// Partial-correlation matrix R = I - J of a normalized model, with the
/// per-node absolute row sums of |R|.
struct PartialCorrelation {
  std::vector<Edge> entries;  // (i, j, R_ij), i < j
  Vector abs_row_sums;

  double row_sum_min() const;
  double row_sum_max() const;
};

PartialCorrelation partial_correlation(const GaussianInfoModel& model);

/// A model split into the remainder T = V \ F and the columns J_{T,p}.
struct SubmodelExtract {
  std::vector<NodeId> kept;      // T, ascending, original indices
  std::vector<NodeId> feedback;  // F in caller order
  GaussianInfoModel j_sub;       // J_T, h_T over local indices 0..|T|-1
  /// cross_columns[q] lists (local index in T, J_{t,p}) for p = feedback[q];
  /// only neighbors of p appear.
  std::vector<std::vector<std::pair<NodeId, double>>> cross_columns;
  /// local_index[v] is v's position in `kept`, or npos for feedback nodes.
  std::vector<std::size_t> local_index;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  bool empty_remainder() const noexcept { return kept.empty(); }
  /// Dense h^p = J_{T,p} over T for feedback position q.
  Vector cross_column_dense(std::size_t q) const;
};

/// Throws InvalidArgument on out-of-range or repeated feedback nodes.
SubmodelExtract extract_submodel(const GaussianInfoModel& model,
                                 std::span<const NodeId> feedback);

}  // namespace gfmp
