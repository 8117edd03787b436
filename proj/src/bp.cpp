#include "gfmp/bp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gfmp/errors.hpp"
#include "gfmp/graph.hpp"

namespace gfmp {

namespace {

constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);

struct DirectedCsr {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> nbr;
  std::vector<double> weight;
  std::vector<std::size_t> reverse;
};

DirectedCsr make_csr(const GaussianInfoModel& model) {
  const std::size_t n = model.size();
  DirectedCsr c;
  c.offsets.assign(n + 1, 0);
  for (NodeId i = 0; i < n; ++i) c.offsets[i + 1] = c.offsets[i] + model.degree(i);
  c.nbr.reserve(c.offsets[n]);
  c.weight.reserve(c.offsets[n]);
  for (NodeId i = 0; i < n; ++i) {
    for (const auto& nb : model.neighbors(i)) {
      c.nbr.push_back(nb.node);
      c.weight.push_back(nb.weight);
    }
  }
  c.reverse.assign(c.offsets[n], 0);
  for (NodeId i = 0; i < n; ++i) {
    for (std::size_t s = c.offsets[i]; s < c.offsets[i + 1]; ++s) {
      const NodeId j = c.nbr[s];
      auto first = c.nbr.begin() + static_cast<std::ptrdiff_t>(c.offsets[j]);
      auto last = c.nbr.begin() + static_cast<std::ptrdiff_t>(c.offsets[j + 1]);
      c.reverse[s] = static_cast<std::size_t>(std::lower_bound(first, last, i) - c.nbr.begin());
    }
  }
  return c;
}

// base + Σ values[s'] over s' in [begin, end) \ {skip}, ascending.
inline double cavity_sum(double base, const double* values, std::size_t begin, std::size_t end,
                         std::size_t skip) {
  double acc = base;
  for (std::size_t s = begin; s < end; ++s) {
    if (s != skip) acc += values[s];
  }
  return acc;
}

void check_potentials(const GaussianInfoModel& model, std::span<const Vector> potentials) {
  for (const auto& h : potentials) {
    if (h.size() != model.size()) {
      throw InvalidArgument("potential vector has length " + std::to_string(h.size()) +
                            ", expected " + std::to_string(model.size()));
    }
  }
}

}  // namespace

const char* to_string(BpStatus status) {
  switch (status) {
    case BpStatus::kConverged: return "converged";
    case BpStatus::kMaxIterations: return "max_iterations";
    case BpStatus::kBreakdown: return "breakdown";
    case BpStatus::kNonFinite: return "non_finite";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Two-pass BP on forests

BpResult tree_bp(const GaussianInfoModel& model, std::span<const Vector> potentials) {
  if (!model.is_normalized()) throw NotNormalized();
  check_potentials(model, potentials);
  {
    const auto g = build_graph(model);
    if (!is_acyclic(g)) throw NotAForest(find_cycle(g));
  }
  const std::size_t n = model.size();
  const std::size_t np = potentials.size();
  const DirectedCsr c = make_csr(model);
  const auto& diag = model.diag();

  // BFS order per component; parent_slot is the slot of the parent in i's list.
  std::vector<NodeId> order;
  order.reserve(n);
  std::vector<std::size_t> parent_slot(n, kNoSlot);
  std::vector<bool> seen(n, false);
  for (NodeId root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    std::size_t head = order.size();
    order.push_back(root);
    while (head < order.size()) {
      const NodeId u = order[head++];
      for (std::size_t s = c.offsets[u]; s < c.offsets[u + 1]; ++s) {
        const NodeId v = c.nbr[s];
        if (seen[v]) continue;
        seen[v] = true;
        parent_slot[v] = c.reverse[s];
        order.push_back(v);
      }
    }
  }

  Vector dj(c.nbr.size(), 0.0);
  std::vector<Vector> dh(np, Vector(c.nbr.size(), 0.0));

  auto send = [&](NodeId i, std::size_t s) {
    const std::size_t b = c.offsets[i], e = c.offsets[i + 1];
    const double hat_j = cavity_sum(diag[i], dj.data(), b, e, s);
    if (!(hat_j > 0.0)) {
      std::ostringstream msg;
      msg << "model not PD on this forest: cavity precision " << hat_j << " at node " << i
          << " towards " << c.nbr[s];
      throw NotPositiveDefinite(msg.str());
    }
    const double w = c.weight[s];
    dj[c.reverse[s]] = -w * w / hat_j;
    for (std::size_t p = 0; p < np; ++p) {
      const double hat_h = cavity_sum(potentials[p][i], dh[p].data(), b, e, s);
      dh[p][c.reverse[s]] = -w * hat_h / hat_j;
    }
  };

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (parent_slot[*it] != kNoSlot) send(*it, parent_slot[*it]);
  }
  for (const NodeId i : order) {
    for (std::size_t s = c.offsets[i]; s < c.offsets[i + 1]; ++s) {
      if (s != parent_slot[i]) send(i, s);
    }
  }

  BpResult r;
  r.variances.resize(n);
  r.means.assign(np, Vector(n));
  for (NodeId i = 0; i < n; ++i) {
    const std::size_t b = c.offsets[i], e = c.offsets[i + 1];
    const double prec = cavity_sum(diag[i], dj.data(), b, e, kNoSlot);
    if (!(prec > 0.0)) {
      throw NotPositiveDefinite("model not PD on this forest: marginal precision at node " +
                                std::to_string(i));
    }
    r.variances[i] = 1.0 / prec;
    for (std::size_t p = 0; p < np; ++p) {
      r.means[p][i] = cavity_sum(potentials[p][i], dh[p].data(), b, e, kNoSlot) / prec;
    }
  }
  r.converged = true;
  r.status = BpStatus::kConverged;
  r.iterations = 1;
  r.potential_iterations.assign(np, 1);
  return r;
}

// ---------------------------------------------------------------------------
// Loopy BP

LoopyBp::LoopyBp(const GaussianInfoModel& model, std::vector<Vector> potentials, BpOptions options)
    : options_(options), diag_(model.diag()), potentials_(std::move(potentials)) {
  if (!model.is_normalized()) throw NotNormalized();
  if (options_.max_iterations == 0) throw InvalidArgument("max_iterations must be positive");
  if (!(options_.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  check_potentials(model, potentials_);
  DirectedCsr c = make_csr(model);
  offsets_ = std::move(c.offsets);
  nbr_ = std::move(c.nbr);
  weight_ = std::move(c.weight);
  reverse_ = std::move(c.reverse);

  const std::size_t slots = nbr_.size();
  const std::size_t np = potentials_.size();
  dj_.assign(slots, 0.0);
  dj_next_.assign(slots, 0.0);
  dh_.assign(np, Vector(slots, 0.0));
  dh_next_.assign(np, Vector(slots, 0.0));
  active_.assign(np, true);
  potential_status_.assign(np, BpStatus::kMaxIterations);
  potential_iterations_.assign(np, 0);
  frozen_means_.assign(np, Vector{});
}

void LoopyBp::finish(BpStatus status) {
  done_ = true;
  status_ = status;
}

bool LoopyBp::step() {
  if (done_) return false;
  const std::size_t n = diag_.size();
  const std::size_t np = potentials_.size();
  const std::size_t round = iteration_ + 1;

  for (NodeId i = 0; i < n; ++i) {
    const std::size_t b = offsets_[i], e = offsets_[i + 1];
    for (std::size_t s = b; s < e; ++s) {
      const double hat_j = cavity_sum(diag_[i], dj_.data(), b, e, s);
      if (!(hat_j > 0.0) || !std::isfinite(hat_j)) {
        std::ostringstream msg;
        msg << "LBP breakdown at iteration " << round << ": cavity precision " << hat_j
            << " at node " << i << " towards " << nbr_[s];
        diagnostic_ = msg.str();
        for (std::size_t p = 0; p < np; ++p) {
          if (active_[p]) potential_status_[p] = BpStatus::kBreakdown;
        }
        finish(BpStatus::kBreakdown);
        return false;
      }
      const double w = weight_[s];
      const std::size_t out = reverse_[s];
      dj_next_[out] = -w * w / hat_j;
      for (std::size_t p = 0; p < np; ++p) {
        if (!active_[p]) continue;
        const double hat_h = cavity_sum(potentials_[p][i], dh_[p].data(), b, e, s);
        dh_next_[p][out] = -w * hat_h / hat_j;
      }
    }
  }

  double res_j = 0.0;
  for (std::size_t s = 0; s < dj_.size(); ++s) res_j = std::max(res_j, std::abs(dj_next_[s] - dj_[s]));
  std::swap(dj_, dj_next_);
  iteration_ = round;

  double res_all = res_j;
  std::vector<double> res_h(np, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    if (!active_[p]) continue;
    double r = 0.0;
    bool finite = true;
    for (std::size_t s = 0; s < dh_[p].size(); ++s) {
      const double d = std::abs(dh_next_[p][s] - dh_[p][s]);
      if (!std::isfinite(d)) finite = false;
      r = std::max(r, d);
    }
    res_h[p] = finite ? r : std::numeric_limits<double>::infinity();
    std::swap(dh_[p], dh_next_[p]);
    res_all = std::max(res_all, res_h[p]);
  }
  residuals_.push_back(res_all);

  if (!std::isfinite(res_j)) {
    diagnostic_ = "ΔJ messages overflowed at iteration " + std::to_string(round);
    for (std::size_t p = 0; p < np; ++p) {
      if (active_[p]) potential_status_[p] = BpStatus::kNonFinite;
    }
    finish(BpStatus::kNonFinite);
    return false;
  }

  const Vector* precisions = nullptr;
  Vector prec_storage;
  auto freeze = [&](std::size_t p, BpStatus st) {
    if (!precisions) {
      prec_storage = marginal_precisions();
      precisions = &prec_storage;
    }
    frozen_means_[p] = means_for(p, *precisions);
    potential_status_[p] = st;
    potential_iterations_[p] = round;
    active_[p] = false;
  };

  bool any_active = false;
  bool any_failed = false;
  for (std::size_t p = 0; p < np; ++p) {
    if (!active_[p]) {
      any_failed |= potential_status_[p] != BpStatus::kConverged;
      continue;
    }
    const double r = std::max(res_j, res_h[p]);
    if (!std::isfinite(r)) {
      freeze(p, BpStatus::kNonFinite);
      if (diagnostic_.empty()) {
        diagnostic_ = "Δh messages overflowed at iteration " + std::to_string(round);
      }
      any_failed = true;
    } else if (r <= options_.tolerance) {
      freeze(p, BpStatus::kConverged);
    } else {
      any_active = true;
    }
  }

  if (np == 0) {
    if (res_j <= options_.tolerance) {
      finish(BpStatus::kConverged);
      return false;
    }
  } else if (!any_active) {
    finish(any_failed ? BpStatus::kNonFinite : BpStatus::kConverged);
    return false;
  }
  if (round >= options_.max_iterations) {
    for (std::size_t p = 0; p < np; ++p) {
      if (active_[p]) potential_iterations_[p] = round;
    }
    finish(any_failed ? BpStatus::kNonFinite : BpStatus::kMaxIterations);
    return false;
  }
  return true;
}

Vector LoopyBp::marginal_precisions() const {
  const std::size_t n = diag_.size();
  Vector prec(n);
  for (NodeId i = 0; i < n; ++i) prec[i] = cavity_sum(diag_[i], dj_.data(), offsets_[i], offsets_[i + 1], kNoSlot);
  return prec;
}

Vector LoopyBp::means_for(std::size_t p, const Vector& precisions) const {
  const std::size_t n = diag_.size();
  Vector mu(n);
  for (NodeId i = 0; i < n; ++i) {
    mu[i] = cavity_sum(potentials_[p][i], dh_[p].data(), offsets_[i], offsets_[i + 1], kNoSlot) /
            precisions[i];
  }
  return mu;
}

BpResult LoopyBp::result() const {
  BpResult r;
  const Vector prec = marginal_precisions();
  r.variances.resize(prec.size());
  for (std::size_t i = 0; i < prec.size(); ++i) r.variances[i] = 1.0 / prec[i];
  r.means.resize(potentials_.size());
  r.potential_iterations = potential_iterations_;
  for (std::size_t p = 0; p < potentials_.size(); ++p) {
    if (active_[p]) {
      r.means[p] = means_for(p, prec);
      r.potential_iterations[p] = iteration_;
    } else {
      r.means[p] = frozen_means_[p];
    }
  }
  r.status = done_ ? status_ : BpStatus::kMaxIterations;
  r.converged = r.status == BpStatus::kConverged;
  r.iterations = iteration_;
  r.residual_history = residuals_;
  r.diagnostic = diagnostic_;
  return r;
}

MessageState LoopyBp::state() const {
  return MessageState{offsets_, dj_, dh_, iteration_};
}

BpResult lbp_multi(const GaussianInfoModel& model, std::span<const Vector> potentials,
                   const BpOptions& options) {
  LoopyBp solver(model, std::vector<Vector>(potentials.begin(), potentials.end()), options);
  while (solver.step()) {
  }
  return solver.result();
}

BpResult lbp(const GaussianInfoModel& model, const Vector& potential, const BpOptions& options) {
  return lbp_multi(model, std::span<const Vector>(&potential, 1), options);
}

BpResult lbp(const GaussianInfoModel& model, const BpOptions& options) {
  return lbp(model, model.h(), options);
}

}  // namespace gfmp
