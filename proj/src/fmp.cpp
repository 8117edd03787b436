#include "gfmp/fmp.hpp"

#include <cmath>
#include <limits>

#include "gfmp/errors.hpp"
#include "gfmp/graph.hpp"

namespace gfmp {

namespace {

struct FeedbackSolution {
  Eigen::MatrixXd cov;
  Eigen::VectorXd means;
  double asymmetry = 0.0;
};

FeedbackSolution solve_feedback(const GaussianInfoModel& model, const SubmodelExtract& extract,
                                std::span<const Vector> gains, const Vector& partial_means) {
  const FeedbackSystem fs = feedback_system(model, extract, gains, partial_means);
  const std::size_t k = extract.feedback.size();
  Eigen::LLT<Eigen::MatrixXd> llt(fs.j_hat);
  FeedbackSolution sol;
  sol.cov = llt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
  sol.cov = 0.5 * (sol.cov + sol.cov.transpose()).eval();
  sol.means = llt.solve(fs.h_hat);
  sol.asymmetry = fs.asymmetry;
  return sol;
}

// h̃_i = h_i - Σ_{j∈N(i)∩F} J_ij (μ_F)_j over T.
Vector revised_potential(const SubmodelExtract& extract, const Eigen::VectorXd& feedback_means) {
  Vector h = extract.j_sub.h();
  for (std::size_t q = 0; q < extract.feedback.size(); ++q) {
    for (const auto& [t, w] : extract.cross_columns[q]) h[t] -= w * feedback_means[static_cast<Eigen::Index>(q)];
  }
  return h;
}

// Writes means/variances for every node from the remainder results and the
// feedback solution.
void assemble(FmpResult& out, const SubmodelExtract& extract, const Vector& partial_variances,
              const Vector& remainder_means) {
  const std::size_t n = extract.local_index.size();
  const std::size_t k = extract.feedback.size();
  out.means.assign(n, 0.0);
  out.variances.assign(n, 0.0);
  for (std::size_t t = 0; t < extract.kept.size(); ++t) {
    const NodeId v = extract.kept[t];
    out.means[v] = remainder_means[t];
    double var = partial_variances[t];
    if (k > 0) {
      double corr = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const double gp = out.gains[p][t];
        if (gp == 0.0) continue;
        double row = 0.0;
        for (std::size_t q = 0; q < k; ++q) {
          row += out.feedback_cov(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) * out.gains[q][t];
        }
        corr += gp * row;
      }
      var += corr;
    }
    out.variances[v] = var;
  }
  for (std::size_t p = 0; p < k; ++p) {
    const auto pi = static_cast<Eigen::Index>(p);
    out.means[extract.feedback[p]] = out.feedback_means[pi];
    out.variances[extract.feedback[p]] = out.feedback_cov(pi, pi);
  }
}

void fill_nan(FmpResult& out, std::size_t n) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.means.assign(n, nan);
  out.variances.assign(n, nan);
}

}  // namespace

FeedbackSystem feedback_system(const GaussianInfoModel& model, const SubmodelExtract& extract,
                               std::span<const Vector> gains, const Vector& partial_means) {
  const std::size_t k = extract.feedback.size();
  const std::size_t nt = extract.kept.size();
  if (gains.size() != k) throw InvalidArgument("expected one gain vector per feedback node");
  for (const auto& g : gains) {
    if (g.size() != nt) throw InvalidArgument("gain vector length does not match remainder");
  }
  if (partial_means.size() != nt) throw InvalidArgument("partial means length does not match remainder");

  FeedbackSystem fs;
  const auto kk = static_cast<Eigen::Index>(k);
  fs.j_hat.resize(kk, kk);
  fs.h_hat.resize(kk);
  for (std::size_t p = 0; p < k; ++p) {
    const NodeId fp = extract.feedback[p];
    const auto& column = extract.cross_columns[p];
    for (std::size_t q = 0; q < k; ++q) {
      double v = model.entry(fp, extract.feedback[q]);
      for (const auto& [t, w] : column) v -= w * gains[q][t];
      fs.j_hat(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = v;
    }
    double hv = model.h()[fp];
    for (const auto& [t, w] : column) hv -= w * partial_means[t];
    fs.h_hat(static_cast<Eigen::Index>(p)) = hv;
  }
  fs.asymmetry = k > 0 ? (fs.j_hat - fs.j_hat.transpose()).cwiseAbs().maxCoeff() : 0.0;
  fs.j_hat = 0.5 * (fs.j_hat + fs.j_hat.transpose()).eval();

  if (k > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(fs.j_hat);
    if (llt.info() != Eigen::Success || !fs.j_hat.allFinite()) {
      throw FeedbackIndefinite("feedback system indefinite");
    }
  }
  return fs;
}

std::vector<Vector> first_round_potentials(const SubmodelExtract& extract) {
  std::vector<Vector> potentials;
  potentials.reserve(extract.feedback.size() + 1);
  potentials.push_back(extract.j_sub.h());
  for (std::size_t q = 0; q < extract.feedback.size(); ++q) {
    potentials.push_back(extract.cross_column_dense(q));
  }
  return potentials;
}

FmpResult exact_fmp(const GaussianInfoModel& model, std::span<const NodeId> fvs) {
  if (!model.is_normalized()) throw NotNormalized();
  const SubmodelExtract extract = extract_submodel(model, fvs);
  {
    const auto rest = remove_nodes(build_graph(model), fvs);
    if (!is_acyclic(rest)) throw NotAForest(find_cycle(rest));
  }

  FmpResult out;
  out.feedback_set.assign(fvs.begin(), fvs.end());
  out.remainder = extract.kept;
  const std::size_t k = extract.feedback.size();

  const BpResult round1 = tree_bp(extract.j_sub, first_round_potentials(extract));
  out.gains.assign(round1.means.begin() + 1, round1.means.end());
  const FeedbackSolution sol = solve_feedback(model, extract, out.gains, round1.means[0]);
  out.feedback_cov = sol.cov;
  out.feedback_means = sol.means;
  out.feedback_asymmetry = sol.asymmetry;

  const Vector revised = revised_potential(extract, out.feedback_means);
  const BpResult round2 = tree_bp(extract.j_sub, std::span<const Vector>(&revised, 1));
  out.round1_iterations = round1.iterations;
  out.round2_iterations = round2.iterations;
  assemble(out, extract, round1.variances, round2.means[0]);
  out.converged = true;
  if (k > 0 && out.feedback_asymmetry > kFeedbackAsymmetryWarning) {
    out.diagnostic = "warning: feedback system asymmetry " + std::to_string(out.feedback_asymmetry);
  }
  return out;
}

FmpResult complete_approx_fmp(const GaussianInfoModel& model, const SubmodelExtract& extract,
                              const BpResult& round1, const BpOptions& options) {
  const std::size_t n = model.size();
  const std::size_t k = extract.feedback.size();
  FmpResult out;
  out.feedback_set = extract.feedback;
  out.remainder = extract.kept;
  out.round1_iterations = round1.iterations;
  out.gains.assign(round1.means.begin() + 1, round1.means.end());
  out.diagnostic = round1.diagnostic;

  FeedbackSolution sol;
  try {
    sol = solve_feedback(model, extract, out.gains, round1.means[0]);
  } catch (const FeedbackIndefinite& e) {
    out.converged = false;
    out.diagnostic = out.diagnostic.empty() ? e.what() : out.diagnostic + "; " + e.what();
    fill_nan(out, n);
    return out;
  }
  out.feedback_cov = sol.cov;
  out.feedback_means = sol.means;
  out.feedback_asymmetry = sol.asymmetry;

  const Vector revised = revised_potential(extract, out.feedback_means);
  BpResult round2;
  if (extract.empty_remainder()) {
    round2 = tree_bp(extract.j_sub, std::span<const Vector>(&revised, 1));
  } else {
    round2 = lbp(extract.j_sub, revised, options);
  }
  out.round2_iterations = round2.iterations;
  assemble(out, extract, round1.variances, round2.means[0]);
  out.converged = round1.converged && round2.converged;
  if (!round2.diagnostic.empty()) {
    out.diagnostic = out.diagnostic.empty() ? round2.diagnostic : out.diagnostic + "; " + round2.diagnostic;
  }
  if (k > 0 && out.feedback_asymmetry > kFeedbackAsymmetryWarning) {
    const std::string warn = "warning: feedback system asymmetry " + std::to_string(out.feedback_asymmetry);
    out.diagnostic = out.diagnostic.empty() ? warn : out.diagnostic + "; " + warn;
  }
  return out;
}

FmpResult approx_fmp(const GaussianInfoModel& model, std::span<const NodeId> pseudo_fvs,
                     const BpOptions& options) {
  if (!model.is_normalized()) throw NotNormalized();
  const SubmodelExtract extract = extract_submodel(model, pseudo_fvs);
  const auto potentials = first_round_potentials(extract);
  BpResult round1 = extract.empty_remainder() ? tree_bp(extract.j_sub, potentials)
                                              : lbp_multi(extract.j_sub, potentials, options);
  return complete_approx_fmp(model, extract, round1, options);
}

}  // namespace gfmp
