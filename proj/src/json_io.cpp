#include "gfmp/json_io.hpp"

#include <cmath>

namespace gfmp {

namespace {

Json reals(std::span<const double> values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(real_to_json(v));
  return arr;
}

}  // namespace

Json real_to_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json girth_to_json(std::size_t g) {
  if (g == kInfiniteGirth) return "inf";
  return g;
}

Json to_json(const FvsResult& fvs) {
  return Json{{"nodes", fvs.nodes}, {"full", fvs.is_full_fvs}, {"scores", reals(fvs.scores)}};
}

Json to_json(const BpResult& r) {
  Json means = Json::array();
  for (const auto& m : r.means) means.push_back(reals(m));
  Json j{{"converged", r.converged},
         {"status", to_string(r.status)},
         {"iterations", r.iterations},
         {"means", std::move(means)},
         {"variances", reals(r.variances)},
         {"residuals", reals(r.residual_history)}};
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  return j;
}

Json to_json(const FmpResult& r) {
  Json cov = Json::array();
  for (Eigen::Index p = 0; p < r.feedback_cov.rows(); ++p) {
    Json row = Json::array();
    for (Eigen::Index q = 0; q < r.feedback_cov.cols(); ++q) row.push_back(real_to_json(r.feedback_cov(p, q)));
    cov.push_back(std::move(row));
  }
  Json j{{"feedback_set", r.feedback_set},
         {"converged", r.converged},
         {"means", reals(r.means)},
         {"variances", reals(r.variances)},
         {"feedback_cov", std::move(cov)},
         {"iterations", {{"round1", r.round1_iterations}, {"round2", r.round2_iterations}}}};
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  return j;
}

Json to_json(const DiagnosisReport& d) {
  return Json{{"n", d.n},
              {"m", d.m},
              {"rho_bar", real_to_json(d.rho_bar)},
              {"rho_lower", real_to_json(d.rho_lower)},
              {"rho_upper", real_to_json(d.rho_upper)},
              {"rho_converged", d.rho_converged},
              {"girth", girth_to_json(d.girth)},
              {"walk_summable", d.walk_summable},
              {"lbp_error_bound", real_to_json(d.lbp_error_bound)}};
}

Json to_json(const PrefixCurve& curve) {
  Json pts = Json::array();
  for (const auto& p : curve.points) {
    Json jp{{"removed", p.removed},
            {"node", p.node ? Json(*p.node) : Json(nullptr)},
            {"rho_bar", real_to_json(p.rho_bar)},
            {"rho_lower", real_to_json(p.rho_lower)},
            {"rho_upper", real_to_json(p.rho_upper)},
            {"girth", girth_to_json(p.girth)},
            {"fmp_error_bound", real_to_json(p.fmp_error_bound)}};
    pts.push_back(std::move(jp));
  }
  return Json{{"points", std::move(pts)},
              {"non_increasing", curve.non_increasing},
              {"reached_forest", curve.reached_forest}};
}

}  // namespace gfmp
