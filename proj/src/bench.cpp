#include "gfmp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>
#include <tuple>

#include "gfmp/analysis.hpp"
#include "gfmp/errors.hpp"
#include "gfmp/fmp.hpp"

namespace gfmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

BenchRecord failure_row(std::size_t size, std::uint64_t seed, const std::string& method) {
  BenchRecord r;
  r.size = size;
  r.seed = seed;
  r.method = method;
  r.iteration = 1;
  r.var_error = kInf;
  r.mean_error = kInf;
  r.rho = std::numeric_limits<double>::quiet_NaN();
  r.rho_rem = r.rho;
  return r;
}

void trace_lbp(const GaussianInfoModel& model, const ExactSolution& exact, std::size_t budget, double tolerance,
               BenchRecord row, std::vector<BenchRecord>& out) {
  LoopyBp bp(model, {model.h()}, BpOptions{budget, tolerance});
  for (std::size_t t = 1; t <= budget; ++t) {
    if (!bp.done()) bp.step();
    const BpResult r = bp.result();
    row.iteration = t;
    row.var_error = finite_or_inf(variance_error(r.variances, exact.variances));
    row.mean_error = finite_or_inf(mean_error(r.means[0], exact.means));
    row.converged = r.converged;
    out.push_back(row);
  }
}

// Round one is stepped once; round two restarts cold with cap t each time,
// unless round one has stopped and the previous round two already converged.
void trace_fmp(const GaussianInfoModel& model, const ExactSolution& exact, const std::vector<NodeId>& fvs,
               std::size_t budget, double tolerance, BenchRecord row, std::vector<BenchRecord>& out) {
  const SubmodelExtract extract = extract_submodel(model, fvs);
  const std::vector<Vector> potentials = first_round_potentials(extract);
  if (extract.empty_remainder()) {
    const BpResult round1 = tree_bp(extract.j_sub, potentials);
    const FmpResult f = complete_approx_fmp(model, extract, round1, BpOptions{budget, tolerance});
    for (std::size_t t = 1; t <= budget; ++t) {
      row.iteration = t;
      row.var_error = finite_or_inf(variance_error(f.variances, exact.variances));
      row.mean_error = finite_or_inf(mean_error(f.means, exact.means));
      row.converged = f.converged;
      out.push_back(row);
    }
    return;
  }

  LoopyBp round1(extract.j_sub, potentials, BpOptions{budget, tolerance});
  bool reusable = false;
  for (std::size_t t = 1; t <= budget; ++t) {
    const bool stepped = !round1.done() && (round1.step(), true);
    if (!(reusable && !stepped)) {
      const FmpResult f = complete_approx_fmp(model, extract, round1.result(), BpOptions{t, tolerance});
      row.var_error = finite_or_inf(variance_error(f.variances, exact.variances));
      row.mean_error = finite_or_inf(mean_error(f.means, exact.means));
      row.converged = f.converged;
      reusable = round1.done() && f.converged;
    }
    row.iteration = t;
    out.push_back(row);
  }
}

}  // namespace

std::size_t BenchMethod::k_for(std::size_t n) const {
  const double dn = static_cast<double>(n);
  switch (budget) {
    case Budget::kNone:
      return 0;
    case Budget::kLog:
      return n <= 1 ? 0 : static_cast<std::size_t>(std::ceil(std::log(dn)));
    case Budget::kSqrt:
      return static_cast<std::size_t>(std::ceil(std::sqrt(dn)));
    case Budget::kFull:
      return n;
  }
  return 0;
}

BenchMethod BenchMethod::parse(const std::string& label) {
  BenchMethod m;
  m.label = label;
  std::string base = label;
  const std::string worst = "-worst";
  if (base.size() > worst.size() && base.ends_with(worst)) {
    base.resize(base.size() - worst.size());
    m.mode = SelectionMode::kSmallestScore;
  }
  if (base == "lbp" && m.mode == SelectionMode::kLargestScore) {
    m.budget = Budget::kNone;
  } else if (base == "fmp-log") {
    m.budget = Budget::kLog;
  } else if (base == "fmp-sqrt") {
    m.budget = Budget::kSqrt;
  } else if (base == "fmp-full") {
    m.budget = Budget::kFull;
  } else {
    throw InvalidArgument("unknown bench method '" + label + "'");
  }
  return m;
}

std::vector<BenchRecord> bench_model(const GaussianInfoModel& model, std::size_t size, std::uint64_t seed,
                                     const std::vector<BenchMethod>& methods, std::size_t budget,
                                     double tolerance) {
  if (budget == 0) throw InvalidArgument("iteration budget must be at least 1");
  OracleOptions oracle_options;
  oracle_options.max_nodes = std::numeric_limits<std::size_t>::max();
  oracle_options.full_cov_max_nodes = 0;
  const ExactSolution exact = dense_oracle(model, oracle_options);
  const double rho = spectral_radius_abs(model).value;

  std::vector<BenchRecord> out;
  out.reserve(methods.size() * budget);
  for (const BenchMethod& method : methods) {
    BenchRecord row;
    row.size = size;
    row.seed = seed;
    row.method = method.label;
    row.rho = rho;
    const std::size_t mark = out.size();
    try {
      const std::size_t k = method.k_for(model.size());
      if (k == 0) {
        row.rho_rem = rho;
        trace_lbp(model, exact, budget, tolerance, row, out);
        continue;
      }
      const FvsResult fvs = select_pseudo_fvs(model, k, method.mode);
      row.k = fvs.nodes.size();
      row.rho_rem = spectral_radius_abs(model, fvs.nodes).value;
      trace_fmp(model, exact, fvs.nodes, budget, tolerance, row, out);
    } catch (const std::exception&) {
      out.resize(mark);
      BenchRecord fail = failure_row(size, seed, method.label);
      fail.rho = rho;
      out.push_back(fail);
    }
  }
  return out;
}

std::vector<BenchRecord> run_bench(const BenchOptions& options) {
  std::vector<BenchMethod> methods;
  for (const auto& label : options.methods) methods.push_back(BenchMethod::parse(label));
  if (methods.empty()) throw InvalidArgument("no bench methods given");
  if (options.budget == 0) throw InvalidArgument("iteration budget must be at least 1");
  for (std::size_t l : options.sizes) {
    if (l < 2) throw InvalidArgument("grid sizes must be at least 2");
    if (l > options.max_side) {
      throw InvalidArgument("grid size " + std::to_string(l) + " exceeds the dense oracle cap of " +
                            std::to_string(options.max_side));
    }
  }

  std::vector<std::pair<std::size_t, std::uint64_t>> instances;
  for (std::size_t l : options.sizes) {
    for (std::size_t s = 0; s < options.seeds; ++s) instances.emplace_back(l, options.seed_base + s);
  }
  std::vector<std::vector<BenchRecord>> results(instances.size());

  auto run_one = [&](std::size_t idx) {
    const auto [l, seed] = instances[idx];
    try {
      GenSpec spec = GenSpec::grid(l, seed);
      spec.delta = options.delta;
      spec.target_rho = options.target_rho;
      results[idx] = bench_model(gen_grid(spec), l, seed, methods, options.budget, options.tolerance);
    } catch (const std::exception&) {
      for (const auto& m : methods) results[idx].push_back(failure_row(l, seed, m.label));
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, instances.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < instances.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < instances.size(); i = next++) run_one(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<BenchRecord> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  std::stable_sort(rows.begin(), rows.end(), [](const BenchRecord& a, const BenchRecord& b) {
    return std::tie(a.size, a.seed, a.method, a.iteration) < std::tie(b.size, b.seed, b.method, b.iteration);
  });
  return rows;
}

void write_bench_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << kBenchCsvHeader << '\n';
  char buf[64];
  auto num = [&](double v) -> const char* {
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
  };
  for (const auto& r : records) {
    out << r.size << ',' << r.seed << ',' << r.method << ',' << r.k << ',' << r.iteration << ',';
    out << num(r.var_error) << ',';
    out << num(r.mean_error) << ',';
    out << (r.converged ? 1 : 0) << ',';
    out << num(r.rho) << ',';
    out << num(r.rho_rem) << '\n';
  }
}

}  // namespace gfmp
