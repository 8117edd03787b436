#pragma once

// Error-vs-iteration traces for LBP and approximate FMP on random grids.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gfmp/bp.hpp"
#include "gfmp/generate.hpp"
#include "gfmp/graph.hpp"

namespace gfmp {

/// How a bench method picks its feedback nodes.
struct BenchMethod {
  std::string label;
  enum class Budget { kNone, kLog, kSqrt, kFull } budget = Budget::kNone;
  SelectionMode mode = SelectionMode::kLargestScore;

  /// k for a graph of n nodes: 0, ⌈ln n⌉, ⌈√n⌉ or n.
  std::size_t k_for(std::size_t n) const;

  /// Known labels: lbp, fmp-log, fmp-sqrt, fmp-full, and the -worst variants
  /// of the FMP methods (smallest-score selection). Throws on unknown labels.
  static BenchMethod parse(const std::string& label);
};

struct BenchRecord {
  std::size_t size = 0;  // grid side l
  std::uint64_t seed = 0;
  std::string method;
  std::size_t k = 0;
  std::size_t iteration = 0;
  double var_error = 0.0;
  double mean_error = 0.0;
  bool converged = false;
  double rho = 0.0;
  double rho_rem = 0.0;
};

struct BenchOptions {
  std::vector<std::size_t> sizes{10, 20, 40};
  std::size_t seeds = 20;
  std::uint64_t seed_base = 1;
  std::size_t budget = 100;
  std::vector<std::string> methods{"lbp", "fmp-log", "fmp-sqrt"};
  double delta = 0.1;
  std::optional<std::pair<double, double>> target_rho;
  double tolerance = 1e-10;
  std::size_t max_side = 70;
  std::size_t jobs = 1;
};

/// Traces for one model: for every method and t = 1..budget, the errors of
/// the run capped at t iterations in each loopy BP round.
std::vector<BenchRecord> bench_model(const GaussianInfoModel& model, std::size_t size, std::uint64_t seed,
                                     const std::vector<BenchMethod>& methods, std::size_t budget,
                                     double tolerance = 1e-10);

/// Full sweep over sizes x seeds; rows sorted by (size, seed, method, iteration).
std::vector<BenchRecord> run_bench(const BenchOptions& options);

inline constexpr const char* kBenchCsvHeader =
    "size,seed,method,k,iteration,var_error,mean_error,converged,rho,rho_rem";

void write_bench_csv(const std::vector<BenchRecord>& records, std::ostream& out);

}  // namespace gfmp
