#pragma once

// Subcommand bodies behind the gfmp executable. Each returns the process exit
// code: 0 on success, 2 when a solver ran but did not converge, 1 on usage,
// I/O or solver errors. Errors are written to `err` as a one-line JSON object
// {"error": {"kind": ..., "message": ...}}.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gfmp/bench.hpp"
#include "gfmp/generate.hpp"
#include "gfmp/model.hpp"

namespace gfmp {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitNotConverged = 2 };

struct GenCommand {
  GenSpec spec;
  std::string output;  // empty: write to `out`
};

struct SolveCommand {
  std::string model_path;
  std::string method;  // dense | tree-bp | lbp | exact-fmp | approx-fmp
  std::optional<std::size_t> k;
  std::optional<std::vector<NodeId>> fvs;
  std::size_t max_iterations = 1000;
  double tolerance = 1e-10;
  std::string output;
};

struct SelectCommand {
  std::string model_path;
  std::size_t k = 0;
  bool worst = false;
};

struct DiagnoseCommand {
  std::string model_path;
  std::optional<std::size_t> k;
};

struct BenchCommand {
  BenchOptions options;
  std::string output;
};

/// ⌈ln n⌉, the default feedback budget.
std::size_t default_k(std::size_t n);

int run_gen(const GenCommand& cmd, std::ostream& out, std::ostream& err);
int run_solve(const SolveCommand& cmd, std::ostream& out, std::ostream& err);
int run_select(const SelectCommand& cmd, std::ostream& out, std::ostream& err);
int run_diagnose(const DiagnoseCommand& cmd, std::ostream& out, std::ostream& err);
int run_bench_command(const BenchCommand& cmd, std::ostream& out, std::ostream& err);

}  // namespace gfmp
