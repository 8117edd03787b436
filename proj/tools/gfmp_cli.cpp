// gfmp: generate Gaussian models, solve them, and trace solver error.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gfmp/commands.hpp"

namespace {

std::pair<double, double> parse_interval(const std::string& text) {
  std::istringstream in(text);
  double lo = 0, hi = 0;
  char comma = 0;
  if (!(in >> lo >> comma >> hi) || comma != ',' || !in.eof()) {
    throw CLI::ValidationError("--target-rho", "expected LO,HI but got '" + text + "'");
  }
  return {lo, hi};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian graphical model inference with feedback message passing"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random model");
  gen->require_subcommand(1);
  gfmp::GenCommand gen_cmd;
  std::string target_rho;
  double delta = 0.1;

  auto* gen_grid = gen->add_subcommand("grid", "l x l grid");
  std::size_t side = 0;
  std::uint64_t seed = 0;
  bool attractive = false;
  gen_grid->add_option("--size", side, "grid side l")->required();
  gen_grid->add_option("--seed", seed)->required();
  gen_grid->add_option("--delta", delta, "margin over |lambda_min|");
  gen_grid->add_option("--target-rho", target_rho, "LO,HI interval for the spectral radius");
  gen_grid->add_flag("--attractive", attractive, "non-negative partial correlations");
  gen_grid->add_option("-o,--output", gen_cmd.output)->required();

  auto* gen_er = gen->add_subcommand("er", "Erdos-Renyi G(n, c/n)");
  std::size_t nodes = 0;
  double c = 0;
  gen_er->add_option("--n", nodes)->required();
  gen_er->add_option("--c", c)->required();
  gen_er->add_option("--seed", seed)->required();
  gen_er->add_option("--delta", delta);
  gen_er->add_option("--target-rho", target_rho);
  gen_er->add_flag("--attractive", attractive);
  gen_er->add_option("-o,--output", gen_cmd.output)->required();

  // solve
  auto* solve = app.add_subcommand("solve", "compute means and variances");
  gfmp::SolveCommand solve_cmd;
  std::vector<std::size_t> fvs;
  std::size_t k = 0;
  solve->add_option("--method", solve_cmd.method)
      ->required()
      ->check(CLI::IsMember({"dense", "tree-bp", "lbp", "exact-fmp", "approx-fmp"}));
  auto* solve_k = solve->add_option("--k", k, "pseudo-FVS size for approx-fmp (default ceil(ln n))");
  auto* solve_fvs = solve->add_option("--fvs", fvs, "explicit feedback nodes")->delimiter(',');
  solve->add_option("--max-iters", solve_cmd.max_iterations);
  solve->add_option("--tol", solve_cmd.tolerance);
  solve->add_option("model", solve_cmd.model_path)->required();
  solve->add_option("-o,--output", solve_cmd.output)->required();

  // select-fvs
  auto* select = app.add_subcommand("select-fvs", "pick a pseudo feedback vertex set");
  gfmp::SelectCommand select_cmd;
  select->add_option("--k", select_cmd.k)->required();
  select->add_flag("--worst", select_cmd.worst, "smallest score first (control)");
  select->add_option("model", select_cmd.model_path)->required();

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "walk-summability and error-bound report");
  gfmp::DiagnoseCommand diag_cmd;
  std::size_t diag_k = 0;
  auto* diag_k_opt = diag->add_option("--k", diag_k);
  diag->add_option("model", diag_cmd.model_path)->required();

  // bench
  auto* bench = app.add_subcommand("bench", "error-vs-iteration traces on random grids");
  gfmp::BenchCommand bench_cmd;
  auto& bo = bench_cmd.options;
  bench->add_option("--sizes", bo.sizes)->delimiter(',');
  bench->add_option("--seeds", bo.seeds);
  bench->add_option("--seed-base", bo.seed_base);
  bench->add_option("--budget", bo.budget);
  bench->add_option("--methods", bo.methods)->delimiter(',');
  bench->add_option("--delta", bo.delta);
  bench->add_option("--target-rho", target_rho);
  bench->add_option("--max-size", bo.max_side);
  bench->add_option("--jobs", bo.jobs);
  bench->add_option("-o,--output", bench_cmd.output)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return gfmp::kExitError;
  }

  std::optional<std::pair<double, double>> interval;
  try {
    if (!target_rho.empty()) interval = parse_interval(target_rho);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return gfmp::kExitError;
  }

  if (gen->parsed()) {
    if (gen_grid->parsed()) {
      gen_cmd.spec = gfmp::GenSpec::grid(side, seed);
    } else {
      gen_cmd.spec = gfmp::GenSpec::erdos_renyi(nodes, c, seed);
    }
    gen_cmd.spec.delta = delta;
    gen_cmd.spec.target_rho = interval;
    gen_cmd.spec.attractive = attractive;
    return gfmp::run_gen(gen_cmd, std::cout, std::cerr);
  }
  if (solve->parsed()) {
    if (*solve_k) solve_cmd.k = k;
    if (*solve_fvs) solve_cmd.fvs = fvs;
    return gfmp::run_solve(solve_cmd, std::cout, std::cerr);
  }
  if (select->parsed()) return gfmp::run_select(select_cmd, std::cout, std::cerr);
  if (diag->parsed()) {
    if (*diag_k_opt) diag_cmd.k = diag_k;
    return gfmp::run_diagnose(diag_cmd, std::cout, std::cerr);
  }
  bo.target_rho = interval;
  return gfmp::run_bench_command(bench_cmd, std::cout, std::cerr);
}
