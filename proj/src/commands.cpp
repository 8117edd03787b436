#include "gfmp/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "gfmp/analysis.hpp"
#include "gfmp/bp.hpp"
#include "gfmp/errors.hpp"
#include "gfmp/fmp.hpp"
#include "gfmp/graph.hpp"
#include "gfmp/json_io.hpp"

namespace gfmp {

namespace {

void report_error(std::ostream& err, const char* kind, const std::string& message) {
  Json j{{"error", {{"kind", kind}, {"message", message}}}};
  err << j.dump() << '\n';
}

// Runs `body`, turning exceptions into an error object and exit code 1.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const NotAForest& e) {
    Json j{{"error", {{"kind", e.kind()}, {"message", e.what()}, {"cycle", e.cycle()}}}};
    err << j.dump() << '\n';
  } catch (const ParseError& e) {
    Json j{{"error", {{"kind", e.kind()}, {"message", e.what()}, {"line", e.line()}}}};
    err << j.dump() << '\n';
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what());
  } catch (const std::exception& e) {
    report_error(err, "error", e.what());
  }
  return kExitError;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("write to '" + path + "' failed");
}

Json reals(std::span<const double> v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(real_to_json(x));
  return arr;
}

}  // namespace

std::size_t default_k(std::size_t n) {
  if (n <= 1) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))));
}

int run_gen(const GenCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    write_text(cmd.output, save_model(generate(cmd.spec)), out);
    return kExitOk;
  });
}

int run_solve(const SolveCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GaussianInfoModel model = load_model_file(cmd.model_path);
    const BpOptions options{cmd.max_iterations, cmd.tolerance};
    const auto start = std::chrono::steady_clock::now();

    Json result{{"method", cmd.method}, {"n", model.size()}};
    bool converged = true;
    Vector means, variances;
    std::vector<NodeId> feedback;

    if (cmd.method == "dense") {
      ExactSolution exact = dense_oracle(model);
      means = std::move(exact.means);
      variances = std::move(exact.variances);
      result["iterations"] = 1;
    } else {
      const Normalized norm = normalize(model);
      const GaussianInfoModel& nm = norm.model;
      if (cmd.method == "tree-bp" || cmd.method == "lbp") {
        const Vector h = nm.h();
        const BpResult r = cmd.method == "lbp" ? lbp(nm, h, options) : tree_bp(nm, std::span(&h, 1));
        converged = r.converged;
        means = norm.denormalize_means(r.means[0]);
        variances = norm.denormalize_variances(r.variances);
        result["status"] = to_string(r.status);
        result["iterations"] = r.iterations;
        if (!r.diagnostic.empty()) result["diagnostic"] = r.diagnostic;
      } else if (cmd.method == "exact-fmp" || cmd.method == "approx-fmp") {
        FmpResult r;
        if (cmd.method == "exact-fmp") {
          feedback = cmd.fvs ? *cmd.fvs : greedy_fvs(build_graph(nm)).nodes;
          r = exact_fmp(nm, feedback);
        } else {
          if (cmd.fvs) {
            feedback = *cmd.fvs;
          } else {
            const std::size_t k = cmd.k.value_or(default_k(nm.size()));
            if (k > 0) feedback = select_pseudo_fvs(nm, k).nodes;
          }
          r = approx_fmp(nm, feedback, options);
        }
        converged = r.converged;
        means = norm.denormalize_means(r.means);
        variances = norm.denormalize_variances(r.variances);
        result["iterations"] = {{"round1", r.round1_iterations}, {"round2", r.round2_iterations}};
        if (!r.diagnostic.empty()) result["diagnostic"] = r.diagnostic;
      } else {
        throw InvalidArgument("unknown method '" + cmd.method +
                              "' (expected dense, tree-bp, lbp, exact-fmp or approx-fmp)");
      }
    }

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result["converged"] = converged;
    result["feedback_set"] = feedback;
    result["means"] = reals(means);
    result["variances"] = reals(variances);
    result["wall_time_seconds"] = seconds;
    write_text(cmd.output, result.dump(2) + "\n", out);
    return converged ? kExitOk : kExitNotConverged;
  });
}

int run_select(const SelectCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GaussianInfoModel model = normalize(load_model_file(cmd.model_path)).model;
    const FvsResult fvs =
        select_pseudo_fvs(model, cmd.k, cmd.worst ? SelectionMode::kSmallestScore : SelectionMode::kLargestScore);
    out << to_json(fvs).dump() << '\n';
    return kExitOk;
  });
}

int run_diagnose(const DiagnoseCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GaussianInfoModel model = normalize(load_model_file(cmd.model_path)).model;
    const std::size_t k = cmd.k.value_or(default_k(model.size()));
    Json j{{"model", to_json(diagnose(model))}, {"prefix", to_json(pseudo_fvs_curve(model, k))}};
    out << j.dump(2) << '\n';
    return kExitOk;
  });
}

int run_bench_command(const BenchCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<BenchRecord> rows = run_bench(cmd.options);
    if (cmd.output.empty() || cmd.output == "-") {
      write_bench_csv(rows, out);
    } else {
      std::ofstream f(cmd.output);
      if (!f) throw IoError("cannot write '" + cmd.output + "'");
      write_bench_csv(rows, f);
    }
    return kExitOk;
  });
}

}  // namespace gfmp
