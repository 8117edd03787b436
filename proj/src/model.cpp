#include "gfmp/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gfmp/errors.hpp"

namespace gfmp {

NotAForest::NotAForest(std::vector<std::size_t> cycle)
    : Error([&] {
        std::string msg = "graph is not a forest; cycle:";
        for (auto v : cycle) msg += " " + std::to_string(v);
        return msg;
      }()),
      cycle_(std::move(cycle)) {}

GaussianInfoModel::GaussianInfoModel(Vector diag, std::vector<Edge> edges, Vector h)
    : diag_(std::move(diag)), edges_(std::move(edges)), h_(std::move(h)) {
  const std::size_t n = diag_.size();
  if (h_.size() != n) {
    throw InvalidArgument("potential vector has length " + std::to_string(h_.size()) +
                          ", expected " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(diag_[i]) || !std::isfinite(h_[i])) {
      throw InvalidArgument("non-finite value at node " + std::to_string(i));
    }
  }
  for (auto& e : edges_) {
    if (e.i == e.j) throw InvalidArgument("self-edge at node " + std::to_string(e.i));
    if (e.i >= n || e.j >= n) {
      throw InvalidArgument("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                            ") out of range");
    }
    if (!std::isfinite(e.weight)) throw InvalidArgument("non-finite edge weight");
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j) {
      throw InvalidArgument("duplicate edge (" + std::to_string(edges_[k].i) + "," +
                            std::to_string(edges_[k].j) + ")");
    }
  }

  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : edges_) {
    if (e.weight == 0.0) continue;
    ++deg[e.i];
    ++deg[e.j];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  // Edges are sorted by (i, j), so the lower neighbors of every node arrive in
  // ascending order before the upper ones; a final sort keeps this robust.
  for (const auto& e : edges_) {
    if (e.weight == 0.0) continue;
    adjacency_[fill[e.i]++] = {e.j, e.weight};
    adjacency_[fill[e.j]++] = {e.i, e.weight};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
}

double GaussianInfoModel::entry(NodeId i, NodeId j) const {
  if (i == j) return diag_.at(i);
  auto row = neighbors(i);
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const Neighbor& nb, NodeId v) { return nb.node < v; });
  return (it != row.end() && it->node == j) ? it->weight : 0.0;
}

bool GaussianInfoModel::is_normalized() const noexcept {
  return std::all_of(diag_.begin(), diag_.end(), [](double d) { return d == 1.0; });
}

GaussianInfoModel GaussianInfoModel::with_potential(Vector h) const {
  GaussianInfoModel copy = *this;
  if (h.size() != size()) throw InvalidArgument("potential vector length mismatch");
  copy.h_ = std::move(h);
  return copy;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class LineReader {
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank line with comments stripped, split into tokens.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ss(line);
      tokens.clear();
      for (std::string tok; ss >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    ++line_no_;
    return false;
  }

  std::vector<std::string> expect(const char* what) {
    std::vector<std::string> tokens;
    if (!next(tokens)) throw ParseError(line_no_, std::string("unexpected end of file, expected ") + what);
    return tokens;
  }

  std::size_t line() const { return line_no_; }

private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::size_t parse_index(const std::string& tok, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected a non-negative integer, got '" + tok + "'");
  }
  return v;
}

double parse_real(const std::string& tok, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line, "expected a finite real number, got '" + tok + "'");
  }
  return v;
}

void expect_shape(const std::vector<std::string>& t, const char* key, std::size_t count,
                  std::size_t line) {
  if (t[0] != key || t.size() != count) {
    throw ParseError(line, std::string("malformed '") + key + "' line");
  }
}

std::size_t checked_node(const std::string& tok, std::size_t n, std::size_t line) {
  auto v = parse_index(tok, line);
  if (v >= n) {
    throw ParseError(line, "node index " + std::to_string(v) + " out of range [0, " +
                               std::to_string(n) + ")");
  }
  return v;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

GaussianInfoModel load_model(std::istream& in) {
  LineReader reader(in);
  auto t = reader.expect("header");
  if (t.size() != 2 || t[0] != "ggm" || t[1] != "1") {
    throw ParseError(reader.line(), "malformed header, expected 'ggm 1'");
  }
  t = reader.expect("node count");
  expect_shape(t, "n", 2, reader.line());
  const std::size_t n = parse_index(t[1], reader.line());
  t = reader.expect("edge count");
  expect_shape(t, "m", 2, reader.line());
  const std::size_t m = parse_index(t[1], reader.line());

  Vector diag(n, 0.0);
  std::vector<bool> seen(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    t = reader.expect("'d' line");
    expect_shape(t, "d", 3, reader.line());
    auto i = checked_node(t[1], n, reader.line());
    if (seen[i]) throw ParseError(reader.line(), "duplicate diagonal entry for node " + t[1]);
    seen[i] = true;
    diag[i] = parse_real(t[2], reader.line());
  }

  std::vector<Edge> edges;
  edges.reserve(m);
  std::set<std::pair<NodeId, NodeId>> pairs;
  for (std::size_t k = 0; k < m; ++k) {
    t = reader.expect("'e' line");
    expect_shape(t, "e", 4, reader.line());
    auto i = checked_node(t[1], n, reader.line());
    auto j = checked_node(t[2], n, reader.line());
    if (i == j) throw ParseError(reader.line(), "self-edge at node " + std::to_string(i));
    if (i > j) throw ParseError(reader.line(), "edge must be written with i < j");
    if (!pairs.emplace(i, j).second) {
      throw ParseError(reader.line(), "duplicate edge (" + t[1] + "," + t[2] + ")");
    }
    edges.push_back({i, j, parse_real(t[3], reader.line())});
  }

  Vector h(n, 0.0);
  std::fill(seen.begin(), seen.end(), false);
  for (std::size_t k = 0; k < n; ++k) {
    t = reader.expect("'h' line");
    expect_shape(t, "h", 3, reader.line());
    auto i = checked_node(t[1], n, reader.line());
    if (seen[i]) throw ParseError(reader.line(), "duplicate potential entry for node " + t[1]);
    seen[i] = true;
    h[i] = parse_real(t[2], reader.line());
  }
  std::vector<std::string> extra;
  if (reader.next(extra)) throw ParseError(reader.line(), "trailing content after potentials");
  return GaussianInfoModel(std::move(diag), std::move(edges), std::move(h));
}

GaussianInfoModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  return load_model(in);
}

void save_model(const GaussianInfoModel& model, std::ostream& out) {
  out << "ggm 1\n"
      << "n " << model.size() << "\n"
      << "m " << model.edge_count() << "\n";
  for (std::size_t i = 0; i < model.size(); ++i) out << "d " << i << ' ' << format_real(model.diag()[i]) << '\n';
  for (const auto& e : model.edges()) {
    out << "e " << e.i << ' ' << e.j << ' ' << format_real(e.weight) << '\n';
  }
  for (std::size_t i = 0; i < model.size(); ++i) out << "h " << i << ' ' << format_real(model.h()[i]) << '\n';
}

std::string save_model(const GaussianInfoModel& model) {
  std::ostringstream out;
  save_model(model, out);
  return out.str();
}

void save_model_file(const GaussianInfoModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file '" + path + "'");
  save_model(model, out);
}

// ---------------------------------------------------------------------------
// Normalization and partial correlations

Normalized normalize(const GaussianInfoModel& model) {
  const std::size_t n = model.size();
  Vector scale(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = model.diag()[i];
    if (!(d > 0.0)) {
      throw InvalidArgument("non-positive diagonal entry at node " + std::to_string(i));
    }
    scale[i] = d == 1.0 ? 1.0 : 1.0 / std::sqrt(d);
  }
  std::vector<Edge> edges = model.edges();
  for (auto& e : edges) e.weight = e.weight * scale[e.i] * scale[e.j];
  Vector h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = model.h()[i] * scale[i];
  return {GaussianInfoModel(Vector(n, 1.0), std::move(edges), std::move(h)), std::move(scale)};
}

Vector Normalized::denormalize_means(std::span<const double> means) const {
  Vector out(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) out[i] = means[i] * inv_sqrt_diag[i];
  return out;
}

Vector Normalized::denormalize_variances(std::span<const double> variances) const {
  Vector out(variances.size());
  for (std::size_t i = 0; i < variances.size(); ++i) {
    out[i] = variances[i] * inv_sqrt_diag[i] * inv_sqrt_diag[i];
  }
  return out;
}

PartialCorrelation partial_correlation(const GaussianInfoModel& model) {
  if (!model.is_normalized()) throw NotNormalized();
  PartialCorrelation r;
  r.abs_row_sums.assign(model.size(), 0.0);
  r.entries.reserve(model.edge_count());
  for (const auto& e : model.edges()) {
    if (e.weight == 0.0) continue;
    r.entries.push_back({e.i, e.j, -e.weight});
  }
  for (std::size_t i = 0; i < model.size(); ++i) {
    double s = 0.0;
    for (const auto& nb : model.neighbors(i)) s += std::abs(nb.weight);
    r.abs_row_sums[i] = s;
  }
  return r;
}

double PartialCorrelation::row_sum_min() const {
  return abs_row_sums.empty() ? 0.0 : *std::min_element(abs_row_sums.begin(), abs_row_sums.end());
}

double PartialCorrelation::row_sum_max() const {
  return abs_row_sums.empty() ? 0.0 : *std::max_element(abs_row_sums.begin(), abs_row_sums.end());
}

// ---------------------------------------------------------------------------
// Submodel extraction

SubmodelExtract extract_submodel(const GaussianInfoModel& model, std::span<const NodeId> feedback) {
  const std::size_t n = model.size();
  SubmodelExtract out;
  out.local_index.assign(n, 0);
  std::vector<bool> in_f(n, false);
  for (auto p : feedback) {
    if (p >= n) throw InvalidArgument("feedback node " + std::to_string(p) + " out of range");
    if (in_f[p]) throw InvalidArgument("feedback node " + std::to_string(p) + " listed twice");
    in_f[p] = true;
  }
  out.feedback.assign(feedback.begin(), feedback.end());
  for (NodeId v = 0; v < n; ++v) {
    if (in_f[v]) {
      out.local_index[v] = SubmodelExtract::npos;
    } else {
      out.local_index[v] = out.kept.size();
      out.kept.push_back(v);
    }
  }

  Vector diag, h;
  diag.reserve(out.kept.size());
  h.reserve(out.kept.size());
  for (auto v : out.kept) {
    diag.push_back(model.diag()[v]);
    h.push_back(model.h()[v]);
  }
  std::vector<Edge> edges;
  for (const auto& e : model.edges()) {
    if (in_f[e.i] || in_f[e.j]) continue;
    edges.push_back({out.local_index[e.i], out.local_index[e.j], e.weight});
  }
  out.j_sub = GaussianInfoModel(std::move(diag), std::move(edges), std::move(h));

  out.cross_columns.resize(out.feedback.size());
  for (std::size_t q = 0; q < out.feedback.size(); ++q) {
    for (const auto& nb : model.neighbors(out.feedback[q])) {
      if (!in_f[nb.node]) out.cross_columns[q].emplace_back(out.local_index[nb.node], nb.weight);
    }
  }
  return out;
}

Vector SubmodelExtract::cross_column_dense(std::size_t q) const {
  Vector col(kept.size(), 0.0);
  for (const auto& [t, w] : cross_columns.at(q)) col[t] = w;
  return col;
}

}  // namespace gfmp
