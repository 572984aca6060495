#include "isvd/graph.hpp"
#include "isvd/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace isvd {

Index GraphData::num_edges() const {
  if (directed) return adjacency.nonZeros();
  Index m = 0;
  for (Index i = 0; i < adjacency.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(adjacency, i); it; ++it)
      if (it.col() >= i) ++m;
  return m;
}

std::vector<Edge> GraphData::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (Index i = 0; i < adjacency.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(adjacency, i); it; ++it)
      if (directed || it.col() >= i) out.emplace_back(i, it.col());
  return out;
}

void GraphData::validate() const {
  const Index n = num_nodes();
  if (adjacency.cols() != n) throw ShapeError("adjacency is not square");
  if (features && features->rows() != n)
    throw ShapeError("features have " + std::to_string(features->rows()) + " rows, expected " +
                     std::to_string(n));
  if (labels && labels->rows() != n)
    throw ShapeError("labels have " + std::to_string(labels->rows()) + " rows, expected " +
                     std::to_string(n));
  if (!label_index.empty() && static_cast<Index>(label_index.size()) != n)
    throw ShapeError("label index has the wrong length");
  auto check = [n](const std::vector<Index>& idx, const char* name) {
    for (Index i : idx)
      if (i < 0 || i >= n)
        throw ShapeError(std::string(name) + " index " + std::to_string(i) + " out of range [0, " +
                         std::to_string(n) + ")");
  };
  check(node_splits.train, "train");
  check(node_splits.validation, "validation");
  check(node_splits.test, "test");
  auto check_edges = [n](const std::vector<Edge>& es, const char* name) {
    for (const auto& [a, b] : es)
      if (a < 0 || a >= n || b < 0 || b >= n)
        throw ShapeError(std::string(name) + " edge (" + std::to_string(a) + ", " +
                         std::to_string(b) + ") out of range");
  };
  check_edges(edge_splits.test_pos, "test_pos");
  check_edges(edge_splits.test_neg, "test_neg");
  check_edges(edge_splits.validation_pos, "validation_pos");
  check_edges(edge_splits.validation_neg, "validation_neg");
}

SparseMatrix adjacency_from_edges(Index n, const std::vector<Edge>& edges,
                                  const std::vector<double>& weights, bool directed) {
  if (!weights.empty() && weights.size() != edges.size())
    throw ShapeError("edge weights do not match the edge count");
  std::vector<Triplet> trips;
  trips.reserve(edges.size() * (directed ? 1 : 2));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw ShapeError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") out of range for " + std::to_string(n) + " nodes");
    const double w = weights.empty() ? 1.0 : weights[e];
    trips.emplace_back(a, b, w);
    if (!directed && a != b) trips.emplace_back(b, a, w);
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

Matrix masked_labels(const Matrix& labels, const std::vector<Index>& keep) {
  Matrix out = Matrix::Zero(labels.rows(), labels.cols());
  for (Index i : keep) {
    if (i < 0 || i >= labels.rows()) throw ShapeError("label mask index out of range");
    out.row(i) = labels.row(i);
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::optional<long long> parse_int(const std::string& s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return in;
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& msg) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + msg);
}

// Maps node tokens to dense ids. In integer mode a token must be an integer
// below `limit` (when known) and is used as-is.
class NodeIds {
 public:
  NodeIds(bool integer_mode, std::optional<Index> limit) : integer_(integer_mode), limit_(limit) {}

  Index resolve(const std::string& tok, const std::string& path, std::size_t line) {
    if (integer_) {
      const auto v = parse_int(tok);
      if (!v || *v < 0) fail(path, line, "node id '" + tok + "' is not a non-negative integer");
      if (limit_ && *v >= *limit_)
        fail(path, line, "node id " + tok + " out of declared range [0, " + std::to_string(*limit_) + ")");
      max_ = std::max<Index>(max_, *v);
      return *v;
    }
    auto [it, inserted] = ids_.emplace(tok, static_cast<Index>(names_.size()));
    if (inserted) names_.push_back(tok);
    return it->second;
  }

  Index count() const {
    if (!integer_) return static_cast<Index>(names_.size());
    return limit_ ? *limit_ : max_ + 1;
  }

  std::vector<std::string> names() const {
    if (!integer_) return names_;
    std::vector<std::string> out(count());
    for (Index i = 0; i < count(); ++i) out[i] = std::to_string(i);
    return out;
  }

 private:
  bool integer_;
  std::optional<Index> limit_;
  Index max_ = -1;
  std::unordered_map<std::string, Index> ids_;
  std::vector<std::string> names_;
};

Matrix read_csv(const std::string& path) {
  auto in = open(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(t);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto v = parse_double(trim(cell));
      if (!v) fail(path, lineno, "cannot parse '" + trim(cell) + "' as a number");
      if (!std::isfinite(*v)) fail(path, lineno, "non-finite value");
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(path, lineno, "expected " + std::to_string(rows.front().size()) + " columns, found " +
                             std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no rows");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

std::string json_token(const nlohmann::json& v, const std::string& path) {
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_string()) return v.get<std::string>();
  throw ParseError(path + ": split entries must be integers or strings, got " + v.dump());
}

}  // namespace

void save_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write file");
  out << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

Matrix load_matrix_csv(const std::string& path) { return read_csv(path); }

GraphPaths paths_in_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  GraphPaths p;
  const fs::path root(dir);
  p.edges = (root / "edges.tsv").string();
  auto opt = [&](const char* name) {
    const fs::path f = root / name;
    return fs::exists(f) ? f.string() : std::string();
  };
  p.features = opt("features.csv");
  p.labels = opt("labels.tsv");
  p.splits = opt("splits.json");
  return p;
}

GraphData load_graph(const GraphPaths& paths, std::vector<std::string>* warnings) {
  GraphData g;
  g.directed = paths.directed;

  std::optional<Matrix> features;
  if (!paths.features.empty()) features = read_csv(paths.features);
  const bool integer_ids = !paths.features.empty() || !paths.labels.empty();
  NodeIds ids(integer_ids, features ? std::optional<Index>(features->rows()) : std::nullopt);

  // Edges, merged per (src, dst) or per unordered pair.
  std::map<Edge, double> merged;
  std::size_t duplicates = 0;
  {
    auto in = open(paths.edges);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == '%') continue;
      const auto tok = split_ws(t);
      if (tok.size() != 2 && tok.size() != 3)
        fail(paths.edges, lineno, "expected 'src dst [weight]', found " + std::to_string(tok.size()) + " fields");
      const Index a = ids.resolve(tok[0], paths.edges, lineno);
      const Index b = ids.resolve(tok[1], paths.edges, lineno);
      double w = 1.0;
      if (tok.size() == 3) {
        const auto v = parse_double(tok[2]);
        if (!v || !std::isfinite(*v) || *v < 0.0)
          fail(paths.edges, lineno, "weight '" + tok[2] + "' is not a finite non-negative number");
        w = *v;
      }
      Edge key = paths.directed ? Edge{a, b} : Edge{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = merged.emplace(key, w);
      if (!inserted) {
        it->second += w;
        ++duplicates;
      }
    }
  }
  if (duplicates && warnings)
    warnings->push_back(paths.edges + ": merged " + std::to_string(duplicates) +
                        " duplicate edges by summing their weights");

  // Labels.
  std::vector<std::pair<Index, int>> label_rows;
  if (!paths.labels.empty()) {
    auto in = open(paths.labels);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto tok = split_ws(t);
      if (tok.size() != 2) fail(paths.labels, lineno, "expected 'node class'");
      const Index node = ids.resolve(tok[0], paths.labels, lineno);
      const auto cls = parse_int(tok[1]);
      if (!cls || *cls < 0) fail(paths.labels, lineno, "class '" + tok[1] + "' is not a non-negative integer");
      label_rows.emplace_back(node, static_cast<int>(*cls));
    }
  }

  // Splits; edge-only inputs may introduce nodes that only appear here.
  nlohmann::json splits;
  if (!paths.splits.empty()) {
    auto in = open(paths.splits);
    try {
      splits = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(paths.splits + ": " + e.what());
    }
    if (!splits.is_object()) throw ParseError(paths.splits + ": expected a JSON object");
  }
  auto node_list = [&](const char* key) {
    std::vector<Index> out;
    if (!splits.contains(key)) return out;
    for (const auto& v : splits.at(key)) out.push_back(ids.resolve(json_token(v, paths.splits), paths.splits, 0));
    return out;
  };
  auto edge_list = [&](const char* key) {
    std::vector<Edge> out;
    if (!splits.contains(key)) return out;
    for (const auto& v : splits.at(key)) {
      if (!v.is_array() || v.size() != 2) throw ParseError(paths.splits + ": " + key + " entries must be pairs");
      out.emplace_back(ids.resolve(json_token(v[0], paths.splits), paths.splits, 0),
                       ids.resolve(json_token(v[1], paths.splits), paths.splits, 0));
    }
    return out;
  };
  g.node_splits.train = node_list("train");
  g.node_splits.validation = node_list("validation");
  g.node_splits.test = node_list("test");
  g.edge_splits.test_pos = edge_list("test_pos");
  g.edge_splits.test_neg = edge_list("test_neg");
  g.edge_splits.validation_pos = edge_list("validation_pos");
  g.edge_splits.validation_neg = edge_list("validation_neg");

  const Index n = ids.count();
  if (n == 0) throw ParseError(paths.edges + ": no nodes");
  std::vector<Edge> edges;
  std::vector<double> weights;
  edges.reserve(merged.size());
  weights.reserve(merged.size());
  for (const auto& [e, w] : merged) {
    edges.push_back(e);
    weights.push_back(w);
  }
  g.adjacency = adjacency_from_edges(n, edges, weights, paths.directed);
  g.node_names = ids.names();
  g.features = std::move(features);

  if (!label_rows.empty()) {
    int classes = 0;
    for (const auto& [node, c] : label_rows) classes = std::max(classes, c + 1);
    g.label_index.assign(n, -1);
    Matrix Y = Matrix::Zero(n, classes);
    for (const auto& [node, c] : label_rows) {
      if (g.label_index[node] >= 0 && g.label_index[node] != c)
        throw ParseError(paths.labels + ": node " + std::to_string(node) + " has two classes");
      g.label_index[node] = c;
      Y(node, c) = 1.0;
    }
    g.labels = std::move(Y);
  }

  g.validate();
  return g;
}

}  // namespace isvd
