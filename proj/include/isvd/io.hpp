#pragma once

#include "isvd/graph.hpp"

#include <string>
#include <vector>

namespace isvd {

struct GraphPaths {
  std::string edges;     // "src dst [weight]" per line; '#' starts a comment
  std::string features;  // CSV, one row per node
  std::string labels;    // "node class" per line
  std::string splits;    // JSON with node and/or edge splits
  bool directed = false;
};

/// Reads a graph from plain-text files. Node ids must be integers in [0, n)
/// whenever features or labels are given (n = feature rows, or the largest id
/// plus one); edge-only inputs may use arbitrary tokens, which are numbered in
/// order of first appearance. Non-fatal findings (merged duplicates) are
/// appended to `warnings`.
GraphData load_graph(const GraphPaths& paths, std::vector<std::string>* warnings = nullptr);

/// Directory layout used by `--graph DIR`: edges.tsv, features.csv,
/// labels.tsv, splits.json (each optional except edges.tsv).
GraphPaths paths_in_directory(const std::string& dir);

void save_matrix_csv(const std::string& path, const Matrix& m);
Matrix load_matrix_csv(const std::string& path);

}  // namespace isvd
