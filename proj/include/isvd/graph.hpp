#pragma once

#include "isvd/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace isvd {

/// Node pair (src, dst) in dense [0, n) ids.
using Edge = std::pair<Index, Index>;

struct NodeSplits {
  std::vector<Index> train;
  std::vector<Index> validation;
  std::vector<Index> test;
};

struct EdgeSplits {
  std::vector<Edge> test_pos;
  std::vector<Edge> test_neg;
  std::vector<Edge> validation_pos;
  std::vector<Edge> validation_neg;
};

struct GraphData {
  SparseMatrix adjacency;  // n x n, non-negative; symmetric unless directed
  std::optional<Matrix> features;        // n x d
  std::optional<Matrix> labels;          // n x y, one-hot rows for labeled nodes
  std::vector<int> label_index;          // class per node, -1 when unlabeled
  NodeSplits node_splits;
  EdgeSplits edge_splits;
  std::vector<std::string> node_names;   // dense id -> id token from the input files
  bool directed = false;

  Index num_nodes() const { return adjacency.rows(); }
  /// Undirected edge count (each symmetric pair once) or arc count when directed.
  Index num_edges() const;
  /// Edge list from the adjacency; undirected graphs list each pair once with src < dst.
  std::vector<Edge> edges() const;

  /// Checks the shape and index invariants; throws ShapeError.
  void validate() const;
};

/// Builds an n x n adjacency from an edge list. Duplicate entries are summed;
/// undirected graphs are symmetrized.
SparseMatrix adjacency_from_edges(Index n, const std::vector<Edge>& edges,
                                  const std::vector<double>& weights = {}, bool directed = false);

/// Y_train: rows of `labels` kept for the listed nodes, zero elsewhere.
Matrix masked_labels(const Matrix& labels, const std::vector<Index>& keep);

}  // namespace isvd
