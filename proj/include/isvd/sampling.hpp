#pragma once

#include "isvd/graph.hpp"

#include <cstdint>
#include <vector>

namespace isvd {

/// `count` distinct node pairs (i != j) that are neither edges of the graph nor
/// listed in `exclude`, drawn uniformly by rejection. Undirected pairs are
/// returned with src < dst. Throws std::runtime_error when the graph has no
/// non-edges left or the attempt budget runs out.
std::vector<Edge> sample_negatives(const GraphData& graph, Index count, std::uint64_t seed,
                                   const std::vector<Edge>& exclude = {});

/// Number of node pairs (i != j) that are neither edges nor listed in `exclude`.
Index count_non_edges(const GraphData& graph, const std::vector<Edge>& exclude = {});

struct LinkSplit {
  SparseMatrix train_adjacency;
  std::vector<Edge> train_edges;
  std::vector<Edge> held_out;
};

/// Holds out about `fraction` of the edges without disconnecting the training
/// graph: only edges outside a seeded random spanning forest are eligible.
LinkSplit split_edges(const GraphData& graph, double fraction, std::uint64_t seed);

/// Seeded uniform halving of an edge list into (first, second).
std::pair<std::vector<Edge>, std::vector<Edge>> halve_edges(std::vector<Edge> edges,
                                                            std::uint64_t seed);

}  // namespace isvd
