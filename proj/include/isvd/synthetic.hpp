#pragma once

// Seeded toy graphs for tests, benchmarks and smoke runs.

#include "isvd/graph.hpp"

#include <cstdint>
#include <vector>

namespace isvd {

/// Undirected graph with n nodes and (up to) m distinct uniform random edges, no self-loops.
GraphData random_graph(Index n, Index m, std::uint64_t seed);

/// Stochastic block model with node features: blocks of the given sizes,
/// intra-block edge probability p_in and inter-block p_out. Features are d-dim
/// noisy class centroids; labels are one-hot per block. Train/validation/test
/// take train_per_class nodes per class, then validation, then the rest.
GraphData sbm_graph(const std::vector<Index>& sizes, double p_in, double p_out, Index d,
                    double feature_noise, Index train_per_class, std::uint64_t seed);

/// Two triangles {0,1,2} and {3,4,5} joined by the edge 2-3.
GraphData two_triangles();

GraphData path_graph(Index n);

}  // namespace isvd
