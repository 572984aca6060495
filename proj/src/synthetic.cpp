#include "isvd/synthetic.hpp"

#include "isvd/random.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace isvd {

GraphData random_graph(Index n, Index m, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_graph: need at least two nodes");
  const double max_edges = double(n) * (n - 1) / 2.0;
  if (double(m) > 0.5 * max_edges) throw std::invalid_argument("random_graph: too many edges for a sparse sampler");

  Rng rng(seed);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(m) * 2);
  std::vector<Edge> edges;
  edges.reserve(m);
  while (static_cast<Index>(edges.size()) < m) {
    Index a = static_cast<Index>(rng.below(n));
    Index b = static_cast<Index>(rng.below(n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (seen.insert(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(n) + b).second)
      edges.emplace_back(a, b);
  }
  GraphData g;
  g.adjacency = adjacency_from_edges(n, edges);
  return g;
}

GraphData sbm_graph(const std::vector<Index>& sizes, double p_in, double p_out, Index d,
                    double feature_noise, Index train_per_class, std::uint64_t seed) {
  if (sizes.empty()) throw std::invalid_argument("sbm_graph: no blocks");
  const Index n = std::accumulate(sizes.begin(), sizes.end(), Index{0});
  const Index y = static_cast<Index>(sizes.size());
  Rng rng(seed);

  std::vector<int> cls(n);
  for (Index b = 0, off = 0; b < y; off += sizes[b], ++b)
    std::fill(cls.begin() + off, cls.begin() + off + sizes[b], static_cast<int>(b));

  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (rng.bernoulli(cls[i] == cls[j] ? p_in : p_out)) edges.emplace_back(i, j);

  GraphData g;
  g.adjacency = adjacency_from_edges(n, edges);

  const Matrix centroids = gaussian_matrix(y, d, rng);
  Matrix X(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) X(i, j) = centroids(cls[i], j) + feature_noise * rng.normal();
  g.features = std::move(X);

  Matrix Y = Matrix::Zero(n, y);
  for (Index i = 0; i < n; ++i) Y(i, cls[i]) = 1.0;
  g.labels = std::move(Y);
  g.label_index = cls;

  // Per-class shuffled order: first train_per_class to train, next one to validation.
  for (Index b = 0, off = 0; b < y; off += sizes[b], ++b) {
    std::vector<Index> members(sizes[b]);
    std::iota(members.begin(), members.end(), off);
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.below(i)]);
    for (Index k = 0; k < sizes[b]; ++k) {
      if (k < train_per_class)
        g.node_splits.train.push_back(members[k]);
      else if (k < train_per_class + std::max<Index>(1, sizes[b] / 5))
        g.node_splits.validation.push_back(members[k]);
      else
        g.node_splits.test.push_back(members[k]);
    }
  }
  for (auto* s : {&g.node_splits.train, &g.node_splits.validation, &g.node_splits.test})
    std::sort(s->begin(), s->end());
  return g;
}

GraphData two_triangles() {
  GraphData g;
  g.adjacency = adjacency_from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
  return g;
}

GraphData path_graph(Index n) {
  std::vector<Edge> edges;
  for (Index i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  GraphData g;
  g.adjacency = adjacency_from_edges(n, edges);
  return g;
}

}  // namespace isvd
