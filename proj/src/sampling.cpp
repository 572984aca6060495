#include "isvd/sampling.hpp"

#include "isvd/random.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace isvd {

namespace {

struct EdgeHash {
  std::size_t operator()(const Edge& e) const {
    return std::hash<std::uint64_t>()(static_cast<std::uint64_t>(e.first) * 0x9e3779b97f4a7c15ULL ^
                                      static_cast<std::uint64_t>(e.second));
  }
};

Edge canonical(Edge e, bool directed) {
  if (!directed && e.first > e.second) std::swap(e.first, e.second);
  return e;
}

// Union-find with path halving.
struct Forest {
  std::vector<Index> parent;
  explicit Forest(Index n) : parent(n) { std::iota(parent.begin(), parent.end(), Index{0}); }
  Index find(Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

using PairSet = std::unordered_set<Edge, EdgeHash>;

PairSet taken_pairs(const GraphData& graph, const std::vector<Edge>& exclude) {
  PairSet taken;
  for (const Edge& e : graph.edges())
    if (e.first != e.second) taken.insert(canonical(e, graph.directed));
  for (const Edge& e : exclude)
    if (e.first != e.second) taken.insert(canonical(e, graph.directed));
  return taken;
}

double pair_count(const GraphData& graph) {
  const double n = static_cast<double>(graph.num_nodes());
  return graph.directed ? n * (n - 1) : n * (n - 1) / 2.0;
}

}  // namespace

Index count_non_edges(const GraphData& graph, const std::vector<Edge>& exclude) {
  return static_cast<Index>(pair_count(graph) - static_cast<double>(taken_pairs(graph, exclude).size()));
}

std::vector<Edge> sample_negatives(const GraphData& graph, Index count, std::uint64_t seed,
                                   const std::vector<Edge>& exclude) {
  if (count < 0) throw std::invalid_argument("negative sample count must be >= 0");
  const Index n = graph.num_nodes();
  const bool directed = graph.directed;

  PairSet taken = taken_pairs(graph, exclude);
  const double available = pair_count(graph) - static_cast<double>(taken.size());
  if (available <= 0.0) throw std::runtime_error("sample_negatives: no negatives exist (graph is complete)");
  if (static_cast<double>(count) > available)
    throw std::runtime_error("sample_negatives: requested " + std::to_string(count) + " negatives but only " +
                             std::to_string(static_cast<long long>(available)) + " non-edges exist");

  Rng rng(seed);
  std::vector<Edge> out;
  out.reserve(count);
  const std::uint64_t budget = std::max<std::uint64_t>(10000, 200 * static_cast<std::uint64_t>(count));
  std::uint64_t attempts = 0;
  while (static_cast<Index>(out.size()) < count) {
    if (++attempts > budget)
      throw std::runtime_error("sample_negatives: gave up after " + std::to_string(budget) +
                               " attempts; the graph is too dense");
    const Index a = static_cast<Index>(rng.below(n));
    const Index b = static_cast<Index>(rng.below(n));
    if (a == b) continue;
    const Edge e = canonical({a, b}, directed);
    if (taken.insert(e).second) out.push_back(e);
  }
  return out;
}

LinkSplit split_edges(const GraphData& graph, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("split fraction must lie in (0, 1)");
  std::vector<Edge> edges = graph.edges();
  std::vector<double> weights;
  weights.reserve(edges.size());
  for (const Edge& e : edges) weights.push_back(graph.adjacency.coeff(e.first, e.second));

  Rng rng(seed);
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  // Edges joining two components in shuffled order form a random spanning
  // forest; everything else can be removed without disconnecting anything.
  Forest forest(graph.num_nodes());
  std::vector<char> tree(edges.size(), 0);
  for (std::size_t idx : order)
    if (forest.unite(edges[idx].first, edges[idx].second)) tree[idx] = 1;

  const auto target = static_cast<std::size_t>(fraction * static_cast<double>(edges.size()));
  std::vector<char> held(edges.size(), 0);
  std::size_t taken = 0;
  for (std::size_t idx : order) {
    if (taken == target) break;
    if (tree[idx] || edges[idx].first == edges[idx].second) continue;
    held[idx] = 1;
    ++taken;
  }

  LinkSplit out;
  std::vector<double> train_w;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (held[i]) {
      out.held_out.push_back(edges[i]);
    } else {
      out.train_edges.push_back(edges[i]);
      train_w.push_back(weights[i]);
    }
  }
  out.train_adjacency = adjacency_from_edges(graph.num_nodes(), out.train_edges, train_w, graph.directed);
  return out;
}

std::pair<std::vector<Edge>, std::vector<Edge>> halve_edges(std::vector<Edge> edges, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = edges.size(); i > 1; --i) std::swap(edges[i - 1], edges[rng.below(i)]);
  const auto half = edges.size() / 2;
  std::vector<Edge> second(edges.begin() + static_cast<std::ptrdiff_t>(half), edges.end());
  edges.resize(half);
  return {std::move(edges), std::move(second)};
}

}  // namespace isvd
