#pragma once

#include <cstdint>
#include <vector>

#include "gbs/gaussian.hpp"
#include "gbs/types.hpp"

namespace gbs {

// Application graph over nodes 0..m-1: a symmetric adjacency with zero
// diagonal and nonnegative weights.  An entry is an edge iff its weight is
// positive; weighted degrees are used wherever the algorithms rank nodes.
struct Graph {
  AdjacencyKernel adjacency;

  explicit Graph(Matrix a);
  int nodes() const { return adjacency.modes(); }
  double weight(int i, int j) const { return adjacency.entries(i, j); }
  bool has_edge(int i, int j) const { return adjacency.entries(i, j) > 0.0; }
};

// Counts edges of the induced subgraph (pairs with positive weight).
int edge_count(const Graph& g, const std::vector<int>& nodes);

// Sum of weights from `node` into `nodes`, skipping `node` itself.
double weighted_degree_into(const Graph& g, int node,
                            const std::vector<int>& nodes);

// Erdos-Renyi graph G(n, p) with unit edge weights, deterministic in seed.
Graph erdos_renyi(int n, double p, std::uint64_t seed);

// Validates that all entries are distinct in-range node labels.
void check_node_set(const Graph& g, const std::vector<int>& nodes,
                    const char* who);

namespace detail {

// Picks uniformly among the indices attaining the best score.  `better`
// returns true when the first score strictly improves on the second.
template <typename Score, typename Better, typename Rng>
int pick_best(const std::vector<Score>& scores, Better better, Rng& rng) {
  std::vector<int> best;
  for (int i = 0; i < int(scores.size()); ++i) {
    if (best.empty() || better(scores[size_t(i)], scores[size_t(best.front())])) {
      best.assign(1, i);
    } else if (!better(scores[size_t(best.front())], scores[size_t(i)])) {
      best.push_back(i);
    }
  }
  return best[size_t(rng.below(best.size()))];
}

}  // namespace detail

}  // namespace gbs
