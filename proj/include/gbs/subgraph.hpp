#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "gbs/graph.hpp"

namespace gbs {

// Ranked dense-subgraph candidates, keyed by subgraph size.  Lists are sorted
// by density descending with lexicographic node-list tie-breaks, and capped at
// the search's max_results.
struct DenseSubgraphResult {
  std::map<int, std::vector<std::pair<double, std::vector<int>>>> by_size;
};

// Fraction of possible edges present in the induced subgraph,
// 2 |E(S)| / (|S| (|S| - 1)).  Requires at least two nodes.
double density(const Graph& g, const std::vector<int>& nodes);

// Shrinks and grows the start set one node at a time to cover every size in
// [min_size, max_size]: shrinking drops a node of minimal weighted degree
// within the current set, growing adds an outside node of maximal weighted
// degree into it, ties broken uniformly at random under the seed.
std::map<int, std::vector<int>> resize(const std::vector<int>& nodes,
                                       const Graph& g, int min_size,
                                       int max_size, std::uint64_t seed);

// Resizes every seed subgraph over [k_min, k_max] and keeps the top
// max_results densest distinct node sets per size.
DenseSubgraphResult search(const std::vector<std::vector<int>>& subgraphs,
                           const Graph& g, int k_min, int k_max,
                           int max_results, std::uint64_t seed, int threads = 1);

// Random 30-node benchmark instance: G(20, 0.5) joined with a planted
// G(10, 0.875) on nodes 20..29 through 8 random cross edges.
Graph generate_planted(std::uint64_t seed);

}  // namespace gbs
