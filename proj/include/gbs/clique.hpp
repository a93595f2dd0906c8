#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gbs/graph.hpp"

namespace gbs {

// How local search picks among candidate nodes: uniformly at random, or the
// highest weighted degree in the whole graph with uniform tie-breaks.
enum class NodeSelect { uniform, degree };

// Growth bookkeeping around a clique: c0 holds outside nodes connected to
// every clique member, c1 holds outside nodes connected to all but one,
// paired with that one excluded member.
struct CliqueState {
  std::vector<int> clique;
  std::vector<int> c0;
  std::vector<std::pair<int, int>> c1;
};

bool is_clique(const Graph& g, const std::vector<int>& nodes);

// Removes the weakest node (lowest weighted degree within the set, uniform
// tie-break) until the remainder is a clique.
std::vector<int> shrink(const std::vector<int>& nodes, const Graph& g,
                        std::uint64_t seed);

// Builds c0 and c1 for a clique; rejects non-cliques.
CliqueState clique_state(const Graph& g, const std::vector<int>& clique);
std::vector<int> clique_c0(const Graph& g, const std::vector<int>& clique);
std::vector<std::pair<int, int>> clique_c1(const Graph& g,
                                           const std::vector<int>& clique);

// Alternates growth (absorb c0 until empty) with a single c1 swap, stopping
// at a dead end, a revisited clique, or max_iters swap rounds.  The output is
// a clique at least as large as the input.
std::vector<int> local_search(const std::vector<int>& clique, const Graph& g,
                              int max_iters, NodeSelect node_select,
                              std::uint64_t seed);

// Kernel for weight-aware clique sampling: Omega (D - A) Omega with
// Omega = I + alpha diag(weights) and D the weighted-degree diagonal.
AdjacencyKernel weighted_rescale(const Graph& g, const Vector& node_weights,
                                 double alpha);

// Preset with Omega = D^{-1/2}, the normalized Laplacian; all nodes must
// have positive degree.
AdjacencyKernel normalized_laplacian(const Graph& g);

}  // namespace gbs
