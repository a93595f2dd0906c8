#include "gbs/clique.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gbs/rng.hpp"

namespace gbs {

namespace {

double global_degree(const Graph& g, int node) {
  return g.adjacency.entries.row(node).sum();
}

// Chooses one index from `candidates` according to the selection policy.
int select_node(const Graph& g, const std::vector<int>& candidates,
                NodeSelect policy, RngStream& rng) {
  if (policy == NodeSelect::uniform)
    return int(rng.below(candidates.size()));
  std::vector<double> degree(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i)
    degree[i] = global_degree(g, candidates[i]);
  return detail::pick_best(degree, [](double a, double b) { return a > b; },
                           rng);
}

}  // namespace

bool is_clique(const Graph& g, const std::vector<int>& nodes) {
  check_node_set(g, nodes, "is_clique");
  for (size_t a = 0; a < nodes.size(); ++a)
    for (size_t b = a + 1; b < nodes.size(); ++b)
      if (!g.has_edge(nodes[a], nodes[b])) return false;
  return true;
}

std::vector<int> shrink(const std::vector<int>& nodes, const Graph& g,
                        std::uint64_t seed) {
  check_node_set(g, nodes, "shrink");
  if (nodes.empty()) throw validation_error("shrink: empty node set");
  RngStream rng = RngStream::derive(seed);
  std::vector<int> current = nodes;
  std::sort(current.begin(), current.end());
  while (!is_clique(g, current)) {
    std::vector<double> degree(current.size());
    for (size_t i = 0; i < current.size(); ++i)
      degree[i] = weighted_degree_into(g, current[i], current);
    const int drop = detail::pick_best(
        degree, [](double a, double b) { return a < b; }, rng);
    current.erase(current.begin() + drop);
  }
  return current;
}

CliqueState clique_state(const Graph& g, const std::vector<int>& clique) {
  if (!is_clique(g, clique))
    throw validation_error("clique_state: input is not a clique");
  CliqueState state;
  state.clique = clique;
  std::sort(state.clique.begin(), state.clique.end());
  std::vector<char> member(size_t(g.nodes()), 0);
  for (int v : state.clique) member[size_t(v)] = 1;
  for (int v = 0; v < g.nodes(); ++v) {
    if (member[size_t(v)]) continue;
    int missing = -1, count = 0;
    for (int c : state.clique) {
      if (g.has_edge(v, c)) continue;
      missing = c;
      ++count;
    }
    if (count == 0) state.c0.push_back(v);
    if (count == 1) state.c1.emplace_back(v, missing);
  }
  return state;
}

std::vector<int> clique_c0(const Graph& g, const std::vector<int>& clique) {
  return clique_state(g, clique).c0;
}

std::vector<std::pair<int, int>> clique_c1(const Graph& g,
                                           const std::vector<int>& clique) {
  return clique_state(g, clique).c1;
}

std::vector<int> local_search(const std::vector<int>& clique, const Graph& g,
                              int max_iters, NodeSelect node_select,
                              std::uint64_t seed) {
  if (max_iters < 0) throw validation_error("local_search: negative max_iters");
  RngStream rng = RngStream::derive(seed);
  CliqueState state = clique_state(g, clique);

  auto grow = [&] {
    while (!state.c0.empty()) {
      const int pick = select_node(g, state.c0, node_select, rng);
      std::vector<int> next = state.clique;
      next.push_back(state.c0[size_t(pick)]);
      state = clique_state(g, next);
    }
  };

  grow();
  std::set<std::vector<int>> visited;
  visited.insert(state.clique);
  for (int iter = 0; iter < max_iters && !state.c1.empty(); ++iter) {
    // One swap, then regrow.  A revisited post-swap clique means the swaps
    // have cycled, which counts as a dead end.
    std::vector<int> incoming(state.c1.size());
    for (size_t i = 0; i < state.c1.size(); ++i)
      incoming[i] = state.c1[i].first;
    const int pick = select_node(g, incoming, node_select, rng);
    std::vector<int> next = state.clique;
    next.erase(std::find(next.begin(), next.end(), state.c1[size_t(pick)].second));
    next.push_back(state.c1[size_t(pick)].first);
    std::sort(next.begin(), next.end());
    if (!visited.insert(next).second) break;
    state = clique_state(g, next);
    grow();
  }
  return state.clique;
}

AdjacencyKernel weighted_rescale(const Graph& g, const Vector& node_weights,
                                 double alpha) {
  if (node_weights.size() != g.nodes())
    throw validation_error("weighted_rescale: weight count mismatch");
  if (!(alpha >= 0.0))
    throw validation_error("weighted_rescale: alpha must be nonnegative");
  for (int i = 0; i < node_weights.size(); ++i)
    if (!std::isfinite(node_weights(i)))
      throw validation_error("weighted_rescale: weights must be finite");
  const Matrix& a = g.adjacency.entries;
  Vector omega = Vector::Ones(g.nodes()) + alpha * node_weights;
  Matrix laplacian = Matrix(a.rowwise().sum().asDiagonal()) - a;
  Matrix rescaled =
      omega.asDiagonal() * laplacian * omega.asDiagonal();
  return AdjacencyKernel(std::move(rescaled));
}

AdjacencyKernel normalized_laplacian(const Graph& g) {
  const Matrix& a = g.adjacency.entries;
  Vector degree = a.rowwise().sum();
  for (int i = 0; i < degree.size(); ++i)
    if (degree(i) <= 0.0)
      throw validation_error(
          "normalized_laplacian: all nodes need positive degree");
  Vector omega = degree.cwiseSqrt().cwiseInverse();
  Matrix laplacian = Matrix(degree.asDiagonal()) - a;
  Matrix rescaled =
      omega.asDiagonal() * laplacian * omega.asDiagonal();
  return AdjacencyKernel(std::move(rescaled));
}

}  // namespace gbs
