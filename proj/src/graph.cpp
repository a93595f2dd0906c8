#include "gbs/graph.hpp"

#include <string>
#include <unordered_set>

#include "gbs/rng.hpp"

namespace gbs {

Graph::Graph(Matrix a) : adjacency(std::move(a)) {
  const Matrix& m = adjacency.entries;
  for (int i = 0; i < m.rows(); ++i) {
    if (m(i, i) != 0.0)
      throw validation_error("graph: adjacency diagonal must be zero");
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) < 0.0)
        throw validation_error("graph: edge weights must be nonnegative");
  }
}

int edge_count(const Graph& g, const std::vector<int>& nodes) {
  int count = 0;
  for (size_t a = 0; a < nodes.size(); ++a)
    for (size_t b = a + 1; b < nodes.size(); ++b)
      if (g.has_edge(nodes[a], nodes[b])) ++count;
  return count;
}

double weighted_degree_into(const Graph& g, int node,
                            const std::vector<int>& nodes) {
  double sum = 0;
  for (int other : nodes)
    if (other != node) sum += g.weight(node, other);
  return sum;
}

Graph erdos_renyi(int n, double p, std::uint64_t seed) {
  if (n < 1) throw validation_error("erdos_renyi: need at least one node");
  if (p < 0.0 || p > 1.0)
    throw validation_error("erdos_renyi: edge probability outside [0, 1]");
  RngStream rng = RngStream::derive(seed);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) a(i, j) = a(j, i) = 1.0;
  return Graph(std::move(a));
}

void check_node_set(const Graph& g, const std::vector<int>& nodes,
                    const char* who) {
  std::unordered_set<int> seen;
  for (int v : nodes) {
    if (v < 0 || v >= g.nodes())
      throw validation_error(std::string(who) + ": node " + std::to_string(v) +
                             " outside graph");
    if (!seen.insert(v).second)
      throw validation_error(std::string(who) + ": duplicate node " +
                             std::to_string(v));
  }
}

}  // namespace gbs
