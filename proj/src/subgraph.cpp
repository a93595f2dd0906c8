#include "gbs/subgraph.hpp"

#include <algorithm>
#include <set>

#include "gbs/parallel.hpp"
#include "gbs/rng.hpp"

namespace gbs {

namespace {

using detail::pick_best;

void record(std::map<int, std::vector<int>>& out, std::vector<int> nodes,
            int min_size, int max_size) {
  const int size = int(nodes.size());
  if (size < min_size || size > max_size) return;
  std::sort(nodes.begin(), nodes.end());
  out[size] = std::move(nodes);
}

}  // namespace

double density(const Graph& g, const std::vector<int>& nodes) {
  check_node_set(g, nodes, "density");
  const int k = int(nodes.size());
  if (k < 2) throw validation_error("density: need at least two nodes");
  return 2.0 * edge_count(g, nodes) / (double(k) * (k - 1));
}

std::map<int, std::vector<int>> resize(const std::vector<int>& nodes,
                                       const Graph& g, int min_size,
                                       int max_size, std::uint64_t seed) {
  check_node_set(g, nodes, "resize");
  if (nodes.empty()) throw validation_error("resize: empty start set");
  if (min_size < 1 || min_size > max_size || max_size > g.nodes())
    throw validation_error("resize: invalid size range");

  RngStream rng = RngStream::derive(seed);
  std::map<int, std::vector<int>> out;
  record(out, nodes, min_size, max_size);

  // Shrink from the start set: repeatedly drop a weakest member.
  std::vector<int> current = nodes;
  while (int(current.size()) > std::max(min_size, 1)) {
    std::vector<double> degree(current.size());
    for (size_t i = 0; i < current.size(); ++i)
      degree[i] = weighted_degree_into(g, current[i], current);
    const int drop =
        pick_best(degree, [](double a, double b) { return a < b; }, rng);
    current.erase(current.begin() + drop);
    record(out, current, min_size, max_size);
  }

  // Grow from the start set: repeatedly pull in the best-connected outsider.
  current = nodes;
  std::vector<char> member(size_t(g.nodes()), 0);
  for (int v : current) member[size_t(v)] = 1;
  while (int(current.size()) < max_size) {
    std::vector<int> outside;
    for (int v = 0; v < g.nodes(); ++v)
      if (!member[size_t(v)]) outside.push_back(v);
    std::vector<double> degree(outside.size());
    for (size_t i = 0; i < outside.size(); ++i)
      degree[i] = weighted_degree_into(g, outside[i], current);
    const int add =
        pick_best(degree, [](double a, double b) { return a > b; }, rng);
    current.push_back(outside[size_t(add)]);
    member[size_t(outside[size_t(add)])] = 1;
    record(out, current, min_size, max_size);
  }
  return out;
}

DenseSubgraphResult search(const std::vector<std::vector<int>>& subgraphs,
                           const Graph& g, int k_min, int k_max,
                           int max_results, std::uint64_t seed, int threads) {
  if (subgraphs.empty()) throw validation_error("search: empty seed list");
  if (max_results < 1) throw validation_error("search: max_results must be positive");
  if (k_min < 1 || k_min > k_max || k_max > g.nodes())
    throw validation_error("search: invalid size range");

  std::vector<std::map<int, std::vector<int>>> resized(subgraphs.size());
  parallel_for(int(subgraphs.size()), threads, [&](int i) {
    const std::uint64_t sub = RngStream::derive(seed, std::uint64_t(i)).next_u64();
    resized[size_t(i)] = resize(subgraphs[size_t(i)], g, k_min, k_max, sub);
  });

  DenseSubgraphResult result;
  for (int size = k_min; size <= k_max; ++size) {
    std::set<std::vector<int>> seen;
    std::vector<std::pair<double, std::vector<int>>> ranked;
    for (const auto& per_seed : resized) {
      auto it = per_seed.find(size);
      if (it == per_seed.end()) continue;
      if (!seen.insert(it->second).second) continue;
      if (size >= 2) {
        ranked.emplace_back(density(g, it->second), it->second);
      } else {
        ranked.emplace_back(0.0, it->second);
      }
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    if (int(ranked.size()) > max_results) ranked.resize(size_t(max_results));
    if (!ranked.empty()) result.by_size[size] = std::move(ranked);
  }
  return result;
}

Graph generate_planted(std::uint64_t seed) {
  const int left = 20, right = 10, total = left + right;
  Graph a = erdos_renyi(left, 0.5, RngStream::derive(seed, 1).next_u64());
  Graph b = erdos_renyi(right, 0.875, RngStream::derive(seed, 2).next_u64());

  Matrix adj = Matrix::Zero(total, total);
  adj.topLeftCorner(left, left) = a.adjacency.entries;
  adj.bottomRightCorner(right, right) = b.adjacency.entries;

  // Join through 8 random node pairs, one edge per pair, nodes distinct on
  // each side.
  RngStream rng = RngStream::derive(seed, 3);
  auto choose = [&](int n, int k) {
    std::vector<int> pool(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) pool[size_t(i)] = i;
    for (int i = 0; i < k; ++i)
      std::swap(pool[size_t(i)], pool[size_t(i) + size_t(rng.below(size_t(n - i)))]);
    pool.resize(size_t(k));
    return pool;
  };
  std::vector<int> from = choose(left, 8), to = choose(right, 8);
  for (int i = 0; i < 8; ++i) {
    const int u = from[size_t(i)], v = left + to[size_t(i)];
    adj(u, v) = adj(v, u) = 1.0;
  }
  return Graph(std::move(adj));
}

}  // namespace gbs
