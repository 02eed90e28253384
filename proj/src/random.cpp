#include "radiolab/random.hpp"

#include <algorithm>
#include <set>

#include "radiolab/error.hpp"

namespace radiolab {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw PreconditionViolation("Rng::below: bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    std::uint64_t x = next();
    if (x < limit) return x % bound;
  }
}

Graph random_tree(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw PreconditionViolation("random_tree: n must be positive");
  if (n == 1) return Graph::from_edges(1, std::vector<Edge>{});
  if (n == 2) return Graph::from_edges(2, {{0, 1}});
  Rng rng(seed);
  std::vector<NodeId> code(n - 2);
  for (auto& c : code) c = static_cast<NodeId>(rng.below(n));
  return tree_from_pruefer(code);
}

Graph random_connected_graph(std::size_t n, std::size_t extra, std::uint64_t seed) {
  Graph t = random_tree(n, seed);
  std::vector<Edge> edges = t.edges();
  std::set<Edge> have(edges.begin(), edges.end());
  std::vector<Edge> missing;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (!have.count({u, v})) missing.emplace_back(u, v);
  if (extra > missing.size()) throw PreconditionViolation("random_connected_graph: too many extra edges");
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t i = 0; i < extra; ++i) {
    std::size_t j = i + rng.below(missing.size() - i);
    std::swap(missing[i], missing[j]);
    edges.push_back(missing[i]);
  }
  return Graph::from_edges(n, edges);
}

std::vector<NodeId> random_sources(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k > n) throw PreconditionViolation("random_sources: k > n");
  std::vector<NodeId> all(n);
  for (NodeId v = 0; v < n; ++v) all[v] = v;
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace radiolab
