#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "radiolab/graph.hpp"

namespace radiolab {

// mt19937_64 plus an explicit unbiased bounded draw (rejection on the top
// multiple of the bound), so sequences do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound), bound > 0

 private:
  std::mt19937_64 eng_;
};

// Uniform labeled tree: Pruefer code of n - 2 draws below(n).
Graph random_tree(std::size_t n, std::uint64_t seed);
// random_tree(n, seed) plus `extra` distinct non-tree edges drawn uniformly.
Graph random_connected_graph(std::size_t n, std::size_t extra, std::uint64_t seed);
// k distinct nodes (partial Fisher-Yates), ascending.
std::vector<NodeId> random_sources(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace radiolab
