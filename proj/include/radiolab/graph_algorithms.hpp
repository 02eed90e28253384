#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "radiolab/graph.hpp"

namespace radiolab {

std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId src);
std::uint32_t eccentricity(const Graph& g, NodeId v);
std::vector<NodeId> center(const Graph& g);  // ascending
Graph square_graph(const Graph& g);
Coloring greedy_coloring(const Graph& g, std::span<const NodeId> order);
Coloring distance_two_coloring(const Graph& g);

struct BruteForceLimits {
  std::size_t max_nodes = 10;
};

bool is_automorphism(const Graph& g, const Permutation& p);
bool is_identity(const Permutation& p);
Permutation compose(const Permutation& a, const Permutation& b);  // a after b

// Trees: canonical-form enumeration, capped at max_count (LimitExceeded).
// Other graphs: backtracking, only for node_count <= limits.max_nodes.
std::vector<Permutation> enumerate_automorphisms(const Graph& g, BruteForceLimits limits = {},
                                                 std::size_t max_count = 1u << 20);
std::vector<Permutation> brute_force_automorphisms(const Graph& g, BruteForceLimits limits = {});

bool is_distinguishing(const Graph& g, const Coloring& c, BruteForceLimits limits = {});
// Checks against an explicit automorphism list (used as an oracle).
bool is_distinguishing_by_list(const Coloring& c, std::span<const Permutation> automorphisms);

struct Distinguishing {
  std::uint32_t number = 1;
  Coloring witness;
};
Distinguishing distinguishing_number(const Graph& g, BruteForceLimits limits = {});
// Exhaustive search over colorings; small graphs only.
Distinguishing brute_force_distinguishing_number(const Graph& g, BruteForceLimits limits = {});

bool check_path_symmetry(const Graph& tree, const Permutation& p, NodeId x);
// Path x = v_1, ..., v_{l+1} = y in a tree.
std::vector<NodeId> tree_path(const Graph& tree, NodeId x, NodeId y);

// Rooted canonical class ids: equal ids iff isomorphic rooted subtrees
// (colored when colors is non-empty). Ids are only comparable within one call.
std::vector<std::uint32_t> rooted_classes(const RootedTreeView& t,
                                          std::span<const std::uint32_t> colors = {});

// Canonical string of an unrooted tree (center-rooted), for deduplication.
std::string tree_canonical_form(const Graph& tree);
// All non-isomorphic trees on n nodes (Pruefer enumeration, n <= 10).
std::vector<Graph> all_trees(std::size_t n);

}  // namespace radiolab
