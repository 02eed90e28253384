#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace radiolab {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Simple undirected connected graph on nodes 0..n-1. Adjacency lists are
// kept sorted so every traversal is deterministic.
class Graph {
 public:
  Graph() = default;

  // Validates: ids in range, no loops, no duplicate edges, connected.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);
  static Graph from_edges(std::size_t n, std::initializer_list<Edge> edges) {
    std::vector<Edge> e(edges);
    return from_edges(n, std::span<const Edge>(e));
  }

  std::size_t node_count() const { return adj_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::span<const NodeId> neighbors(NodeId v) const { return adj_.at(v); }
  std::size_t degree(NodeId v) const { return adj_.at(v).size(); }
  std::size_t max_degree() const;
  bool adjacent(NodeId u, NodeId v) const;
  bool is_tree() const { return edge_count_ + 1 == adj_.size(); }
  std::vector<Edge> edges() const;  // u < v, lexicographic

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<NodeId>> adj_;
  std::size_t edge_count_ = 0;
};

// Rooted orientation of a tree (or BFS tree of a general graph).
struct RootedTreeView {
  NodeId root = 0;
  std::vector<std::optional<NodeId>> parent;
  std::vector<std::vector<NodeId>> children;  // ascending
  std::vector<std::uint32_t> depth;
  std::uint32_t height = 0;
};

// Per-node positive colors 1..c.
struct Coloring {
  std::vector<std::uint32_t> color;
  std::uint32_t count() const;  // number of distinct colors used
  friend bool operator==(const Coloring&, const Coloring&) = default;
};

// p[v] is the image of v.
using Permutation = std::vector<NodeId>;

RootedTreeView root_tree(const Graph& tree, NodeId root);

// Text I/O: "n m" then m lines "u v".
Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);
// One line per node: "id value".
void write_coloring(std::ostream& out, const Coloring& c);
void write_labels(std::ostream& out, std::span<const std::string> labels);

// Generators.
Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph complete_graph(std::size_t n);
Graph star_graph(std::size_t leaves);
Graph tree_from_pruefer(std::span<const NodeId> code);

}  // namespace radiolab
