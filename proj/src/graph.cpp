#include "radiolab/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "radiolab/error.hpp"

namespace radiolab {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) throw InvalidGraph("graph must have at least one node");
  Graph g;
  g.adj_.assign(n, {});
  std::set<Edge> seen;
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) {
      std::ostringstream os;
      os << "edge (" << u << "," << v << ") out of range for n=" << n;
      throw InvalidGraph(os.str());
    }
    if (u == v) throw InvalidGraph("self-loop at node " + std::to_string(u));
    Edge key{std::min(u, v), std::max(u, v)};
    if (!seen.insert(key).second) {
      std::ostringstream os;
      os << "duplicate edge (" << key.first << "," << key.second << ")";
      throw InvalidGraph(os.str());
    }
    g.adj_[u].push_back(v);
    g.adj_[v].push_back(u);
  }
  for (auto& a : g.adj_) std::sort(a.begin(), a.end());
  g.edge_count_ = seen.size();

  std::vector<char> mark(n, 0);
  std::queue<NodeId> q;
  q.push(0);
  mark[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId w : g.adj_[u])
      if (!mark[w]) {
        mark[w] = 1;
        ++reached;
        q.push(w);
      }
  }
  if (reached != n) throw InvalidGraph("graph is not connected");
  return g;
}

std::size_t Graph::max_degree() const {
  std::size_t d = 0;
  for (const auto& a : adj_) d = std::max(d, a.size());
  return d;
}

bool Graph::adjacent(NodeId u, NodeId v) const {
  const auto& a = adj_.at(u);
  return std::binary_search(a.begin(), a.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < adj_.size(); ++u)
    for (NodeId v : adj_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

std::uint32_t Coloring::count() const {
  std::set<std::uint32_t> s(color.begin(), color.end());
  return static_cast<std::uint32_t>(s.size());
}

RootedTreeView root_tree(const Graph& tree, NodeId root) {
  if (!tree.is_tree()) throw PreconditionViolation("root_tree: graph is not a tree");
  if (root >= tree.node_count()) throw PreconditionViolation("root_tree: root out of range");
  const std::size_t n = tree.node_count();
  RootedTreeView t;
  t.root = root;
  t.parent.assign(n, std::nullopt);
  t.children.assign(n, {});
  t.depth.assign(n, 0);
  std::vector<char> seen(n, 0);
  std::queue<NodeId> q;
  q.push(root);
  seen[root] = 1;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId w : tree.neighbors(u)) {
      if (seen[w]) continue;
      seen[w] = 1;
      t.parent[w] = u;
      t.depth[w] = t.depth[u] + 1;
      t.children[u].push_back(w);  // neighbors are sorted, so children are too
      t.height = std::max(t.height, t.depth[w]);
      q.push(w);
    }
  }
  return t;
}

Graph read_graph(std::istream& in) {
  long long n = -1, m = -1;
  if (!(in >> n >> m) || n <= 0 || m < 0) throw InvalidGraph("bad graph header, expected \"n m\"");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    long long u, v;
    if (!(in >> u >> v)) throw InvalidGraph("truncated edge list at edge " + std::to_string(i));
    if (u < 0 || v < 0) throw InvalidGraph("negative node id");
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  return Graph::from_edges(static_cast<std::size_t>(n), edges);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_coloring(std::ostream& out, const Coloring& c) {
  for (std::size_t v = 0; v < c.color.size(); ++v) out << v << ' ' << c.color[v] << '\n';
}

void write_labels(std::ostream& out, std::span<const std::string> labels) {
  for (std::size_t v = 0; v < labels.size(); ++v) out << v << ' ' << labels[v] << '\n';
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}

Graph cycle_graph(std::size_t n) {
  if (n < 3) throw PreconditionViolation("cycle needs at least 3 nodes");
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i) e.emplace_back(i, static_cast<NodeId>((i + 1) % n));
  return Graph::from_edges(n, e);
}

Graph complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return Graph::from_edges(n, e);
}

Graph star_graph(std::size_t leaves) {
  std::vector<Edge> e;
  for (NodeId i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph::from_edges(leaves + 1, e);
}

// Standard decoding: repeatedly join the smallest leaf to the next code entry.
Graph tree_from_pruefer(std::span<const NodeId> code) {
  const std::size_t n = code.size() + 2;
  std::vector<std::size_t> deg(n, 1);
  for (NodeId c : code) {
    if (c >= n) throw InvalidGraph("Pruefer entry out of range");
    ++deg[c];
  }
  std::set<NodeId> leaves;
  for (NodeId v = 0; v < n; ++v)
    if (deg[v] == 1) leaves.insert(v);
  std::vector<Edge> e;
  for (NodeId c : code) {
    NodeId leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    e.emplace_back(leaf, c);
    if (--deg[c] == 1) leaves.insert(c);
  }
  NodeId a = *leaves.begin();
  NodeId b = *std::next(leaves.begin());
  e.emplace_back(a, b);
  return Graph::from_edges(n, e);
}

}  // namespace radiolab
