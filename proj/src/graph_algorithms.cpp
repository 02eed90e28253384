#include "radiolab/graph_algorithms.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>

#include "radiolab/error.hpp"

namespace radiolab {

std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId src) {
  if (src >= g.node_count()) throw PreconditionViolation("bfs_distances: source out of range");
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> d(g.node_count(), kUnset);
  std::queue<NodeId> q;
  d[src] = 0;
  q.push(src);
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId w : g.neighbors(u))
      if (d[w] == kUnset) {
        d[w] = d[u] + 1;
        q.push(w);
      }
  }
  return d;
}

std::uint32_t eccentricity(const Graph& g, NodeId v) {
  auto d = bfs_distances(g, v);
  return *std::max_element(d.begin(), d.end());
}

std::vector<NodeId> center(const Graph& g) {
  std::vector<std::uint32_t> ecc(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) ecc[v] = eccentricity(g, v);
  auto rad = *std::min_element(ecc.begin(), ecc.end());
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (ecc[v] == rad) out.push_back(v);
  return out;
}

Graph square_graph(const Graph& g) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    std::set<NodeId> near;
    for (NodeId w : g.neighbors(u)) {
      near.insert(w);
      for (NodeId x : g.neighbors(w)) near.insert(x);
    }
    for (NodeId v : near)
      if (u < v) e.emplace_back(u, v);
  }
  return Graph::from_edges(g.node_count(), e);
}

Coloring greedy_coloring(const Graph& g, std::span<const NodeId> order) {
  const std::size_t n = g.node_count();
  std::vector<char> placed(n, 0);
  if (order.size() != n) throw PreconditionViolation("greedy_coloring: order is not a permutation");
  for (NodeId v : order) {
    if (v >= n || placed[v]) throw PreconditionViolation("greedy_coloring: order is not a permutation");
    placed[v] = 1;
  }
  Coloring c;
  c.color.assign(n, 0);
  for (NodeId v : order) {
    std::vector<char> used(g.degree(v) + 2, 0);
    for (NodeId w : g.neighbors(v))
      if (c.color[w] != 0 && c.color[w] < used.size()) used[c.color[w]] = 1;
    std::uint32_t k = 1;
    while (used[k]) ++k;
    c.color[v] = k;
  }
  return c;
}

Coloring distance_two_coloring(const Graph& g) {
  std::vector<NodeId> order(g.node_count());
  std::iota(order.begin(), order.end(), 0);
  return greedy_coloring(square_graph(g), order);
}

bool is_identity(const Permutation& p) {
  for (NodeId v = 0; v < p.size(); ++v)
    if (p[v] != v) return false;
  return true;
}

static void require_bijection(const Permutation& p, std::size_t n) {
  if (p.size() != n) throw PreconditionViolation("permutation size does not match graph");
  std::vector<char> hit(n, 0);
  for (NodeId x : p) {
    if (x >= n || hit[x]) throw PreconditionViolation("mapping is not a bijection");
    hit[x] = 1;
  }
}

bool is_automorphism(const Graph& g, const Permutation& p) {
  require_bijection(p, g.node_count());
  // p is a bijection, so mapping E into E is already onto E.
  for (auto [u, v] : g.edges())
    if (!g.adjacent(p[u], p[v])) return false;
  return true;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation out(b.size());
  for (NodeId v = 0; v < b.size(); ++v) out[v] = a[b[v]];
  return out;
}

std::vector<Permutation> brute_force_automorphisms(const Graph& g, BruteForceLimits limits) {
  const std::size_t n = g.node_count();
  if (n > limits.max_nodes)
    throw LimitExceeded("brute-force automorphism enumeration limited to " +
                        std::to_string(limits.max_nodes) + " nodes");
  std::vector<Permutation> out;
  Permutation p(n);
  std::vector<char> used(n, 0);
  std::function<void(NodeId)> rec = [&](NodeId v) {
    if (v == n) {
      out.push_back(p);
      return;
    }
    for (NodeId img = 0; img < n; ++img) {
      if (used[img] || g.degree(img) != g.degree(v)) continue;
      bool ok = true;
      for (NodeId u = 0; u < v && ok; ++u) ok = g.adjacent(u, v) == g.adjacent(p[u], img);
      if (!ok) continue;
      used[img] = 1;
      p[v] = img;
      rec(v + 1);
      used[img] = 0;
    }
  };
  rec(0);
  return out;
}

std::vector<std::uint32_t> rooted_classes(const RootedTreeView& t, std::span<const std::uint32_t> colors) {
  const std::size_t n = t.children.size();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return t.depth[a] > t.depth[b]; });
  std::map<std::pair<std::uint32_t, std::vector<std::uint32_t>>, std::uint32_t> ids;
  std::vector<std::uint32_t> cls(n, 0);
  for (NodeId v : order) {
    std::vector<std::uint32_t> key;
    for (NodeId c : t.children[v]) key.push_back(cls[c]);
    std::sort(key.begin(), key.end());
    std::uint32_t col = colors.empty() ? 0 : colors[v];
    auto [it, fresh] = ids.try_emplace({col, std::move(key)}, static_cast<std::uint32_t>(ids.size()));
    cls[v] = it->second;
  }
  return cls;
}

namespace {

// Tree rooted at its center. When the center is an edge {a,b}, a virtual
// root with id n is inserted between a and b, so automorphisms of the tree
// are exactly the rooted automorphisms of this view (restricted to 0..n-1).
RootedTreeView center_rooted(const Graph& tree) {
  if (!tree.is_tree()) throw PreconditionViolation("expected a tree");
  auto cen = center(tree);
  if (cen.size() == 1) return root_tree(tree, cen[0]);
  const std::size_t n = tree.node_count();
  const NodeId a = cen[0], b = cen[1];
  RootedTreeView t;
  t.root = static_cast<NodeId>(n);
  t.parent.assign(n + 1, std::nullopt);
  t.children.assign(n + 1, {});
  t.depth.assign(n + 1, 0);
  t.children[n] = {a, b};
  t.parent[a] = t.root;
  t.parent[b] = t.root;
  t.depth[a] = t.depth[b] = 1;
  std::queue<NodeId> q;
  q.push(a);
  q.push(b);
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId w : tree.neighbors(u)) {
      if (t.parent[u] && *t.parent[u] == w) continue;
      if ((u == a && w == b) || (u == b && w == a)) continue;
      t.parent[w] = u;
      t.depth[w] = t.depth[u] + 1;
      t.children[u].push_back(w);
      t.height = std::max(t.height, t.depth[w]);
      q.push(w);
    }
  }
  t.height = std::max<std::uint32_t>(t.height, 1);
  return t;
}

std::vector<std::uint32_t> padded_colors(const Coloring& c, std::size_t view_size) {
  std::vector<std::uint32_t> col(c.color.begin(), c.color.end());
  col.resize(view_size, 0);
  return col;
}

}  // namespace

std::vector<Permutation> enumerate_automorphisms(const Graph& g, BruteForceLimits limits, std::size_t max_count) {
  if (!g.is_tree()) return brute_force_automorphisms(g, limits);
  const std::size_t n = g.node_count();
  auto t = center_rooted(g);
  auto cls = rooted_classes(t);
  std::vector<Permutation> out;
  Permutation p(t.children.size());

  using Todo = std::vector<std::pair<NodeId, NodeId>>;
  std::function<void(Todo)> run;
  std::function<void(NodeId, NodeId, std::size_t, std::vector<char>&, Todo&)> assign =
      [&](NodeId u, NodeId v, std::size_t i, std::vector<char>& used, Todo& todo) {
        const auto& cu = t.children[u];
        const auto& cv = t.children[v];
        if (i == cu.size()) {
          run(todo);
          return;
        }
        for (std::size_t j = 0; j < cv.size(); ++j) {
          if (used[j] || cls[cv[j]] != cls[cu[i]]) continue;
          used[j] = 1;
          todo.emplace_back(cu[i], cv[j]);
          assign(u, v, i + 1, used, todo);
          todo.pop_back();
          used[j] = 0;
        }
      };
  run = [&](Todo todo) {
    if (todo.empty()) {
      if (out.size() >= max_count)
        throw LimitExceeded("automorphism count exceeds cap " + std::to_string(max_count));
      out.emplace_back(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n));
      return;
    }
    auto [u, v] = todo.back();
    todo.pop_back();
    p[u] = v;
    std::vector<char> used(t.children[v].size(), 0);
    assign(u, v, 0, used, todo);
  };
  run({{t.root, t.root}});
  return out;
}

bool is_distinguishing_by_list(const Coloring& c, std::span<const Permutation> automorphisms) {
  for (const auto& p : automorphisms) {
    if (is_identity(p)) continue;
    bool preserved = true;
    for (NodeId v = 0; v < p.size() && preserved; ++v) preserved = c.color[v] == c.color[p[v]];
    if (preserved) return false;
  }
  return true;
}

bool is_distinguishing(const Graph& g, const Coloring& c, BruteForceLimits limits) {
  if (c.color.size() != g.node_count()) throw PreconditionViolation("coloring size does not match graph");
  if (!g.is_tree()) return is_distinguishing_by_list(c, brute_force_automorphisms(g, limits));
  auto t = center_rooted(g);
  auto cls = rooted_classes(t, padded_colors(c, t.children.size()));
  for (const auto& ch : t.children) {
    std::set<std::uint32_t> seen;
    for (NodeId w : ch)
      if (!seen.insert(cls[w]).second) return false;
  }
  return true;
}

namespace {

constexpr std::uint64_t kSaturated = std::uint64_t{1} << 62;

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a >= kSaturated / b) return kSaturated;
  return a * b;
}

// C(n, r), saturating.
std::uint64_t sat_binom(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    // acc * (n - r + i) / i stays integral at every step.
    unsigned __int128 next = static_cast<unsigned __int128>(acc) * (n - r + i) / i;
    if (next >= kSaturated) return kSaturated;
    acc = static_cast<std::uint64_t>(next);
  }
  return acc;
}

// Combinatorial number system: the rank-th r-subset of {0,1,...} in colex.
std::vector<std::uint64_t> unrank_colex(std::uint64_t rank, std::uint64_t r) {
  std::vector<std::uint64_t> out(r);
  for (std::uint64_t k = r; k >= 1; --k) {
    std::uint64_t c = k - 1;
    while (sat_binom(c + 1, k) <= rank) ++c;
    rank -= sat_binom(c, k);
    out[k - 1] = c;
  }
  return out;
}

struct TreeCounter {
  const RootedTreeView& t;
  const std::vector<std::uint32_t>& cls;
  std::uint64_t k;
  NodeId virtual_root;  // == node_count when the center is an edge, else none
  std::map<std::uint32_t, std::uint64_t> memo;

  // Children of v grouped by class, classes ascending, members descending by id.
  std::vector<std::pair<std::uint32_t, std::vector<NodeId>>> groups(NodeId v) const {
    std::map<std::uint32_t, std::vector<NodeId>> m;
    for (NodeId w : t.children[v]) m[cls[w]].push_back(w);
    std::vector<std::pair<std::uint32_t, std::vector<NodeId>>> out(m.begin(), m.end());
    for (auto& [c, mem] : out) std::sort(mem.rbegin(), mem.rend());
    return out;
  }

  // Number of pairwise non-isomorphic colorings of subtree(v) with no
  // nontrivial colour-preserving rooted automorphism.
  std::uint64_t count(NodeId v) {
    auto it = memo.find(cls[v]);
    if (it != memo.end()) return it->second;
    std::uint64_t acc = v == virtual_root ? 1 : k;
    for (const auto& [c, mem] : groups(v)) acc = sat_mul(acc, sat_binom(count(mem.front()), mem.size()));
    memo[cls[v]] = acc;
    return acc;
  }

  void assign(NodeId v, std::uint64_t idx, std::vector<std::uint32_t>& color) {
    std::uint64_t rest = idx;
    if (v != virtual_root) {
      color[v] = static_cast<std::uint32_t>(rest % k) + 1;
      rest /= k;
    }
    for (const auto& [c, mem] : groups(v)) {
      std::uint64_t radix = sat_binom(count(mem.front()), mem.size());
      std::uint64_t digit = radix >= kSaturated ? rest : rest % radix;
      rest = radix >= kSaturated ? 0 : rest / radix;
      auto variants = unrank_colex(digit, mem.size());
      for (std::size_t i = 0; i < mem.size(); ++i) assign(mem[i], variants[i], color);
    }
  }
};

}  // namespace

Distinguishing distinguishing_number(const Graph& g, BruteForceLimits limits) {
  if (!g.is_tree()) return brute_force_distinguishing_number(g, limits);
  const std::size_t n = g.node_count();
  auto t = center_rooted(g);
  auto cls = rooted_classes(t);
  for (std::uint64_t k = 1; k <= n; ++k) {
    TreeCounter tc{t, cls, k, static_cast<NodeId>(n), {}};
    if (tc.count(t.root) == 0) continue;
    std::vector<std::uint32_t> color(t.children.size(), 0);
    tc.assign(t.root, 0, color);
    color.resize(n);
    Distinguishing d{static_cast<std::uint32_t>(k), Coloring{color}};
    if (!is_distinguishing(g, d.witness)) throw std::logic_error("tree witness failed verification");
    return d;
  }
  throw std::logic_error("no distinguishing coloring with n colors");
}

Distinguishing brute_force_distinguishing_number(const Graph& g, BruteForceLimits limits) {
  const std::size_t n = g.node_count();
  if (n > limits.max_nodes)
    throw LimitExceeded("brute-force distinguishing search limited to " + std::to_string(limits.max_nodes) +
                        " nodes");
  auto autos = g.is_tree() ? enumerate_automorphisms(g, limits) : brute_force_automorphisms(g, limits);
  for (std::uint32_t c = 1; c <= n; ++c) {
    // Restricted growth strings: colour permutations are irrelevant.
    Coloring col;
    col.color.assign(n, 1);
    std::optional<Coloring> found;
    std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t v, std::uint32_t used) {
      if (found) return;
      if (v == n) {
        if (is_distinguishing_by_list(col, autos)) found = col;
        return;
      }
      for (std::uint32_t x = 1; x <= std::min(used + 1, c); ++x) {
        col.color[v] = x;
        rec(v + 1, std::max(used, x));
        if (found) return;
      }
    };
    rec(0, 0);
    if (found) return {c, *found};
  }
  throw std::logic_error("no distinguishing coloring with n colors");
}

std::vector<NodeId> tree_path(const Graph& tree, NodeId x, NodeId y) {
  auto t = root_tree(tree, x);
  std::vector<NodeId> path{y};
  while (path.back() != x) path.push_back(*t.parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

bool check_path_symmetry(const Graph& tree, const Permutation& p, NodeId x) {
  if (!tree.is_tree()) throw PreconditionViolation("check_path_symmetry: not a tree");
  if (!is_automorphism(tree, p)) throw PreconditionViolation("check_path_symmetry: not an automorphism");
  if (is_identity(p)) throw PreconditionViolation("check_path_symmetry: trivial automorphism");
  if (x >= tree.node_count() || p[x] == x) throw PreconditionViolation("check_path_symmetry: x is fixed");
  auto path = tree_path(tree, x, p[x]);
  const std::size_t l = path.size() - 1;
  for (std::size_t i = 0; i <= l / 2; ++i)
    if (path[l - i] != p[path[i]]) return false;
  return true;
}

std::string tree_canonical_form(const Graph& tree) {
  auto t = center_rooted(tree);
  std::vector<NodeId> order(t.children.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return t.depth[a] > t.depth[b]; });
  std::vector<std::string> s(t.children.size());
  for (NodeId v : order) {
    std::vector<std::string> parts;
    for (NodeId c : t.children[v]) parts.push_back(std::move(s[c]));
    std::sort(parts.begin(), parts.end());
    std::string out = "(";
    for (auto& p : parts) out += p;
    s[v] = out + ")";
  }
  return s[t.root];
}

std::vector<Graph> all_trees(std::size_t n) {
  if (n == 0 || n > 12) throw LimitExceeded("all_trees supports 1 <= n <= 12");
  std::vector<Graph> level{Graph::from_edges(1, std::span<const Edge>{})};
  for (std::size_t size = 2; size <= n; ++size) {
    std::map<std::string, Graph> next;
    for (const auto& g : level) {
      auto base = g.edges();
      for (NodeId v = 0; v < g.node_count(); ++v) {
        auto e = base;
        e.emplace_back(v, static_cast<NodeId>(size - 1));
        auto h = Graph::from_edges(size, e);
        next.try_emplace(tree_canonical_form(h), std::move(h));
      }
    }
    level.clear();
    for (auto& [k, g] : next) level.push_back(std::move(g));
  }
  return level;
}

}  // namespace radiolab
