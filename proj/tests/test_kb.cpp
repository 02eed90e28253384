#include <doctest.h>

#include <bit>
#include <numeric>

#include "oracles.hpp"
#include "radiolab/error.hpp"
#include "radiolab/kb.hpp"
#include "radiolab/random.hpp"

using namespace radiolab;

namespace {

std::vector<NodeId> first_k(std::size_t k) {
  std::vector<NodeId> s(k);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

// Greedy distance-two colouring count, from all-pairs distances.
std::uint32_t d2_colours(const Graph& g) {
  auto d = oracle::all_distances(g);
  std::vector<std::uint32_t> col(g.node_count(), 0);
  std::uint32_t c = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    std::uint32_t pick = 1;
    for (bool clash = true; clash; ) {
      clash = false;
      for (NodeId u = 0; u < v; ++u)
        if (d[u][v] <= 2 && col[u] == pick) {
          ++pick;
          clash = true;
        }
    }
    col[v] = pick;
    c = std::max(c, pick);
  }
  return c;
}

std::size_t bits_of(std::uint64_t v) { return static_cast<std::size_t>(std::bit_width(v)); }

// Expected longest label: strat, three ack bits, sched (the longest source
// index, or the fixed colour width), plus colour bits on non-trees.
std::size_t expected_bits(const Graph& g, std::size_t k) {
  std::uint32_t c = d2_colours(g);
  std::size_t bits = 4 + (k <= g.max_degree() ? bits_of(k) : bits_of(c));
  if (g.edge_count() + 1 != g.node_count()) bits += bits_of(c);
  return bits;
}

// Every token a node ends with must have reached it over the air (or be its
// own), and every node must end with every source token.
void check_information_flow(const Graph& g, const Trace& t, const std::vector<NodeId>& sources) {
  std::vector<TokenSet> heard(g.node_count());
  for (NodeId s : sources) heard[s].insert(s);
  for (const auto& r : t.rounds)
    for (const auto& rc : r.receptions)
      for (const auto& [name, f] : rc.message->fields)
        if (auto* ts = std::get_if<TokenSet>(&f)) heard[rc.node].merge(*ts);
  TokenSet all(std::vector<Token>(sources.begin(), sources.end()));
  for (NodeId v = 0; v < g.node_count(); ++v) {
    CHECK(heard[v].contains_all(t.final_knowledge[v]));
    CHECK(t.final_knowledge[v] == all);
  }
}

std::size_t collisions_between(const Trace& t, Round lo, Round hi) {
  std::size_t c = 0;
  for (const auto& r : t.rounds)
    if (r.round > lo && r.round <= hi) c += r.collisions.size();
  return c;
}

}  // namespace

TEST_CASE("labeling examples") {
  auto k8 = labeling_kb(complete_graph(8), first_k(2));
  CHECK_FALSE(k8.labels[0].strat);
  CHECK(k8.labels[0].sched == "1");
  CHECK(k8.labels[1].sched == "10");
  CHECK(k8.coordinator == 2);  // 0 is a source and k < n

  auto star = labeling_kb(star_graph(3), first_k(4));
  CHECK(star.labels[0].strat);
  CHECK(star.colour_count == 4);
  for (const auto& l : star.labels) CHECK(l.sched.size() == 3);
  CHECK(star.coordinator == 0);  // k = n: nowhere else to go

  for (const Graph& g : {path_graph(2), cycle_graph(5), random_connected_graph(10, 4, 1)}) {
    std::vector<NodeId> one = {static_cast<NodeId>(g.node_count() - 1)};
    auto l = labeling_kb(g, one);
    CHECK_FALSE(l.labels[0].strat);
    CHECK(l.labels[one[0]].sched == "1");
  }
}

TEST_CASE("label invariants and length formula") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = seed % 2 ? random_tree(6 + seed, seed) : random_connected_graph(6 + seed, seed % 5, seed);
    const std::size_t n = g.node_count();
    for (std::size_t k : {std::size_t{1}, std::size_t{2}, n / 2, n}) {
      auto src = random_sources(n, k, seed + k);
      auto L = labeling_kb(g, src);
      std::size_t roots = 0;
      for (const auto& l : L.labels) {
        roots += l.ack.is_root();
        CHECK(l.strat == L.labels[0].strat);
      }
      CHECK(roots == 1);
      CHECK(L.labels[L.coordinator].ack.is_root());
      if (k < n) CHECK(std::find(src.begin(), src.end(), L.coordinator) == src.end());
      if (!L.labels[0].strat) {
        std::vector<std::uint64_t> seen;
        for (NodeId v = 0; v < n; ++v) {
          bool is_src = std::find(src.begin(), src.end(), v) != src.end();
          if (!is_src) CHECK(L.labels[v].sched_value() == 0);
          else seen.push_back(L.labels[v].sched_value());
        }
        std::sort(seen.begin(), seen.end());
        for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == i + 1);
      } else {
        for (const auto& l : L.labels) {
          CHECK(l.sched.size() == bits_of(L.colour_count));
          CHECK(l.sched_value() >= 1);
          CHECK(l.sched_value() <= L.colour_count);
        }
      }
      CHECK(L.colour_count == d2_colours(g));
      CHECK(L.max_label_bits == expected_bits(g, k));
      CHECK(L.formula_bits == L.max_label_bits);
      if (g.is_tree()) CHECK(L.max_label_bits <= kb_tree_length_bound(k, g.max_degree()));
    }
  }
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(labeling_kb(path_graph(3), std::vector<NodeId>{}), PreconditionViolation);
  CHECK_THROWS_AS(labeling_kb(path_graph(3), std::vector<NodeId>{1, 1}), PreconditionViolation);
  CHECK_THROWS_AS(labeling_kb(path_graph(3), std::vector<NodeId>{5}), PreconditionViolation);
}

TEST_CASE("single source on a path of three") {
  std::vector<NodeId> src = {1};
  auto r = run_kb(path_graph(3), src);
  CHECK(r.labeling.coordinator == 0);
  check_information_flow(path_graph(3), r.trace, src);
  CHECK(r.trace.status == RunStatus::Completed);
  CHECK(r.root_progress.phases == 3);  // collect, silence, done
}

TEST_CASE("individual collect phase count") {
  std::vector<NodeId> src = {3, 4};
  auto r = run_kb(complete_graph(6), src);
  CHECK(r.root_progress.phases == 4);
  CHECK(r.root_progress.silent_phases == std::vector<std::int64_t>{3});
  check_information_flow(complete_graph(6), r.trace, src);
}

TEST_CASE("K_4 with k = 2 and k = 3") {
  for (std::size_t k : {2, 3}) {
    auto src = first_k(k);
    auto r = run_kb(complete_graph(4), src);
    check_information_flow(complete_graph(4), r.trace, src);
    const std::int64_t m = r.root_progress.m.value();
    if (!r.labeling.labels[0].strat) {
      const std::int64_t agg = r.root_progress.aggregate_end.value() - 3 * m;
      CHECK(agg <= static_cast<std::int64_t>(k + 2) * 2 * m);
    }
    CHECK(r.root_progress.inform_done.value() == r.root_progress.aggregate_end.value() + 3 * m);
  }
}

TEST_CASE("round robin on T_6 style trees and complete graphs") {
  // A tree with maximum degree 2 and six sources takes the round-robin branch.
  std::vector<NodeId> src = first_k(6);
  Graph p6 = path_graph(6);
  auto r = run_kb(p6, src);
  CHECK(r.labeling.labels[0].strat);
  check_information_flow(p6, r.trace, src);
  const Round m = static_cast<Round>(r.root_progress.m.value());
  CHECK(collisions_between(r.trace, 3 * m, static_cast<Round>(r.root_progress.aggregate_end.value())) == 0);

  auto k16 = run_kb(complete_graph(16), first_k(16));
  CHECK(k16.labeling.labels[0].strat);
  check_information_flow(complete_graph(16), k16.trace, first_k(16));
}

TEST_CASE("KB solves on random graphs") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Graph g = random_connected_graph(8 + seed, seed % 6, seed + 100);
    const std::size_t n = g.node_count();
    for (std::size_t k : {std::size_t{1}, std::size_t{2}, (n + 1) / 2, n}) {
      auto src = random_sources(n, k, seed * 31 + k);
      auto r = run_kb(g, src);
      CHECK(r.trace.status == RunStatus::Completed);
      check_information_flow(g, r.trace, src);
      // All nodes stop together, at the end of Inform.
      for (auto t : r.trace.termination_round) CHECK(t == r.trace.termination_round[0]);
      if (r.labeling.labels[0].strat) {
        const Round m = static_cast<Round>(r.root_progress.m.value());
        CHECK(collisions_between(r.trace, 3 * m, static_cast<Round>(r.root_progress.aggregate_end.value())) == 0);
      }
    }
  }
}

TEST_CASE("coordinator as a source") {
  // A source coordinator is replaced while a non-source exists. With k = n
  // it stays, which always means round robin (k = n > Delta).
  std::vector<NodeId> src = {0, 1};
  auto r = run_kb(star_graph(4), src, {.coordinator = 0});
  CHECK(r.labeling.coordinator == 2);
  std::vector<NodeId> all = first_k(5);
  auto s = run_kb(star_graph(4), all, {.coordinator = 0});
  CHECK(s.labeling.coordinator == 0);
  check_information_flow(star_graph(4), s.trace, all);
}

TEST_CASE("clock offsets and fast-forward do not change the execution") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Graph g = random_connected_graph(9, seed % 4, seed);
    auto src = random_sources(9, 1 + seed % 9, seed);
    KbRunOptions a;
    a.clock_offsets.resize(9);
    Rng rng(seed);
    for (auto& o : a.clock_offsets) o = static_cast<LocalClock>(rng.below(1000)) - 500;
    KbRunOptions b = a;
    b.fast_forward = false;
    auto ra = run_kb(g, src, a);
    auto rb = run_kb(g, src, b);
    CHECK(same_execution(ra.trace, rb.trace));
    check_information_flow(g, ra.trace, src);
    // Same global schedule as with synchronized clocks.
    auto rz = run_kb(g, src);
    CHECK(rz.trace.final_round == ra.trace.final_round);
    CHECK(rz.trace.metrics.transmissions == ra.trace.metrics.transmissions);
  }
}
