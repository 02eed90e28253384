#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "radiolab/error.hpp"
#include "radiolab/scenario.hpp"

using namespace radiolab;

namespace {

Scenario parse(const char* text) { return parse_scenario(Json::parse(text)); }

bool failed_names(const ScenarioResult& r, const std::string& name) {
  for (const auto& f : r.evidence["failed"])
    if (f.get<std::string>() == name) return true;
  return false;
}

}  // namespace

TEST_CASE("parse and defaults") {
  auto s = parse(R"({"graph": {"generator": "path", "n": 4}})");
  CHECK(s.schema_version == 1);
  CHECK(s.graph.kind == "path");
  CHECK(s.sources.kind == SourceSpec::Kind::All);
  CHECK(s.algorithm == "kb");
  CHECK(s.fast_forward);
  CHECK(s.policy.mode == DelayPolicy::Mode::Registry);

  auto t = parse(R"({"graph": {"generator": "random-tree", "n": 9, "seed": 3},
                     "sources": {"count": 4, "seed": 11}, "algorithm": "gossip",
                     "policy": {"mode": "faithful", "bound": 5000}, "horizon": 99,
                     "coordinator": 2, "outputs": {"trace": "t.json"}})");
  CHECK(t.sources.kind == SourceSpec::Kind::Count);
  CHECK(t.sources.count == 4);
  CHECK(t.policy.mode == DelayPolicy::Mode::Faithful);
  CHECK(t.policy.bound == 5000);
  CHECK(t.horizon == 99);
  CHECK(t.coordinator == NodeId{2});
  CHECK(t.outputs.trace == "t.json");
  CHECK(t.outputs.metrics == "metrics.csv");

  auto star = parse(R"({"graph": {"generator": "star", "m": 3}, "sources": [0, 2]})");
  CHECK(build_graph(star).node_count() == 4);
  CHECK(resolve_sources(star, 4) == std::vector<NodeId>{0, 2});
}

TEST_CASE("bad scenarios") {
  CHECK_THROWS_AS(parse(R"({})"), ScenarioError);
  CHECK_THROWS_AS(parse(R"({"graph": {"generator": "hypercube", "n": 4}})"), ScenarioError);
  CHECK_THROWS_AS(parse(R"({"graph": {"generator": "path", "n": 4}, "algorithm": "flood"})"), ScenarioError);
  CHECK_THROWS_AS(parse(R"({"graph": {"generator": "path", "n": 4}, "sources": "some"})"), ScenarioError);
  CHECK_THROWS_AS(parse(R"({"graph": {"generator": "path", "n": 4}, "algorithm": "tn"})"), ScenarioError);
  CHECK_THROWS_AS(parse(R"({"graph": {"generator": "path", "n": 4}, "algorithm": "custom", "program": "x"})"),
                  ScenarioError);
  CHECK_THROWS_AS(parse(R"({"graph": {"generator": "path", "n": 4}, "policy": "eager"})"), ScenarioError);

  auto dup = parse(R"({"graph": {"generator": "path", "n": 4}, "sources": [1, 1]})");
  CHECK_THROWS_AS(resolve_sources(dup, 4), ScenarioError);
  auto far = parse(R"({"graph": {"generator": "path", "n": 4}, "sources": [7]})");
  CHECK_THROWS_AS(run_scenario(far), ScenarioError);
  auto offsets = parse(R"({"graph": {"generator": "path", "n": 4}, "clock_offsets": [1, 2]})");
  CHECK_THROWS_AS(run_scenario(offsets), ScenarioError);
  auto cyc = parse(R"({"graph": {"generator": "cycle", "n": 5}, "algorithm": "gossip"})");
  CHECK_THROWS_AS(run_scenario(cyc), ScenarioError);
  auto missing = parse(R"({"graph": {"file": "no/such/file.txt"}})");
  CHECK_THROWS_AS(run_scenario(missing), ScenarioError);
}

TEST_CASE("json round trip") {
  const char* texts[] = {
      R"({"graph": {"generator": "random-graph", "n": 12, "extra": 3, "seed": 8}, "sources": {"count": 5, "seed": 2}})",
      R"({"name": "t", "graph": {"generator": "tn", "x": 4}, "algorithm": "tn", "clock_offsets": [0,0,0,0,0,0,0,0,0,0]})",
      R"({"graph": {"generator": "star", "leaves": 3}, "algorithm": "custom", "program": "flood", "sources": [0],
          "labels": ["1", "10", "11", "100"]})",
      R"({"graph": {"generator": "path", "n": 3}, "algorithm": "gossip", "policy": {"mode": "faithful", "bound": 77},
          "coordinator": 1, "fast_forward": false})"};
  for (const char* text : texts) {
    Scenario s = parse(text);
    Json once = scenario_to_json(s);
    Json twice = scenario_to_json(parse_scenario(once));
    CHECK(once.dump() == twice.dump());
  }
}

TEST_CASE("graph from a file") {
  auto dir = std::filesystem::temp_directory_path() / "radiolab_scenario_test";
  std::filesystem::create_directories(dir);
  Graph g = Graph::from_edges(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}});
  {
    std::ofstream out(dir / "g.txt");
    write_graph(out, g);
  }
  auto s = parse(R"({"graph": {"file": "g.txt"}, "algorithm": "gossip"})");
  CHECK(build_graph(s, dir.string()) == g);
  auto r = run_scenario(s, dir.string());
  CHECK(r.ok);
  std::filesystem::remove_all(dir);
}

TEST_CASE("label examples") {
  auto tn = label_scenario(parse(R"({"graph": {"generator": "tn", "x": 3}, "algorithm": "tn"})"));
  CHECK(tn.labels.size() == 6);
  for (const auto& l : tn.labels) CHECK(l.size() == 2);
  CHECK(tn.label_meta["max_label_bits"] == 2);

  auto g = label_scenario(parse(R"({"graph": {"generator": "random-tree", "n": 20, "seed": 1}, "algorithm": "gossip"})"));
  REQUIRE(g.label_meta.contains("distinguishing_number"));
  auto d = g.label_meta["distinguishing_number"].get<std::uint32_t>();
  CHECK(g.label_meta["max_label_bits"].get<std::size_t>() == gossip_label_length_formula(d));
  CHECK(labels_text(g).find("# distinguishing_number") != std::string::npos);

  auto kb = label_scenario(parse(R"({"graph": {"generator": "complete", "n": 8}, "sources": [0, 1]})"));
  CHECK(kb.label_meta["strat"] == 0);
  for (const auto& l : kb.labels) CHECK(l[0] == '0');
}

TEST_CASE("run examples") {
  auto tn = run_scenario(parse(R"({"graph": {"generator": "tn", "x": 4}, "algorithm": "tn"})"));
  CHECK(tn.ok);
  CHECK(tn.completion->completion_round.value() <= 12);

  auto g = run_scenario(parse(R"({"graph": {"generator": "random-tree", "n": 15, "seed": 7}, "algorithm": "gossip"})"));
  CHECK(g.ok);
  CHECK(g.completion->solved);

  auto kb = run_scenario(parse(R"({"graph": {"generator": "complete", "n": 16}, "sources": "all"})"));
  CHECK(kb.label_meta["strat"] == 1);
  CHECK(kb.completion->solved);

  auto custom = run_scenario(parse(R"({"graph": {"generator": "path", "n": 5}, "algorithm": "custom",
                                       "program": "flood", "sources": [0], "horizon": 50})"));
  CHECK(custom.completion->solved);

  auto cut = run_scenario(parse(R"({"graph": {"generator": "path", "n": 8}, "sources": [0], "horizon": 3})"));
  CHECK_FALSE(cut.ok);
  CHECK(cut.trace->status == RunStatus::HorizonReached);
}

TEST_CASE("outputs are deterministic") {
  const char* text = R"({"graph": {"generator": "random-graph", "n": 14, "extra": 4, "seed": 21},
                         "sources": {"count": 6, "seed": 5}, "clock_offsets": [3,-2,0,7,1,1,-5,2,0,0,4,-1,9,2]})";
  auto a = run_scenario(parse(text));
  auto b = run_scenario(parse(text));
  CHECK(trace_to_json(*a.trace).dump() == trace_to_json(*b.trace).dump());
  CHECK(metrics_csv(*a.trace, a.completion) == metrics_csv(*b.trace, b.completion));
  CHECK(labels_text(a) == labels_text(b));
  CHECK(a.ok);
}

TEST_CASE("verify") {
  auto tn = verify_scenario(parse(R"({"graph": {"generator": "tn", "x": 5}, "algorithm": "tn"})"));
  CHECK(tn.ok);
  bool has_schedule = false;
  for (const auto& c : tn.evidence["checks"]) has_schedule = has_schedule || c["name"] == "tn-schedule";
  CHECK(has_schedule);

  auto kb = verify_scenario(parse(R"({"graph": {"generator": "random-graph", "n": 12, "extra": 2, "seed": 4},
                                      "sources": {"count": 3, "seed": 1}})"));
  CHECK(kb.ok);

  auto g = verify_scenario(parse(R"({"graph": {"generator": "random-tree", "n": 15, "seed": 7}, "algorithm": "gossip"})"));
  CHECK(g.ok);

  // The child-list bound fails on this tree (see the gossip tests).
  auto dir = std::filesystem::temp_directory_path() / "radiolab_verify_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "t.txt");
    write_graph(out, Graph::from_edges(11, {{0, 9}, {1, 2}, {1, 9}, {2, 3}, {2, 6}, {4, 5}, {4, 7}, {5, 9}, {5, 10}, {7, 8}}));
  }
  auto bad = verify_scenario(parse(R"({"graph": {"file": "t.txt"}, "algorithm": "gossip", "coordinator": 0})"),
                             dir.string());
  CHECK_FALSE(bad.ok);
  CHECK(failed_names(bad, "cor3-list-bound"));
  CHECK_FALSE(failed_names(bad, "thm5-settles"));
  CHECK(bad.completion->solved);
  std::filesystem::remove_all(dir);
}
