#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radiolab/engine.hpp"
#include "radiolab/gossip.hpp"
#include "radiolab/graph.hpp"
#include "radiolab/verify.hpp"

namespace radiolab {

using Json = nlohmann::ordered_json;

struct GraphSource {
  std::string kind = "path";  // file, random-tree, random-graph, complete, tn, star, path, cycle
  std::string file;
  std::size_t n = 0;
  std::size_t extra = 0;    // random-graph
  std::uint64_t seed = 0;   // random-*
  std::uint32_t x = 0;      // tn
  std::size_t leaves = 0;   // star
};

struct SourceSpec {
  enum class Kind { All, List, Count };
  Kind kind = Kind::All;
  std::vector<NodeId> list;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

struct OutputPaths {
  std::string labels = "labels.txt";
  std::string trace = "trace.json";
  std::string metrics = "metrics.csv";
  std::string evidence = "evidence.json";
};

struct Scenario {
  int schema_version = 1;
  std::string name;
  GraphSource graph;
  SourceSpec sources;
  std::string algorithm = "kb";  // kb, gossip, tn, custom
  std::string program;           // custom: round-robin, flood, all-transmit
  std::vector<std::string> labels;  // custom: explicit labels (default: binary ids)
  DelayPolicy policy;
  Round horizon = 10'000'000;
  bool fast_forward = true;
  std::vector<LocalClock> clock_offsets;
  std::optional<NodeId> coordinator;
  OutputPaths outputs;
};

// Throws ScenarioError on malformed or inconsistent input.
Scenario parse_scenario(const Json& j);
Scenario load_scenario(const std::string& path);
Json scenario_to_json(const Scenario& s);

// File paths in the scenario are resolved against base_dir.
Graph build_graph(const Scenario& s, const std::string& base_dir = ".");
std::vector<NodeId> resolve_sources(const Scenario& s, std::size_t n);

struct ScenarioResult {
  Graph graph;
  std::vector<NodeId> sources;
  std::vector<std::string> labels;
  Json label_meta;  // scheme metadata
  std::optional<Trace> trace;
  std::optional<CompletionReport> completion;
  Json evidence;    // verify: named checks
  bool ok = true;
};

ScenarioResult label_scenario(const Scenario& s, const std::string& base_dir = ".");
ScenarioResult run_scenario(const Scenario& s, const std::string& base_dir = ".");
// Runs and then applies the invariant suite for the algorithm. ok is false
// when any check fails; evidence["failed"] names them.
ScenarioResult verify_scenario(const Scenario& s, const std::string& base_dir = ".");

Json message_to_json(const Message& m);
Json trace_to_json(const Trace& t);
std::string metrics_csv(const Trace& t, const std::optional<CompletionReport>& c);
std::string labels_text(const ScenarioResult& r);

// Receptions and collisions recomputed from the recorded transmissions.
std::vector<std::string> check_trace_consistency(const Graph& g, const Trace& t);

}  // namespace radiolab
