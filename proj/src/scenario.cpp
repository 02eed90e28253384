#include "radiolab/scenario.hpp"

#include <algorithm>
#include <bit>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "radiolab/demos.hpp"
#include "radiolab/error.hpp"
#include "radiolab/graph_algorithms.hpp"
#include "radiolab/kb.hpp"
#include "radiolab/random.hpp"
#include "radiolab/tn.hpp"

namespace radiolab {

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("field '") + key + "': " + e.what());
  }
}

DelayPolicy parse_policy(const Json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "registry") return DelayPolicy::registry();
    if (s == "faithful") return DelayPolicy::faithful();
    if (s.rfind("faithful:", 0) == 0) return DelayPolicy::faithful(std::stoull(s.substr(9)));
    throw ScenarioError("unknown policy '" + s + "'");
  }
  std::string mode = get_or<std::string>(j, "mode", "registry");
  if (mode == "registry") return DelayPolicy::registry();
  if (mode == "faithful") return DelayPolicy::faithful(get_or<std::uint64_t>(j, "bound", kDefaultPrimeBound));
  throw ScenarioError("unknown policy mode '" + mode + "'");
}

std::string binary(std::uint64_t v) {
  std::string s;
  for (int i = std::bit_width(v) - 1; i >= 0; --i) s += ((v >> i) & 1u) ? '1' : '0';
  return s.empty() ? "0" : s;
}

TokenSet token_set(const std::vector<NodeId>& v) { return TokenSet(std::vector<Token>(v.begin(), v.end())); }

}  // namespace

Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
  Scenario s;
  s.schema_version = get_or<int>(j, "schema_version", 1);
  if (s.schema_version != 1) throw ScenarioError("unsupported schema_version " + std::to_string(s.schema_version));
  s.name = get_or<std::string>(j, "name", "");
  if (!j.contains("graph")) throw ScenarioError("missing 'graph'");
  const Json& g = j.at("graph");
  if (g.contains("file")) {
    s.graph.kind = "file";
    s.graph.file = g.at("file").get<std::string>();
  } else {
    s.graph.kind = get_or<std::string>(g, "generator", "");
    s.graph.n = get_or<std::size_t>(g, "n", 0);
    s.graph.seed = get_or<std::uint64_t>(g, "seed", 0);
    s.graph.extra = get_or<std::size_t>(g, "extra", 0);
    s.graph.x = get_or<std::uint32_t>(g, "x", 0);
    s.graph.leaves = get_or<std::size_t>(g, "leaves", get_or<std::size_t>(g, "m", 0));
    static const std::set<std::string> kinds = {"random-tree", "random-graph", "complete", "tn", "star", "path", "cycle"};
    if (!kinds.count(s.graph.kind)) throw ScenarioError("unknown graph generator '" + s.graph.kind + "'");
  }

  if (j.contains("sources")) {
    const Json& src = j.at("sources");
    if (src.is_string()) {
      if (src.get<std::string>() != "all") throw ScenarioError("sources must be \"all\", a list or {count, seed}");
    } else if (src.is_array()) {
      s.sources.kind = SourceSpec::Kind::List;
      s.sources.list = src.get<std::vector<NodeId>>();
    } else if (src.is_object()) {
      s.sources.kind = SourceSpec::Kind::Count;
      s.sources.count = get_or<std::size_t>(src, "count", 0);
      s.sources.seed = get_or<std::uint64_t>(src, "seed", 0);
    } else {
      throw ScenarioError("sources must be \"all\", a list or {count, seed}");
    }
  }

  s.algorithm = get_or<std::string>(j, "algorithm", "kb");
  if (s.algorithm != "kb" && s.algorithm != "gossip" && s.algorithm != "tn" && s.algorithm != "custom")
    throw ScenarioError("unknown algorithm '" + s.algorithm + "'");
  s.program = get_or<std::string>(j, "program", "round-robin");
  if (s.algorithm == "custom" && !demo_program_from_string(s.program))
    throw ScenarioError("unknown program '" + s.program + "'");
  s.labels = get_or<std::vector<std::string>>(j, "labels", {});
  if (j.contains("policy")) s.policy = parse_policy(j.at("policy"));
  s.horizon = get_or<Round>(j, "horizon", s.horizon);
  s.fast_forward = get_or<bool>(j, "fast_forward", true);
  s.clock_offsets = get_or<std::vector<LocalClock>>(j, "clock_offsets", {});
  if (j.contains("coordinator")) s.coordinator = j.at("coordinator").get<NodeId>();
  if (j.contains("outputs")) {
    const Json& o = j.at("outputs");
    s.outputs.labels = get_or<std::string>(o, "labels", s.outputs.labels);
    s.outputs.trace = get_or<std::string>(o, "trace", s.outputs.trace);
    s.outputs.metrics = get_or<std::string>(o, "metrics", s.outputs.metrics);
    s.outputs.evidence = get_or<std::string>(o, "evidence", s.outputs.evidence);
  }
  if (s.algorithm == "tn" && s.graph.kind != "tn") throw ScenarioError("algorithm tn needs graph generator tn");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw ScenarioError("scenario " + path + ": " + e.what());
  }
  return parse_scenario(j);
}

Json scenario_to_json(const Scenario& s) {
  Json j;
  j["schema_version"] = s.schema_version;
  if (!s.name.empty()) j["name"] = s.name;
  Json g;
  if (s.graph.kind == "file") {
    g["file"] = s.graph.file;
  } else {
    g["generator"] = s.graph.kind;
    if (s.graph.n) g["n"] = s.graph.n;
    if (s.graph.kind.rfind("random", 0) == 0) g["seed"] = s.graph.seed;
    if (s.graph.extra) g["extra"] = s.graph.extra;
    if (s.graph.x) g["x"] = s.graph.x;
    if (s.graph.leaves) g["leaves"] = s.graph.leaves;
  }
  j["graph"] = g;
  switch (s.sources.kind) {
    case SourceSpec::Kind::All: j["sources"] = "all"; break;
    case SourceSpec::Kind::List: j["sources"] = s.sources.list; break;
    case SourceSpec::Kind::Count: j["sources"] = {{"count", s.sources.count}, {"seed", s.sources.seed}}; break;
  }
  j["algorithm"] = s.algorithm;
  if (s.algorithm == "custom") j["program"] = s.program;
  if (!s.labels.empty()) j["labels"] = s.labels;
  j["policy"] = s.policy.to_string();
  j["horizon"] = s.horizon;
  j["fast_forward"] = s.fast_forward;
  if (!s.clock_offsets.empty()) j["clock_offsets"] = s.clock_offsets;
  if (s.coordinator) j["coordinator"] = *s.coordinator;
  j["outputs"] = {{"labels", s.outputs.labels},
                  {"trace", s.outputs.trace},
                  {"metrics", s.outputs.metrics},
                  {"evidence", s.outputs.evidence}};
  return j;
}

Graph build_graph(const Scenario& s, const std::string& base_dir) {
  const auto& g = s.graph;
  try {
    if (g.kind == "file") {
      std::filesystem::path p(g.file);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      std::ifstream in(p);
      if (!in) throw ScenarioError("cannot open graph file " + p.string());
      return read_graph(in);
    }
    if (g.kind == "random-tree") return random_tree(g.n, g.seed);
    if (g.kind == "random-graph") return random_connected_graph(g.n, g.extra, g.seed);
    if (g.kind == "complete") return complete_graph(g.n);
    if (g.kind == "tn") return build_tn(g.x).graph;
    if (g.kind == "star") return star_graph(g.leaves);
    if (g.kind == "path") return path_graph(g.n);
    if (g.kind == "cycle") return cycle_graph(g.n);
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError("graph: " + std::string(e.what()));
  }
  throw ScenarioError("unknown graph kind '" + g.kind + "'");
}

std::vector<NodeId> resolve_sources(const Scenario& s, std::size_t n) {
  std::vector<NodeId> out;
  switch (s.sources.kind) {
    case SourceSpec::Kind::All:
      for (NodeId v = 0; v < n; ++v) out.push_back(v);
      break;
    case SourceSpec::Kind::List:
      out = s.sources.list;
      break;
    case SourceSpec::Kind::Count:
      if (s.sources.count == 0 || s.sources.count > n) throw ScenarioError("sources.count must be in 1..n");
      out = random_sources(n, s.sources.count, s.sources.seed);
      break;
  }
  std::set<NodeId> seen;
  for (NodeId v : out)
    if (v >= n || !seen.insert(v).second) throw ScenarioError("sources must be distinct node ids below n");
  if (out.empty()) throw ScenarioError("no sources");
  return out;
}

namespace {

// Everything up to and including the labeling; programs are built here too
// so run_scenario can reuse them.
struct Prepared {
  ScenarioResult result;
  Programs programs;
  std::optional<KbLabeling> kb;
  std::optional<GossipLabeling> gossip;
  std::optional<TnInstance> tn;
};

Prepared prepare(const Scenario& s, const std::string& base_dir) {
  Prepared p;
  auto& r = p.result;
  r.graph = build_graph(s, base_dir);
  const std::size_t n = r.graph.node_count();
  r.sources = resolve_sources(s, n);
  std::set<NodeId> src(r.sources.begin(), r.sources.end());
  if (!s.clock_offsets.empty() && s.clock_offsets.size() != n)
    throw ScenarioError("clock_offsets must have one entry per node");
  Json& meta = r.label_meta;
  meta["algorithm"] = s.algorithm;
  meta["n"] = n;
  meta["k"] = r.sources.size();
  try {
    if (s.algorithm == "kb") {
      p.kb = labeling_kb(r.graph, r.sources, s.coordinator);
      for (const auto& l : p.kb->labels) r.labels.push_back(l.to_bits());
      meta["strat"] = p.kb->labels[0].strat ? 1 : 0;
      meta["sched_width"] = p.kb->labels[0].strat ? p.kb->labels[0].sched.size() : 0;
      meta["coordinator"] = p.kb->coordinator;
      meta["colours"] = p.kb->colour_count;
      meta["max_degree"] = r.graph.max_degree();
      meta["formula_bits"] = p.kb->formula_bits;
      for (NodeId v = 0; v < n; ++v)
        p.programs.push_back(kb_program(p.kb->labels[v], src.count(v) ? std::optional<Token>(v) : std::nullopt));
    } else if (s.algorithm == "gossip") {
      if (!r.graph.is_tree()) throw ScenarioError("gossip needs a tree");
      p.gossip = labeling_gossip(r.graph, s.policy, s.coordinator, s.horizon);
      for (const auto& l : p.gossip->labels) r.labels.push_back(l.to_bits());
      meta["distinguishing_number"] = p.gossip->psi.number;
      meta["coordinator"] = p.gossip->coordinator;
      meta["term_node"] = p.gossip->term_node;
      meta["policy"] = s.policy.to_string();
      meta["formula_bits"] = p.gossip->formula_bits;
      auto shared = std::make_shared<GossipShared>(s.policy);
      for (NodeId v = 0; v < n; ++v) p.programs.push_back(gossip_program(p.gossip->labels[v], v, v, shared));
    } else if (s.algorithm == "tn") {
      p.tn = build_tn(s.graph.x);
      r.labels = p.tn->labels;
      meta["x"] = s.graph.x;
      meta["formula_bits"] = 2;
      for (NodeId v = 0; v < n; ++v) p.programs.push_back(tn_program(r.labels[v], v));
    } else {
      auto kind = *demo_program_from_string(s.program);
      if (!s.labels.empty()) {
        if (s.labels.size() != n) throw ScenarioError("labels must have one entry per node");
        r.labels = s.labels;
      } else {
        for (NodeId v = 0; v < n; ++v) r.labels.push_back(binary(v));
      }
      std::uint64_t period = 1;
      for (const auto& l : r.labels) period = std::max<std::uint64_t>(period, std::stoull("0" + l, nullptr, 2) + 1);
      meta["program"] = s.program;
      for (NodeId v = 0; v < n; ++v)
        p.programs.push_back(
            make_demo_program(kind, r.labels[v], src.count(v) ? std::optional<Token>(v) : std::nullopt, period));
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const PrimeBoundExceeded&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  std::size_t max_bits = 0;
  for (const auto& l : r.labels) max_bits = std::max(max_bits, l.size());
  meta["max_label_bits"] = max_bits;
  return p;
}

void execute(const Scenario& s, Prepared& p) {
  auto& r = p.result;
  RunOptions ro;
  ro.horizon = s.horizon;
  ro.fast_forward = s.fast_forward;
  ro.clock_offsets = s.clock_offsets;
  ro.labels = r.labels;
  r.trace = run(r.graph, p.programs, ro);
  r.completion = check_completion(*r.trace, token_set(r.sources));
  r.ok = r.completion->solved;
}

}  // namespace

ScenarioResult label_scenario(const Scenario& s, const std::string& base_dir) {
  return std::move(prepare(s, base_dir).result);
}

ScenarioResult run_scenario(const Scenario& s, const std::string& base_dir) {
  Prepared p = prepare(s, base_dir);
  execute(s, p);
  return std::move(p.result);
}

ScenarioResult verify_scenario(const Scenario& s, const std::string& base_dir) {
  Prepared p = prepare(s, base_dir);
  execute(s, p);
  auto& r = p.result;
  Json checks = Json::array();
  Json failed = Json::array();
  auto add = [&](const std::string& name, bool pass, Json detail = Json()) {
    Json c = {{"name", name}, {"pass", pass}};
    if (!detail.is_null()) c["detail"] = std::move(detail);
    checks.push_back(std::move(c));
    if (!pass) failed.push_back(name);
  };

  add("completion", r.completion->solved);
  auto consistency = check_trace_consistency(r.graph, *r.trace);
  add("collision-soundness", consistency.empty(), consistency.empty() ? Json() : Json(consistency));
  std::size_t max_bits = r.label_meta["max_label_bits"].get<std::size_t>();
  std::size_t formula = r.label_meta.value("formula_bits", max_bits);
  if (s.algorithm != "custom") add("label-length", max_bits == formula, {{"max", max_bits}, {"formula", formula}});

  if (p.tn) {
    bool zero_offsets = std::all_of(s.clock_offsets.begin(), s.clock_offsets.end(), [](LocalClock c) { return c == 0; });
    if (zero_offsets && s.sources.kind == SourceSpec::Kind::All) {
      auto bad = check_tn_schedule(*p.tn, *r.trace);
      add("tn-schedule", bad.empty(), bad.empty() ? Json() : Json(bad));
    }
  }
  if (p.gossip) {
    GossipRunOptions go;
    go.policy = s.policy;
    go.coordinator = s.coordinator;
    go.clock_offsets = s.clock_offsets;
    go.horizon = s.horizon;
    go.record_rounds = false;
    go.check_invariants = true;
    auto gr = run_gossip(r.graph, go);
    const auto& inv = *gr.invariants;
    add("lemma4-divisibility", inv.lemma4);
    add("cor3-list-bound", inv.cor3);
    add("prop3-ancestor-distinct", inv.prop3);
    add("cor7-sibling-delays", inv.cor7);
    add("lemma5-equal-enc-isomorphic", inv.lemma5);
    add("thm5-settles", inv.thm5, {{"stable_round", inv.stable_round ? Json(*inv.stable_round) : Json()}});
    if (!inv.violations.empty()) r.evidence["violations"] = inv.violations;
  }
  if (p.kb) {
    // Naive stepping must reproduce the fast-forwarded execution.
    Scenario naive = s;
    naive.fast_forward = false;
    naive.horizon = r.trace->final_round;
    Prepared q = prepare(naive, base_dir);
    execute(naive, q);
    add("fast-forward-equivalence", same_execution(*r.trace, *q.result.trace));
  }
  r.evidence["scenario"] = s.name;
  r.evidence["algorithm"] = s.algorithm;
  r.evidence["checks"] = checks;
  r.evidence["failed"] = failed;
  r.ok = failed.empty();
  return std::move(r);
}

Json message_to_json(const Message& m) {
  Json j;
  j["tag"] = m.tag;
  for (const auto& [name, value] : m.fields) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, TokenSet>)
            j[name] = v.items();
          else if constexpr (std::is_same_v<T, Encoding>)
            j[name] = v.to_string();
          else
            j[name] = v;
        },
        value);
  }
  return j;
}

Json trace_to_json(const Trace& t) {
  Json j;
  j["node_count"] = t.node_count;
  j["labels"] = t.labels;
  j["clock_offsets"] = t.clock_offsets;
  j["status"] = to_string(t.status);
  j["final_round"] = t.final_round;
  Json term = Json::array();
  for (const auto& r : t.termination_round) term.push_back(r ? Json(*r) : Json());
  j["termination_round"] = term;
  Json know = Json::array();
  for (const auto& k : t.final_knowledge) know.push_back(k.items());
  j["final_knowledge"] = know;
  Json rounds = Json::array();
  for (const auto& rec : t.rounds) {
    Json r;
    r["round"] = rec.round;
    Json tx = Json::array();
    for (const auto& x : rec.transmissions) tx.push_back({{"node", x.node}, {"message", message_to_json(*x.message)}});
    r["transmissions"] = tx;
    Json rx = Json::array();
    for (const auto& x : rec.receptions) rx.push_back({{"node", x.node}, {"from", x.from}});
    r["receptions"] = rx;
    r["collisions"] = rec.collisions;
    rounds.push_back(std::move(r));
  }
  j["rounds"] = rounds;
  const auto& m = t.metrics;
  j["metrics"] = {{"rounds", m.rounds},
                  {"executed_rounds", m.executed_rounds},
                  {"transmissions", m.transmissions},
                  {"receptions", m.receptions},
                  {"collisions", m.collisions},
                  {"max_message_bytes", m.max_message_bytes}};
  return j;
}

std::string metrics_csv(const Trace& t, const std::optional<CompletionReport>& c) {
  std::ostringstream o;
  const auto& m = t.metrics;
  o << "status,rounds,executed_rounds,transmissions,receptions,collisions,max_message_bytes,solved,completion_round\n";
  o << to_string(t.status) << ',' << m.rounds << ',' << m.executed_rounds << ',' << m.transmissions << ','
    << m.receptions << ',' << m.collisions << ',' << m.max_message_bytes << ',' << (c && c->solved ? 1 : 0) << ',';
  if (c && c->completion_round) o << *c->completion_round;
  o << '\n';
  return o.str();
}

std::string labels_text(const ScenarioResult& r) {
  std::ostringstream o;
  for (const auto& [k, v] : r.label_meta.items()) o << "# " << k << ' ' << v.dump() << '\n';
  write_labels(o, r.labels);
  return o.str();
}

std::vector<std::string> check_trace_consistency(const Graph& g, const Trace& t) {
  std::vector<std::string> bad;
  for (const auto& rec : t.rounds) {
    std::vector<const Transmission*> by_node(g.node_count(), nullptr);
    for (const auto& x : rec.transmissions) by_node[x.node] = &x;
    std::vector<Reception> want_rx;
    std::vector<NodeId> want_col;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (by_node[v]) continue;
      std::optional<NodeId> from;
      int c = 0;
      for (NodeId u : g.neighbors(v))
        if (by_node[u]) {
          ++c;
          from = u;
        }
      if (c == 1) want_rx.push_back({v, *from, by_node[*from]->message});
      if (c >= 2) want_col.push_back(v);
    }
    bool same = want_rx.size() == rec.receptions.size() && want_col == rec.collisions;
    for (std::size_t i = 0; same && i < want_rx.size(); ++i)
      same = want_rx[i].node == rec.receptions[i].node && want_rx[i].from == rec.receptions[i].from &&
             *want_rx[i].message == *rec.receptions[i].message;
    if (!same && bad.size() < 16) bad.push_back("round " + std::to_string(rec.round) + " disagrees with the model");
  }
  return bad;
}

}  // namespace radiolab
