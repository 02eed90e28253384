// Python module _radiolab: graphs, labelings and scenario runs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "radiolab/error.hpp"
#include "radiolab/gossip.hpp"
#include "radiolab/graph_algorithms.hpp"
#include "radiolab/kb.hpp"
#include "radiolab/random.hpp"
#include "radiolab/scenario.hpp"
#include "radiolab/tn.hpp"
#include "radiolab/verify.hpp"

namespace py = pybind11;
using namespace radiolab;

namespace {

py::dict run_summary(const Trace& t, const TokenSet& sources) {
  auto c = check_completion(t, sources);
  py::dict d;
  d["status"] = to_string(t.status);
  d["final_round"] = t.final_round;
  d["solved"] = c.solved;
  d["completion_round"] = c.completion_round;
  d["transmissions"] = t.metrics.transmissions;
  d["collisions"] = t.metrics.collisions;
  return d;
}

TokenSet tokens(const std::vector<NodeId>& v) { return TokenSet(std::vector<Token>(v.begin(), v.end())); }

}  // namespace

PYBIND11_MODULE(_radiolab, m) {
  m.doc() = "Deterministic radio network simulator and labeling schemes";

  py::register_exception<InvalidGraph>(m, "InvalidGraph", PyExc_ValueError);
  py::register_exception<PreconditionViolation>(m, "PreconditionViolation", PyExc_ValueError);
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<PrimeBoundExceeded>(m, "PrimeBoundExceeded", PyExc_OverflowError);

  py::class_<Graph>(m, "Graph")
      .def(py::init([](std::size_t n, const std::vector<Edge>& edges) {
             return Graph::from_edges(n, std::span<const Edge>(edges));
           }),
           py::arg("n"), py::arg("edges"))
      .def_property_readonly("node_count", &Graph::node_count)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def_property_readonly("max_degree", &Graph::max_degree)
      .def("is_tree", &Graph::is_tree)
      .def("edges", &Graph::edges)
      .def("neighbors",
           [](const Graph& g, NodeId v) {
             auto s = g.neighbors(v);
             return std::vector<NodeId>(s.begin(), s.end());
           })
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        std::ostringstream o;
        o << "Graph(n=" << g.node_count() << ", m=" << g.edge_count() << ")";
        return o.str();
      });

  m.def("path_graph", &path_graph, py::arg("n"));
  m.def("cycle_graph", &cycle_graph, py::arg("n"));
  m.def("star_graph", &star_graph, py::arg("leaves"));
  m.def("complete_graph", &complete_graph, py::arg("n"));
  m.def("random_tree", &random_tree, py::arg("n"), py::arg("seed"));
  m.def("random_connected_graph", &random_connected_graph, py::arg("n"), py::arg("extra"), py::arg("seed"));
  m.def("tn_graph", [](std::uint32_t x) { return build_tn(x).graph; }, py::arg("x"));

  m.def("distance_two_coloring", [](const Graph& g) { return distance_two_coloring(g).color; });
  m.def(
      "distinguishing_number",
      [](const Graph& g) {
        auto d = distinguishing_number(g);
        return py::make_tuple(d.number, d.witness.color);
      },
      "(D, witness colouring)");
  m.def("automorphisms", [](const Graph& g) { return enumerate_automorphisms(g); });

  m.def(
      "kb_labels",
      [](const Graph& g, const std::vector<NodeId>& sources) {
        auto l = labeling_kb(g, sources);
        std::vector<std::string> out;
        for (const auto& x : l.labels) out.push_back(x.to_bits());
        return out;
      },
      py::arg("graph"), py::arg("sources"));
  m.def(
      "gossip_labels",
      [](const Graph& t) {
        auto l = labeling_gossip(t, DelayPolicy::registry());
        std::vector<std::string> out;
        for (const auto& x : l.labels) out.push_back(x.to_bits());
        return out;
      },
      py::arg("tree"));
  m.def("tn_labels", [](std::uint32_t x) { return build_tn(x).labels; }, py::arg("x"));

  m.def(
      "run_kb",
      [](const Graph& g, const std::vector<NodeId>& sources) {
        auto r = run_kb(g, sources, {.record_rounds = false});
        auto d = run_summary(r.trace, tokens(sources));
        d["strat"] = static_cast<int>(r.labeling.labels[0].strat);
        d["max_label_bits"] = r.labeling.max_label_bits;
        return d;
      },
      py::arg("graph"), py::arg("sources"));
  m.def(
      "run_gossip",
      [](const Graph& t, const std::string& policy) {
        GossipRunOptions o;
        o.policy = policy == "registry" ? DelayPolicy::registry() : DelayPolicy::faithful();
        o.record_rounds = false;
        auto r = run_gossip(t, o);
        std::vector<NodeId> all(t.node_count());
        for (NodeId v = 0; v < all.size(); ++v) all[v] = v;
        auto d = run_summary(r.trace, tokens(all));
        d["distinguishing_number"] = r.labeling.psi.number;
        d["max_label_bits"] = r.labeling.max_label_bits;
        return d;
      },
      py::arg("tree"), py::arg("policy") = "registry");
  m.def(
      "run_tn",
      [](std::uint32_t x) {
        auto r = run_tn(x);
        std::vector<NodeId> all(r.instance.spec.n);
        for (NodeId v = 0; v < all.size(); ++v) all[v] = v;
        return run_summary(r.trace, tokens(all));
      },
      py::arg("x"));

  // Scenario JSON in, result JSON out (decoded by the Python wrapper).
  m.def(
      "run_scenario_json",
      [](const std::string& text, const std::string& base_dir, bool verify) {
        Scenario s = parse_scenario(Json::parse(text));
        ScenarioResult r = verify ? verify_scenario(s, base_dir) : run_scenario(s, base_dir);
        Json out;
        out["ok"] = r.ok;
        out["labels"] = r.labels;
        out["meta"] = r.label_meta;
        if (r.completion) {
          out["solved"] = r.completion->solved;
          out["completion_round"] = r.completion->completion_round ? Json(*r.completion->completion_round) : Json();
        }
        if (r.trace) out["final_round"] = r.trace->final_round;
        if (verify) out["evidence"] = r.evidence;
        return out.dump();
      },
      py::arg("scenario"), py::arg("base_dir") = ".", py::arg("verify") = false);
}
