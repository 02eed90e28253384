// radiolab_cli: scenario-driven front end.
//
//   radiolab_cli label  --scenario s.json --out dir
//   radiolab_cli run    --scenario s.json --out dir [--horizon H] [--policy P] [--seed S]
//   radiolab_cli verify --scenario s.json --out dir
//   radiolab_cli report --scenario s.json
//   radiolab_cli demo   --kind kn|cycle4|automorphism --out dir [--n N] [--program P] [--horizon H] [--seed S]
//
// Exit status: 0 success, 1 run not solved / check failed, 2 bad input.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "radiolab/demos.hpp"
#include "radiolab/error.hpp"
#include "radiolab/graph_algorithms.hpp"
#include "radiolab/random.hpp"
#include "radiolab/scenario.hpp"

namespace fs = std::filesystem;
using namespace radiolab;

namespace {

struct Common {
  std::string scenario;
  std::string out = ".";
  std::optional<Round> horizon;
  std::optional<std::string> policy;
  std::optional<std::uint64_t> seed;
};

Scenario load(const Common& c) {
  Json j;
  {
    std::ifstream in(c.scenario);
    if (!in) throw ScenarioError("cannot open scenario " + c.scenario);
    try {
      j = Json::parse(in);
    } catch (const std::exception& e) {
      throw ScenarioError(e.what());
    }
  }
  if (c.horizon) j["horizon"] = *c.horizon;
  if (c.policy) j["policy"] = *c.policy;
  if (c.seed) {
    if (j.contains("graph") && j["graph"].is_object() && !j["graph"].contains("file")) j["graph"]["seed"] = *c.seed;
    if (j.contains("sources") && j["sources"].is_object()) j["sources"]["seed"] = *c.seed;
  }
  return parse_scenario(j);
}

std::string base_dir(const Common& c) { return fs::path(c.scenario).parent_path().string(); }

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

fs::path out_path(const Common& c, const std::string& name) { return fs::path(c.out) / name; }

int cmd_label(const Common& c) {
  Scenario s = load(c);
  auto r = label_scenario(s, base_dir(c));
  write_file(out_path(c, s.outputs.labels), labels_text(r));
  std::cout << "labels: " << r.labels.size() << " nodes, max " << r.label_meta["max_label_bits"] << " bits\n";
  return 0;
}

int cmd_run(const Common& c) {
  Scenario s = load(c);
  auto r = run_scenario(s, base_dir(c));
  write_file(out_path(c, s.outputs.labels), labels_text(r));
  write_file(out_path(c, s.outputs.trace), trace_to_json(*r.trace).dump(1) + "\n");
  write_file(out_path(c, s.outputs.metrics), metrics_csv(*r.trace, r.completion));
  std::cout << "status " << to_string(r.trace->status) << ", rounds " << r.trace->final_round << ", solved "
            << (r.completion->solved ? "yes" : "no");
  if (r.completion->completion_round) std::cout << " at round " << *r.completion->completion_round;
  std::cout << "\n";
  return r.ok ? 0 : 1;
}

int cmd_verify(const Common& c) {
  Scenario s = load(c);
  auto r = verify_scenario(s, base_dir(c));
  write_file(out_path(c, s.outputs.evidence), r.evidence.dump(2) + "\n");
  for (const auto& chk : r.evidence["checks"])
    std::cout << (chk["pass"].get<bool>() ? "PASS " : "FAIL ") << chk["name"].get<std::string>() << "\n";
  return r.ok ? 0 : 1;
}

int cmd_report(const Common& c) {
  Scenario s = load(c);
  auto r = label_scenario(s, base_dir(c));
  std::vector<BoundCheck> bounds;
  if (r.label_meta.contains("formula_bits"))
    bounds.push_back({"formula", r.label_meta["formula_bits"].get<std::size_t>(), false});
  auto rep = label_length_report(r.labels, bounds);
  Json j;
  j["max_bits"] = rep.max_bits;
  Json hist = Json::object();
  for (auto [len, count] : rep.histogram) hist[std::to_string(len)] = count;
  j["histogram"] = hist;
  for (const auto& b : rep.bounds) j["bounds"].push_back({{"name", b.name}, {"bits", b.bits}, {"holds", b.holds}});
  j["meta"] = r.label_meta;
  std::cout << j.dump(2) << "\n";
  return 0;
}

Json evidence_json(const DemoEvidence& e) {
  return {{"name", e.name},
          {"program", e.program},
          {"horizon", e.horizon},
          {"nodes", e.nodes},
          {"pairs_checked", e.pairs_checked},
          {"history_mismatches", e.history_mismatches},
          {"forbidden_deliveries", e.forbidden_deliveries},
          {"collisions", e.collisions},
          {"notes", e.notes},
          {"ok", e.ok()}};
}

int cmd_demo(const Common& c, const std::string& kind, std::size_t n, const std::string& program) {
  auto prog = demo_program_from_string(program);
  if (!prog) throw ScenarioError("unknown program '" + program + "'");
  Round horizon = c.horizon.value_or(1000);
  DemoEvidence ev;
  if (kind == "kn") {
    ev = demo_duplicate_labels_kn(n, 2, *prog, horizon);
  } else if (kind == "cycle4") {
    ev = demo_cycle4_identical(*prog, horizon);
  } else if (kind == "automorphism") {
    // First seeded random tree with a non-trivial automorphism; all-equal colors.
    std::uint64_t seed = c.seed.value_or(1);
    for (;; ++seed) {
      Graph t = random_tree(n, seed);
      Coloring col{std::vector<std::uint32_t>(n, 1)};
      if (auto phi = preserved_automorphism(t, col)) {
        ev = demo_automorphism_histories(t, col, *phi, *prog, horizon);
        ev.notes.insert(ev.notes.begin(), "random tree n=" + std::to_string(n) + " seed=" + std::to_string(seed));
        break;
      }
    }
  } else {
    throw ScenarioError("unknown demo kind '" + kind + "'");
  }
  write_file(out_path(c, "evidence.json"), evidence_json(ev).dump(2) + "\n");
  std::cout << (ev.ok() ? "PASS " : "FAIL ") << ev.name << " (" << ev.program << ")\n";
  return ev.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radio network labeling toolkit"};
  app.require_subcommand(1);
  Common c;
  std::string kind = "kn", program = "round-robin";
  std::size_t n = 4;

  auto add_common = [&](CLI::App* sub, bool needs_scenario) {
    auto* opt = sub->add_option("--scenario", c.scenario, "scenario JSON file");
    if (needs_scenario) opt->required();
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--horizon", c.horizon, "round limit");
    sub->add_option("--policy", c.policy, "delay policy: registry | faithful[:bound]");
    sub->add_option("--seed", c.seed, "overrides graph and source seeds");
  };
  auto* label = app.add_subcommand("label", "apply the labeling scheme and write labels");
  auto* runc = app.add_subcommand("run", "label, simulate, write trace and metrics");
  auto* verify = app.add_subcommand("verify", "run and check the invariant suite");
  auto* report = app.add_subcommand("report", "label length report");
  auto* demo = app.add_subcommand("demo", "indistinguishability demos");
  for (auto* sub : {label, runc, verify, report}) add_common(sub, true);
  add_common(demo, false);
  demo->add_option("--kind", kind, "kn | cycle4 | automorphism");
  demo->add_option("--n", n, "node count");
  demo->add_option("--program", program, "round-robin | flood | all-transmit");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*label) return cmd_label(c);
    if (*runc) return cmd_run(c);
    if (*verify) return cmd_verify(c);
    if (*report) return cmd_report(c);
    if (*demo) return cmd_demo(c, kind, n, program);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
