#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radiolab/ack_broadcast.hpp"
#include "radiolab/engine.hpp"

namespace radiolab {

struct KBLabel {
  bool strat = false;  // false: Individual-Collect, true: RoundRobin-Collect
  AckLabel ack;
  std::string sched;  // binary, MSB first

  std::uint64_t sched_value() const;
  // bit 0 strat, bits 1-3 join/stay/ack, then sched, then (general graphs
  // only) the ack colour bits.
  std::string to_bits() const;
};

struct KbLabeling {
  std::vector<KBLabel> labels;
  NodeId coordinator = 0;
  std::vector<NodeId> sources;      // source i (1-based) is sources[i-1]
  std::uint32_t colour_count = 0;   // c of the distance-two colouring
  std::size_t max_label_bits = 0;
  std::size_t formula_bits = 0;     // the closed-form length for this input
};

// Sources are given in index order. coordinator: preferred node, default 0;
// replaced by the smallest non-source when it is a source and k < n.
KbLabeling labeling_kb(const Graph& g, std::span<const NodeId> sources, std::optional<NodeId> coordinator = {});
// Closed form: 4 + bit_width(k) when k <= Delta, 4 + bit_width(c) otherwise,
// plus bit_width(c) ack-colour bits on non-trees.
std::size_t kb_label_length_formula(const Graph& g, std::size_t k, std::uint32_t colour_count);
// Tree bound 4 + 2 * min(bit_width(k), bit_width(Delta)).
std::size_t kb_tree_length_bound(std::size_t k, std::size_t max_degree);

struct KbProgress {
  std::optional<std::int64_t> m;
  std::optional<std::int64_t> aggregate_end;  // synchronized round
  std::optional<std::int64_t> inform_done;
  std::int64_t phases = 0;                    // Individual-Collect phases run (root)
  std::vector<std::int64_t> silent_phases;    // root
};

std::unique_ptr<NodeProgram> kb_program(const KBLabel& label, std::optional<Token> source);
const KbProgress& kb_progress(const NodeProgram& p);

struct KbRunOptions {
  std::optional<NodeId> coordinator;
  std::vector<LocalClock> clock_offsets;
  bool fast_forward = true;
  Round horizon = 10'000'000;
  bool record_rounds = true;
};

struct KbRun {
  KbLabeling labeling;
  Trace trace;
  KbProgress root_progress;
};

KbRun run_kb(const Graph& g, std::span<const NodeId> sources, const KbRunOptions& opt = {});

}  // namespace radiolab
