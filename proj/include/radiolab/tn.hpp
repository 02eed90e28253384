#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "radiolab/engine.hpp"
#include "radiolab/graph.hpp"

namespace radiolab {

// T_n for n = x(x+1)/2: a centre r = node 0 and, for i = 2..x, a path of
// length i from r to the leaf l_i. Path P_2 gets the next ids, then P_3, ...
struct TnSpec {
  std::uint32_t x = 2;
  std::size_t n = 3;
  NodeId r = 0;
  // paths[i] lists the nodes of P_i at distance 1..i from r (index i - 2 in
  // the vector; use path(i)).
  std::vector<std::vector<NodeId>> paths;

  const std::vector<NodeId>& path(std::uint32_t i) const { return paths.at(i - 2); }
  NodeId leaf(std::uint32_t i) const { return path(i).back(); }
};

struct TnInstance {
  Graph graph;
  TnSpec spec;
  std::vector<std::string> labels;  // "11", "01", "10", "00"
};

TnInstance build_tn(std::uint32_t x);

// Algorithm 1. Non-centre nodes only react to the previous round's reception,
// so they need no clock. The centre sends "init" at its local round 1 (or at
// its first round when the clock already passed 1).
std::unique_ptr<NodeProgram> tn_program(const std::string& label, Token token);

struct TnRun {
  TnInstance instance;
  Trace trace;
};

TnRun run_tn(std::uint32_t x, const std::vector<LocalClock>& clock_offsets = {}, bool fast_forward = true);

// First round in which each node receives each message kind, in the centre's
// clock, as predicted by the closed-form schedule. Echoes (a node hearing a
// relay of something it already has) are included, and the centre's first
// init/spread reception only exists for x = 2 (for larger x every path's
// first node transmits together, which collides at r).
struct TnSchedule {
  std::vector<std::optional<Round>> init, gather, spread;
  std::vector<Round> r_gather_rounds;  // 2i for i = 2..x
  Round last_round = 0;                // 2x
  Round completion_round = 0;          // 3x
};

TnSchedule tn_schedule_oracle(std::uint32_t x);

// Compares a trace (zero clock offsets) with the oracle. Also checks the
// collision claim in its true form: during the gather phase (rounds 3..2x)
// r never has two transmitting neighbours. Returns mismatch descriptions.
std::vector<std::string> check_tn_schedule(const TnInstance& inst, const Trace& trace);

}  // namespace radiolab
