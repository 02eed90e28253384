#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "radiolab/ack_broadcast.hpp"
#include "radiolab/encoding.hpp"
#include "radiolab/engine.hpp"
#include "radiolab/graph_algorithms.hpp"
#include "radiolab/primes.hpp"

namespace radiolab {

// How an encoding becomes a transmission delay.
//  Faithful: delay = nth_prime(enc); fails with PrimeBoundExceeded once enc
//            exceeds the bound.
//  Registry: each distinct encoding gets the next unused odd prime (3, 5, 7,
//            ...) in order of first appearance. Injective like the faithful
//            map but keeps delays small.
struct DelayPolicy {
  enum class Mode { Registry, Faithful };
  Mode mode = Mode::Registry;
  std::uint64_t bound = kDefaultPrimeBound;

  static DelayPolicy registry() { return {}; }
  static DelayPolicy faithful(std::uint64_t bound = kDefaultPrimeBound) { return {Mode::Faithful, bound}; }
  std::string to_string() const;
};

// One per run, shared by all node programs. Lookups happen at state-update
// points only, which the engine visits in round order and ascending node id.
class DelayRegistry {
 public:
  explicit DelayRegistry(DelayPolicy policy) : policy_(policy) {}
  std::uint64_t delay(const Encoding& enc, NodeId who);
  const DelayPolicy& policy() const { return policy_; }
  std::size_t size() const { return table_.size(); }

 private:
  DelayPolicy policy_;
  std::unordered_map<Encoding, std::uint64_t, EncodingHash> table_;
  std::uint64_t next_index_ = 2;  // p_2 = 3
};

struct GossipLabel {
  AckLabel ack;  // tree mode
  bool term = false;
  std::string sched;  // binary of psi(v), MSB first, no leading zeros

  std::uint32_t colour() const;
  std::string to_bits() const;  // join, stay, ack, term, sched
};

struct GossipLabeling {
  std::vector<GossipLabel> labels;
  NodeId coordinator = 0;
  Distinguishing psi;
  NodeId term_node = 0;
  Round last_round = 0;  // round of the last-arriving message in the labeling run
  std::size_t max_label_bits = 0;
  std::size_t formula_bits = 0;
};

std::size_t gossip_label_length_formula(std::uint32_t distinguishing_number);

GossipLabeling labeling_gossip(const Graph& tree, DelayPolicy policy, std::optional<NodeId> coordinator = {},
                               Round horizon = 100'000'000);

struct AggregateState {
  TokenSet known;
  std::uint32_t colour = 1;
  std::int64_t dist = 0;
  Encoding enc;
  std::vector<Encoding> children;
  std::optional<std::uint64_t> delay;  // unset for the coordinator in faithful mode
};

AggregateState initial_aggregate_state(std::uint32_t colour, std::int64_t dist, std::optional<Token> token);
// Overwrite the entry at the smallest index that divides recv, else append;
// then recompute enc. The delay is recomputed when a registry is given.
void absorb_child_enc(AggregateState& s, const Encoding& recv, DelayRegistry* registry = nullptr, NodeId who = 0);

struct GossipShared {
  explicit GossipShared(DelayPolicy p) : registry(p) {}
  DelayRegistry registry;
  std::uint64_t changes = 0;  // bumped on every aggregate state change
};

std::unique_ptr<NodeProgram> gossip_program(const GossipLabel& label, NodeId self, Token token,
                                            std::shared_ptr<GossipShared> shared);
// Null before the node knows its distance (or for other program types).
const AggregateState* gossip_state(const NodeProgram& p);

struct GossipProgress {
  std::optional<std::int64_t> m;
  std::optional<std::int64_t> last_round;     // coordinator: "last" received (synchronized)
  std::optional<std::int64_t> finish_round;   // first "finish" heard
  std::optional<std::int64_t> inform_origin;
  std::optional<std::int64_t> ack_round;      // coordinator: Inform acknowledged
};
const GossipProgress& gossip_progress(const NodeProgram& p);

struct GossipInvariants {
  bool lemma4 = true;        // enc divides every later enc
  bool cor3 = true;          // |childrenEncs| <= #children
  bool prop3 = true;         // ancestor enc/delay distinct
  bool cor7 = true;          // settled siblings have distinct delays
  bool lemma5 = true;        // equal settled enc => colored-isomorphic subtrees
  bool thm5 = true;          // every node settles
  std::vector<std::string> violations;
  std::uint64_t checked_rounds = 0;
  std::optional<Round> stable_round;          // fixpoint run
  std::vector<std::optional<Round>> settle_round;
  bool ok() const { return violations.empty(); }
};

struct GossipRunOptions {
  DelayPolicy policy;
  std::optional<NodeId> coordinator;
  std::vector<LocalClock> clock_offsets;
  bool fast_forward = true;
  Round horizon = 100'000'000;
  bool record_rounds = true;
  bool check_invariants = false;
};

struct GossipRun {
  GossipLabeling labeling;
  Trace trace;
  bool solved = false;
  GossipProgress root_progress;
  std::optional<GossipInvariants> invariants;
};

GossipRun run_gossip(const Graph& tree, const GossipRunOptions& opt = {});

// Runs Aggregate alone (no term bit) until the configuration can no longer
// change, recording settle rounds, and checks the per-round invariants along
// the way.
GossipInvariants gossip_fixpoint_check(const Graph& tree, const GossipLabeling& labeling, DelayPolicy policy,
                                       Round horizon = 100'000'000);

}  // namespace radiolab
