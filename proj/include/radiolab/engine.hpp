#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radiolab/graph.hpp"
#include "radiolab/message.hpp"

namespace radiolab {

// Global rounds start at 1. 64 bits with overflow checks (see README).
using Round = std::uint64_t;
// Local clock value = global round + per-node offset.
using LocalClock = std::int64_t;
using MessagePtr = std::shared_ptr<const Message>;

struct Action {
  MessagePtr transmit;  // null means listen

  static Action listen() { return {}; }
  static Action send(Message m) { return Action{std::make_shared<const Message>(std::move(m))}; }
  bool transmits() const { return transmit != nullptr; }
};

struct RoundOutcome {
  MessagePtr received;  // null: transmitted, silence, or collision
};

// A deterministic state machine folded over the node's history. act() is
// called once per executed round, then observe() with that round's outcome.
class NodeProgram {
 public:
  virtual ~NodeProgram() = default;
  virtual Action act(LocalClock now) = 0;
  virtual void observe(LocalClock now, const Message* received) = 0;
  // Earliest clock >= now at which act() may transmit or the state may change
  // without a reception; nullopt when only a reception can wake the program.
  // For every skipped round, act() must listen and observe(nullptr) must be a
  // no-op. The default never lets the engine skip.
  virtual std::optional<LocalClock> next_wakeup(LocalClock now) const { return now; }
  virtual bool terminated() const { return false; }
  virtual const TokenSet& knowledge() const = 0;
};

using Programs = std::vector<std::unique_ptr<NodeProgram>>;

// Reception rule: v receives m iff v listens and exactly one neighbor
// transmits, and that neighbor sent m.
std::vector<RoundOutcome> step(const Graph& g, std::span<const Action> actions);

struct Transmission {
  NodeId node = 0;
  MessagePtr message;
};
struct Reception {
  NodeId node = 0;
  NodeId from = 0;
  MessagePtr message;
};
struct RoundRecord {
  Round round = 0;
  std::vector<Transmission> transmissions;  // ascending node
  std::vector<Reception> receptions;        // ascending node
  std::vector<NodeId> collisions;           // listeners with >= 2 transmitting neighbors
};

enum class RunStatus { Completed, HorizonReached, Stopped };
std::string to_string(RunStatus s);

struct RunMetrics {
  Round rounds = 0;  // == final_round
  std::uint64_t executed_rounds = 0;
  std::uint64_t transmissions = 0;
  std::uint64_t receptions = 0;
  std::uint64_t collisions = 0;
  std::uint64_t max_message_bytes = 0;
  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

// Rounds in which nothing was transmitted are not stored: every node listened
// and received nothing, which is the same in fast-forward and naive mode.
struct Trace {
  std::size_t node_count = 0;
  std::vector<std::string> labels;
  std::vector<LocalClock> clock_offsets;
  std::vector<RoundRecord> rounds;
  Round final_round = 0;
  RunStatus status = RunStatus::HorizonReached;
  std::vector<std::optional<Round>> termination_round;
  std::vector<TokenSet> final_knowledge;
  // (global round, knowledge after the change); first entry is round 0.
  std::vector<std::vector<std::pair<Round, TokenSet>>> knowledge_log;
  RunMetrics metrics;
};

bool same_execution(const Trace& a, const Trace& b);

using ProgramView = std::span<const std::unique_ptr<NodeProgram>>;

struct RunOptions {
  Round horizon = 1'000'000;
  bool fast_forward = true;
  std::vector<LocalClock> clock_offsets;  // empty: all zero
  std::vector<std::string> labels;        // h[0] per node; empty: all ""
  std::function<bool(Round, ProgramView)> stop;       // checked after each executed round
  std::function<void(Round, ProgramView)> observer;   // after each executed round
  bool record_rounds = true;
};

Trace run(const Graph& g, const Programs& programs, const RunOptions& options);

// h[0] = label, then receptions by local round.
bool histories_equal(const Trace& trace, NodeId u, NodeId v, LocalClock through);
// Same, after renaming tokens in u's receptions with f.
bool histories_equal_mod(const Trace& trace, NodeId u, NodeId v, LocalClock through,
                         const std::function<Token(Token)>& f);

}  // namespace radiolab
