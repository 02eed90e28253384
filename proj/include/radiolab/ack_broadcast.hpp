#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radiolab/engine.hpp"
#include "radiolab/graph.hpp"

namespace radiolab {

struct AckBits {
  bool join = false;
  bool stay = false;
  bool ack = false;
  std::string bits() const;  // bit 0 join, bit 1 stay, bit 2 ack
  friend bool operator==(const AckBits&, const AckBits&) = default;
};

// Per-node acknowledged-broadcast label. colour_width == 0 selects tree mode;
// otherwise the node floods in its distance-two colour slot.
struct AckLabel {
  AckBits bits;
  std::uint32_t colour = 0;
  std::uint32_t colour_width = 0;

  bool general() const { return colour_width > 0; }
  std::uint32_t num_colours() const { return (1u << colour_width) - 1; }
  bool is_root() const { return bits.join && bits.stay && bits.ack; }
  bool is_acknowledger() const { return bits.ack && !bits.join && !bits.stay; }
  // In tree mode the stay bit marks nodes that relay (nodes with children).
  bool relays() const { return general() || bits.stay; }
  std::string to_bits() const;  // AckBits then colour, MSB first
  friend bool operator==(const AckLabel&, const AckLabel&) = default;
};

std::vector<AckLabel> label_ack_tree(const Graph& tree, NodeId root);
std::vector<AckLabel> label_ack_general(const Graph& g, NodeId root);
// Tree labels for trees, colour-slot labels otherwise.
std::vector<AckLabel> label_ack(const Graph& g, NodeId root);

// Reception round of every node in the colour-slot flood (root: 0).
std::vector<std::int64_t> slot_flood_rounds(const Graph& g, NodeId root, const std::vector<std::uint32_t>& colour,
                                            std::uint32_t num_colours);

// One B (plus optional ACK) at one node. Rounds are the caller's synchronized
// rounds; session round s corresponds to round origin + s.
class BroadcastSession {
 public:
  BroadcastSession(const AckLabel& label, std::string kind, std::int64_t origin);

  const std::string& kind() const { return kind_; }
  std::int64_t origin() const { return origin_; }

  // Root only: start the broadcast of payload (tag replaced by kind).
  void originate(const Message& payload);
  // ACK initiation by this node at round r, extra fields attached.
  void schedule_ack(std::int64_t r, const Message& extra);

  std::optional<Message> outgoing(std::int64_t r) const;
  // True when m belongs to this session (its kind, or "ack").
  bool incoming(std::int64_t r, const Message& m);
  std::optional<std::int64_t> next_transmission(std::int64_t r) const;

  bool informed() const { return informed_round_.has_value(); }
  std::int64_t informed_round() const { return *informed_round_; }
  const Message& payload() const { return payload_; }
  std::uint32_t depth() const { return depth_; }  // tree mode
  std::optional<std::int64_t> ack_round() const { return ack_round_; }
  const Message& ack_message() const { return ack_; }

 private:
  void schedule(std::int64_t r, Message m);
  std::int64_t next_slot_after(std::int64_t r) const;

  AckLabel label_;
  std::string kind_;
  std::int64_t origin_;
  std::optional<std::int64_t> informed_round_;
  Message payload_;
  std::uint32_t depth_ = 0;
  IntList path_;
  std::vector<std::pair<std::int64_t, Message>> pending_;  // sorted by round
  std::optional<std::int64_t> ack_round_;
  Message ack_;
};

// B_bounded: B with an ack from the designated acknowledger carrying m, then
// the root rebroadcasts m from round origin + 2m + 1. Everyone knows m by
// origin + 3m, the common termination round.
class BoundedBroadcast {
 public:
  BoundedBroadcast(const AckLabel& label, std::string kind, std::int64_t origin);

  void originate(const Message& payload);
  std::optional<Message> outgoing(std::int64_t r) const;
  bool incoming(std::int64_t r, const Message& m);
  std::optional<std::int64_t> next_transmission(std::int64_t r) const;

  const BroadcastSession& first() const { return first_; }
  std::optional<std::int64_t> m() const { return m_; }
  std::optional<std::int64_t> done_round() const;

 private:
  AckLabel label_;
  std::int64_t origin_;
  BroadcastSession first_;
  std::optional<BroadcastSession> second_;
  std::optional<std::int64_t> m_;
};

// Synchronized round carried by the first message a node hears from an
// origin-0 broadcast.
std::int64_t sync_round_of(const AckLabel& label, const Message& m);

enum class AckMode { Ack, Bounded, AckDes };

struct BroadcastOptions {
  std::optional<NodeId> designated;  // AckDes: the z_des node
  std::int64_t m = 0;                // AckDes: known bound
  bool force_general = false;        // colour-slot labels even on trees
  std::vector<LocalClock> clock_offsets;
  bool fast_forward = true;
  Round horizon = 100000;
};

struct BroadcastResult {
  std::int64_t m = 0;       // Bounded: learned bound; AckDes: the given one
  std::int64_t t_done = 0;  // Bounded: 3m
  std::vector<std::optional<std::int64_t>> reception_round;  // synchronized rounds; root 0
  std::optional<std::int64_t> ack_round;
  std::vector<std::optional<std::int64_t>> termination_round;
};

struct BroadcastRun {
  std::vector<AckLabel> labels;
  BroadcastResult result;
  Trace trace;
};

std::unique_ptr<NodeProgram> make_broadcast_program(const AckLabel& label, AckMode mode, Token token,
                                                    std::int64_t m = 0, bool designated = false);
BroadcastRun run_broadcast(const Graph& g, NodeId root, AckMode mode, const BroadcastOptions& opt = {});

}  // namespace radiolab
