#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "radiolab/engine.hpp"
#include "radiolab/graph.hpp"

namespace radiolab {

// Small deterministic program families used by the indistinguishability
// demos. None of them looks at token identities, only at the label and the
// reception history, which is what the symmetry arguments need.
//  RoundRobinByLabel: transmit what you know when clock % period == label % period.
//  FloodOnReceive:    sources transmit once at round (label % period) + 1,
//                     then everyone retransmits the round after learning
//                     something new.
//  AllTransmit:       transmit what you know every round (listen while you
//                     know nothing).
enum class DemoProgram { RoundRobinByLabel, FloodOnReceive, AllTransmit };

std::string to_string(DemoProgram p);
std::optional<DemoProgram> demo_program_from_string(const std::string& s);
const std::vector<DemoProgram>& all_demo_programs();

std::unique_ptr<NodeProgram> make_demo_program(DemoProgram kind, const std::string& label, std::optional<Token> token,
                                               std::uint64_t period);

struct DemoEvidence {
  std::string name;
  std::string program;
  Round horizon = 0;
  std::size_t nodes = 0;
  std::uint64_t pairs_checked = 0;
  std::uint64_t history_mismatches = 0;
  std::uint64_t forbidden_deliveries = 0;
  std::uint64_t collisions = 0;
  std::vector<std::string> notes;
  bool ok() const { return history_mismatches == 0 && forbidden_deliveries == 0; }
};

// K_n with sources 0..k-1 where sources 0 and 1 carry the same label. Checks
// that the two histories stay equal and that no node ever receives token 0.
DemoEvidence demo_duplicate_labels_kn(std::size_t n, std::size_t k, DemoProgram program, Round horizon = 1000);

// 4-cycle, all labels equal, one source (node 0): the opposite node never
// hears it because its two neighbours always act together.
DemoEvidence demo_cycle4_identical(DemoProgram program, Round horizon = 1000);

// A non-trivial automorphism preserving the coloring, if one exists.
std::optional<Permutation> preserved_automorphism(const Graph& tree, const Coloring& coloring);

// Gossip setting (every node is a source, token = id) on a tree labeled by a
// coloring that phi preserves. Checks h_x = h_phi(x) (tokens renamed by phi)
// for every x, and that x's token never reaches phi(x), located at the middle
// edge (odd path length) or middle node (even) of the x..phi(x) path.
// PreconditionViolation unless phi is a non-trivial automorphism preserving
// the coloring.
DemoEvidence demo_automorphism_histories(const Graph& tree, const Coloring& coloring, const Permutation& phi,
                                         DemoProgram program, Round horizon = 1000);

}  // namespace radiolab
