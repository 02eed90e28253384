#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radiolab/engine.hpp"

namespace radiolab {

struct CompletionReport {
  bool solved = false;
  std::optional<Round> completion_round;  // first round with every node holding every source
  std::vector<TokenSet> missing;          // per node
  bool acknowledged = false;              // solved and every node terminated
};

CompletionReport check_completion(const Trace& trace, const TokenSet& sources);

struct BoundCheck {
  std::string name;
  std::size_t bits = 0;
  bool holds = false;  // max label length <= bits
};

struct LabelLengthReport {
  std::size_t max_bits = 0;
  std::vector<std::size_t> per_node;
  std::vector<std::pair<std::size_t, std::size_t>> histogram;  // (length, count), ascending
  std::vector<BoundCheck> bounds;
};

LabelLengthReport label_length_report(const std::vector<std::string>& labels,
                                      const std::vector<BoundCheck>& bounds = {});

}  // namespace radiolab
