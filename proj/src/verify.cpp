#include "radiolab/verify.hpp"

#include <algorithm>
#include <map>

namespace radiolab {

CompletionReport check_completion(const Trace& trace, const TokenSet& sources) {
  CompletionReport rep;
  const std::size_t n = trace.node_count;
  rep.missing.resize(n);
  rep.solved = true;
  bool all_terminated = true;
  for (NodeId v = 0; v < n; ++v) {
    for (Token t : sources)
      if (!trace.final_knowledge[v].contains(t)) rep.missing[v].insert(t);
    if (!rep.missing[v].empty()) rep.solved = false;
    if (!trace.termination_round[v]) all_terminated = false;
  }
  if (rep.solved) {
    // Knowledge only grows, so completion is the latest round in which some
    // node first held everything.
    Round when = 0;
    for (NodeId v = 0; v < n; ++v)
      for (const auto& [round, k] : trace.knowledge_log[v])
        if (k.contains_all(sources)) {
          when = std::max(when, round);
          break;
        }
    rep.completion_round = when;
  }
  rep.acknowledged = rep.solved && all_terminated;
  return rep;
}

LabelLengthReport label_length_report(const std::vector<std::string>& labels, const std::vector<BoundCheck>& bounds) {
  LabelLengthReport rep;
  std::map<std::size_t, std::size_t> hist;
  for (const auto& l : labels) {
    rep.per_node.push_back(l.size());
    rep.max_bits = std::max(rep.max_bits, l.size());
    ++hist[l.size()];
  }
  rep.histogram.assign(hist.begin(), hist.end());
  for (auto b : bounds) {
    b.holds = rep.max_bits <= b.bits;
    rep.bounds.push_back(b);
  }
  return rep;
}

}  // namespace radiolab
