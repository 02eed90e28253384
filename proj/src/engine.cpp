#include "radiolab/engine.hpp"

#include <algorithm>
#include <limits>

#include "radiolab/error.hpp"

namespace radiolab {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::HorizonReached: return "horizon-reached";
    case RunStatus::Stopped: return "stopped";
  }
  return "?";
}

namespace {

struct Detailed {
  std::vector<RoundOutcome> outcomes;
  std::vector<Reception> receptions;
  std::vector<NodeId> collisions;
};

Detailed step_detailed(const Graph& g, std::span<const Action> actions) {
  if (actions.size() != g.node_count()) throw PreconditionViolation("step: one action per node required");
  Detailed d;
  d.outcomes.resize(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (actions[v].transmits()) continue;
    int count = 0;
    NodeId from = 0;
    for (NodeId w : g.neighbors(v))
      if (actions[w].transmits()) {
        ++count;
        from = w;
        if (count > 1) break;
      }
    if (count == 1) {
      d.outcomes[v].received = actions[from].transmit;
      d.receptions.push_back({v, from, actions[from].transmit});
    } else if (count > 1) {
      d.collisions.push_back(v);
    }
  }
  return d;
}

LocalClock to_local(Round g, LocalClock offset) {
  if (g > static_cast<Round>(std::numeric_limits<LocalClock>::max() / 2))
    throw LimitExceeded("round counter overflow");
  return static_cast<LocalClock>(g) + offset;
}

}  // namespace

std::vector<RoundOutcome> step(const Graph& g, std::span<const Action> actions) {
  return step_detailed(g, actions).outcomes;
}

bool same_execution(const Trace& a, const Trace& b) {
  if (a.node_count != b.node_count || a.labels != b.labels || a.clock_offsets != b.clock_offsets ||
      a.final_round != b.final_round || a.status != b.status || a.termination_round != b.termination_round ||
      a.final_knowledge != b.final_knowledge || a.knowledge_log != b.knowledge_log ||
      a.rounds.size() != b.rounds.size())
    return false;
  auto same_msg = [](const MessagePtr& x, const MessagePtr& y) { return x == y || (x && y && *x == *y); };
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    const auto& ra = a.rounds[i];
    const auto& rb = b.rounds[i];
    if (ra.round != rb.round || ra.collisions != rb.collisions ||
        ra.transmissions.size() != rb.transmissions.size() || ra.receptions.size() != rb.receptions.size())
      return false;
    for (std::size_t k = 0; k < ra.transmissions.size(); ++k)
      if (ra.transmissions[k].node != rb.transmissions[k].node ||
          !same_msg(ra.transmissions[k].message, rb.transmissions[k].message))
        return false;
    for (std::size_t k = 0; k < ra.receptions.size(); ++k)
      if (ra.receptions[k].node != rb.receptions[k].node || ra.receptions[k].from != rb.receptions[k].from ||
          !same_msg(ra.receptions[k].message, rb.receptions[k].message))
        return false;
  }
  return true;
}

Trace run(const Graph& g, const Programs& programs, const RunOptions& opt) {
  const std::size_t n = g.node_count();
  if (programs.size() != n) throw PreconditionViolation("run: one program per node required");
  if (opt.horizon < 1) throw PreconditionViolation("run: horizon must be positive");
  Trace tr;
  tr.node_count = n;
  tr.labels = opt.labels.empty() ? std::vector<std::string>(n) : opt.labels;
  tr.clock_offsets = opt.clock_offsets.empty() ? std::vector<LocalClock>(n, 0) : opt.clock_offsets;
  if (tr.labels.size() != n || tr.clock_offsets.size() != n)
    throw PreconditionViolation("run: labels/offsets must have one entry per node");
  tr.termination_round.assign(n, std::nullopt);
  tr.knowledge_log.resize(n);
  std::vector<std::size_t> known_size(n);
  for (NodeId v = 0; v < n; ++v) {
    tr.knowledge_log[v].emplace_back(0, programs[v]->knowledge());
    known_size[v] = programs[v]->knowledge().size();
  }
  ProgramView view(programs);

  auto all_done = [&] {
    for (NodeId v = 0; v < n; ++v)
      if (!tr.termination_round[v]) return false;
    return true;
  };

  std::vector<Action> actions(n);
  Round g_now = 1;
  bool finished = false;
  while (!finished) {
    if (all_done()) {
      tr.status = RunStatus::Completed;
      break;
    }
    if (opt.fast_forward) {
      Round next = std::numeric_limits<Round>::max();
      for (NodeId v = 0; v < n; ++v) {
        if (tr.termination_round[v]) continue;
        auto w = programs[v]->next_wakeup(to_local(g_now, tr.clock_offsets[v]));
        if (!w) continue;
        LocalClock gl = *w - tr.clock_offsets[v];
        Round cand = gl <= static_cast<LocalClock>(g_now) ? g_now : static_cast<Round>(gl);
        next = std::min(next, cand);
      }
      if (next > opt.horizon) {
        tr.final_round = opt.horizon;
        tr.status = RunStatus::HorizonReached;
        break;
      }
      g_now = next;
    }
    if (g_now > opt.horizon) {
      tr.final_round = opt.horizon;
      tr.status = RunStatus::HorizonReached;
      break;
    }

    for (NodeId v = 0; v < n; ++v)
      actions[v] = tr.termination_round[v] ? Action::listen() : programs[v]->act(to_local(g_now, tr.clock_offsets[v]));
    Detailed d = step_detailed(g, actions);
    for (NodeId v = 0; v < n; ++v) {
      if (tr.termination_round[v]) continue;
      programs[v]->observe(to_local(g_now, tr.clock_offsets[v]), d.outcomes[v].received.get());
    }

    RoundRecord rec;
    rec.round = g_now;
    for (NodeId v = 0; v < n; ++v)
      if (actions[v].transmits()) {
        rec.transmissions.push_back({v, actions[v].transmit});
        tr.metrics.max_message_bytes =
            std::max<std::uint64_t>(tr.metrics.max_message_bytes, serialize(*actions[v].transmit).size());
      }
    tr.metrics.executed_rounds++;
    tr.metrics.transmissions += rec.transmissions.size();
    tr.metrics.receptions += d.receptions.size();
    tr.metrics.collisions += d.collisions.size();
    rec.receptions = std::move(d.receptions);
    rec.collisions = std::move(d.collisions);
    if (!rec.transmissions.empty() && opt.record_rounds) tr.rounds.push_back(std::move(rec));

    for (NodeId v = 0; v < n; ++v) {
      if (tr.termination_round[v]) continue;
      const TokenSet& k = programs[v]->knowledge();
      if (k.size() != known_size[v]) {
        known_size[v] = k.size();
        tr.knowledge_log[v].emplace_back(g_now, k);
      }
      if (programs[v]->terminated()) tr.termination_round[v] = g_now;
    }
    tr.final_round = g_now;
    if (opt.observer) opt.observer(g_now, view);
    if (opt.stop && opt.stop(g_now, view)) {
      tr.status = RunStatus::Stopped;
      finished = true;
    }
    if (g_now == std::numeric_limits<Round>::max()) throw LimitExceeded("round counter overflow");
    ++g_now;
  }
  for (NodeId v = 0; v < n; ++v) tr.final_knowledge.push_back(programs[v]->knowledge());
  tr.metrics.rounds = tr.final_round;
  return tr;
}

namespace {

std::vector<std::pair<LocalClock, MessagePtr>> history(const Trace& t, NodeId v, LocalClock through) {
  std::vector<std::pair<LocalClock, MessagePtr>> h;
  for (const auto& r : t.rounds) {
    LocalClock local = static_cast<LocalClock>(r.round) + t.clock_offsets[v];
    if (local > through) break;
    for (const auto& rc : r.receptions)
      if (rc.node == v) h.emplace_back(local, rc.message);
  }
  return h;
}

}  // namespace

bool histories_equal_mod(const Trace& t, NodeId u, NodeId v, LocalClock through,
                         const std::function<Token(Token)>& f) {
  if (u >= t.node_count || v >= t.node_count) throw PreconditionViolation("histories_equal: node out of range");
  if (t.labels[u] != t.labels[v]) return false;
  auto hu = history(t, u, through);
  auto hv = history(t, v, through);
  if (hu.size() != hv.size()) return false;
  for (std::size_t i = 0; i < hu.size(); ++i) {
    if (hu[i].first != hv[i].first) return false;
    const Message& mu = *hu[i].second;
    if (!(f ? map_tokens(mu, f) == *hv[i].second : mu == *hv[i].second)) return false;
  }
  return true;
}

bool histories_equal(const Trace& t, NodeId u, NodeId v, LocalClock through) {
  return histories_equal_mod(t, u, v, through, {});
}

}  // namespace radiolab
