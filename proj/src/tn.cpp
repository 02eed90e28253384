#include "radiolab/tn.hpp"

#include <algorithm>
#include <set>

#include "radiolab/error.hpp"

namespace radiolab {

TnInstance build_tn(std::uint32_t x) {
  if (x < 2) throw PreconditionViolation("build_tn: x must be at least 2");
  TnInstance out;
  auto& s = out.spec;
  s.x = x;
  s.n = static_cast<std::size_t>(x) * (x + 1) / 2;
  std::vector<Edge> edges;
  NodeId next = 1;
  for (std::uint32_t i = 2; i <= x; ++i) {
    std::vector<NodeId> p;
    NodeId prev = s.r;
    for (std::uint32_t j = 1; j <= i; ++j) {
      edges.emplace_back(prev, next);
      p.push_back(next);
      prev = next++;
    }
    s.paths.push_back(std::move(p));
  }
  out.graph = Graph::from_edges(s.n, edges);
  out.labels.assign(s.n, "00");
  out.labels[s.r] = "11";
  for (std::uint32_t i = 2; i < x; ++i) out.labels[s.leaf(i)] = "01";
  out.labels[s.leaf(x)] = "10";
  return out;
}

namespace {

class TnProgram : public NodeProgram {
 public:
  TnProgram(std::string label, Token token) : label_(std::move(label)) { known_.insert(token); }

  Action act(LocalClock now) override {
    if (label_ == "11" && !started_ && now >= 1) {
      started_ = true;
      return Action::send(Message("init"));
    }
    if (pending_ && pending_at_ == now) {
      Message m = std::move(*pending_);
      pending_.reset();
      if (m.tag == "spread") done_ = true;
      if (m.has("msgs")) m.set("msgs", known_);
      return Action::send(std::move(m));
    }
    return Action::listen();
  }

  void observe(LocalClock now, const Message* msg) override {
    if (!msg) return;
    const std::string& tag = msg->tag;
    // The centre absorbs every gather, not only the first one.
    if (label_ == "11" && tag == "gather" && msg->has("msgs")) known_.merge(msg->tokens("msgs"));
    const bool first = seen_.insert(tag + (msg->has("last") ? "+last" : "")).second;
    if (!first) return;
    if (msg->has("msgs")) known_.merge(msg->tokens("msgs"));
    if (label_ == "11") {
      if (tag == "gather" && msg->has("last")) send_next(now, Message("spread").set("msgs", known_));
    } else if (label_ == "01" || label_ == "10") {
      if (tag == "init") {
        Message g("gather");
        g.set("msgs", known_);
        if (label_ == "10") g.set("last", true);
        send_next(now, std::move(g));
      } else if (tag == "spread") {
        done_ = true;
      }
    } else {
      if (tag == "init")
        send_next(now, Message("init"));
      else if (tag == "gather" || tag == "spread")
        send_next(now, *msg);
    }
  }

  std::optional<LocalClock> next_wakeup(LocalClock now) const override {
    if (label_ == "11" && !started_) return std::max<LocalClock>(now, 1);
    if (pending_ && pending_at_ >= now) return pending_at_;
    return std::nullopt;
  }

  bool terminated() const override { return done_; }
  const TokenSet& knowledge() const override { return known_; }

 private:
  void send_next(LocalClock now, Message m) {
    pending_ = std::move(m);
    pending_at_ = now + 1;
  }

  std::string label_;
  TokenSet known_;
  std::set<std::string> seen_;
  bool started_ = false;
  std::optional<Message> pending_;
  LocalClock pending_at_ = 0;
  bool done_ = false;
};

}  // namespace

std::unique_ptr<NodeProgram> tn_program(const std::string& label, Token token) {
  if (label != "11" && label != "01" && label != "10" && label != "00")
    throw PreconditionViolation("tn_program: label must be two bits");
  return std::make_unique<TnProgram>(label, token);
}

TnRun run_tn(std::uint32_t x, const std::vector<LocalClock>& clock_offsets, bool fast_forward) {
  TnRun out;
  out.instance = build_tn(x);
  Programs programs;
  for (NodeId v = 0; v < out.instance.spec.n; ++v) programs.push_back(tn_program(out.instance.labels[v], v));
  RunOptions ro;
  ro.horizon = 10 * static_cast<Round>(x) + 10;
  ro.fast_forward = fast_forward;
  ro.clock_offsets = clock_offsets;
  ro.labels = out.instance.labels;
  out.trace = run(out.instance.graph, programs, ro);
  return out;
}

TnSchedule tn_schedule_oracle(std::uint32_t x) {
  TnSpec s = build_tn(x).spec;
  TnSchedule o;
  o.init.assign(s.n, std::nullopt);
  o.gather = o.spread = o.init;
  for (std::uint32_t i = 2; i <= x; ++i) {
    const auto& p = s.path(i);
    for (std::uint32_t j = 1; j <= i; ++j) {
      NodeId v = p[j - 1];
      o.init[v] = j;
      // Distance i - j from the leaf receives the gather wave at i + (i - j);
      // the leaf itself hears its neighbour relay it at i + 2.
      o.gather[v] = j < i ? 2 * i - j : i + 2;
      o.spread[v] = 2 * x + j;
    }
    o.r_gather_rounds.push_back(2 * i);
  }
  if (x == 2) {
    o.init[s.r] = 2;
    o.spread[s.r] = 2 * x + 2;
  }
  o.gather[s.r] = 4;
  o.last_round = 2 * x;
  o.completion_round = 3 * x;
  return o;
}

std::vector<std::string> check_tn_schedule(const TnInstance& inst, const Trace& trace) {
  const auto& s = inst.spec;
  TnSchedule o = tn_schedule_oracle(s.x);
  std::vector<std::string> bad;
  const std::size_t n = s.n;
  std::vector<std::optional<Round>> init(n), gather(n), spread(n);
  std::vector<Round> r_gather;
  std::optional<Round> last;
  for (const auto& rec : trace.rounds)
    for (const auto& rx : rec.receptions) {
      const auto& tag = rx.message->tag;
      auto& slot = tag == "init" ? init : tag == "gather" ? gather : spread;
      if (!slot[rx.node]) slot[rx.node] = rec.round;
      if (rx.node == s.r && tag == "gather") {
        r_gather.push_back(rec.round);
        if (rx.message->has("last") && !last) last = rec.round;
      }
    }
  auto cmp = [&](const char* kind, const std::vector<std::optional<Round>>& got,
                 const std::vector<std::optional<Round>>& want) {
    for (NodeId v = 0; v < n; ++v)
      if (got[v] != want[v])
        bad.push_back(std::string(kind) + " at node " + std::to_string(v) + ": got " +
                      (got[v] ? std::to_string(*got[v]) : "none") + ", expected " +
                      (want[v] ? std::to_string(*want[v]) : "none"));
  };
  cmp("init", init, o.init);
  cmp("gather", gather, o.gather);
  cmp("spread", spread, o.spread);
  if (r_gather != o.r_gather_rounds) bad.push_back("r gather receptions differ from 2i");
  if (last != o.last_round) bad.push_back("r did not receive last at 2x");
  for (NodeId v = 0; v < n; ++v)
    if (!trace.termination_round[v] && v != s.r) bad.push_back("node " + std::to_string(v) + " did not terminate");
  if (trace.final_round > o.completion_round)
    bad.push_back("run ended at " + std::to_string(trace.final_round) + " > 3x");
  for (NodeId v = 0; v < n; ++v)
    if (trace.final_knowledge[v].size() != n) bad.push_back("node " + std::to_string(v) + " missing messages");
  for (const auto& l : trace.labels)
    if (l.size() != 2) bad.push_back("label is not two bits");
  for (const auto& rec : trace.rounds) {
    if (rec.round < 3 || rec.round > o.last_round) continue;
    std::size_t tx = 0;
    for (const auto& t : rec.transmissions)
      if (inst.graph.adjacent(t.node, s.r)) ++tx;
    if (tx > 1) bad.push_back("r has two transmitting neighbours in gather round " + std::to_string(rec.round));
  }
  return bad;
}

}  // namespace radiolab
