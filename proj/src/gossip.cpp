#include "radiolab/gossip.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "radiolab/error.hpp"

namespace radiolab {

std::string DelayPolicy::to_string() const {
  if (mode == Mode::Registry) return "registry";
  return "faithful:" + std::to_string(bound);
}

std::uint64_t DelayRegistry::delay(const Encoding& enc, NodeId who) {
  if (policy_.mode == DelayPolicy::Mode::Faithful) {
    auto v = enc.to_u64();
    if (!v || *v > policy_.bound)
      throw PrimeBoundExceeded("node " + std::to_string(who) + ": enc " + enc.to_string() +
                               " exceeds the prime bound " + std::to_string(policy_.bound));
    return nth_prime(*v, policy_.bound);
  }
  auto it = table_.find(enc);
  if (it != table_.end()) return it->second;
  std::uint64_t p = nth_prime(next_index_++, UINT64_MAX);
  table_.emplace(enc, p);
  return p;
}

std::uint32_t GossipLabel::colour() const {
  std::uint32_t v = 0;
  for (char c : sched) v = (v << 1) | (c == '1' ? 1u : 0u);
  return v;
}

std::string GossipLabel::to_bits() const { return ack.bits.bits() + (term ? "1" : "0") + sched; }

std::size_t gossip_label_length_formula(std::uint32_t d) { return 4 + static_cast<std::size_t>(std::bit_width(d)); }

AggregateState initial_aggregate_state(std::uint32_t colour, std::int64_t dist, std::optional<Token> token) {
  AggregateState s;
  if (token) s.known.insert(*token);
  s.colour = colour;
  s.dist = dist;
  s.enc = enc_base(colour, static_cast<std::uint64_t>(dist));
  return s;
}

void absorb_child_enc(AggregateState& s, const Encoding& recv, DelayRegistry* registry, NodeId who) {
  auto it = std::find_if(s.children.begin(), s.children.end(), [&](const Encoding& e) { return divides(e, recv); });
  if (it != s.children.end())
    *it = recv;
  else
    s.children.push_back(recv);
  s.enc = enc_combine(s.colour, static_cast<std::uint64_t>(s.dist), s.children);
  if (registry && (s.dist > 0 || registry->policy().mode == DelayPolicy::Mode::Registry))
    s.delay = registry->delay(s.enc, who);
}

namespace {

std::string binary(std::uint64_t v) {
  std::string s;
  for (int i = std::bit_width(v) - 1; i >= 0; --i) s += ((v >> i) & 1u) ? '1' : '0';
  return s.empty() ? "0" : s;
}

class GossipProgram : public NodeProgram {
 public:
  GossipProgram(const GossipLabel& label, NodeId self, Token token, std::shared_ptr<GossipShared> shared)
      : label_(label), self_(self), token_(token), shared_(std::move(shared)), init_(label.ack, "init", 0) {}

  Action act(LocalClock now) override {
    if (root() && !offset_) {
      offset_ = 1 - now;
      init_.originate(Message());
      start_aggregate(0);
    }
    if (!offset_) return Action::listen();
    const std::int64_t r = now + *offset_;
    auto out = outgoing(r);
    return out ? Action::send(std::move(*out)) : Action::listen();
  }

  void observe(LocalClock now, const Message* msg) override {
    if (!offset_ && msg) offset_ = sync_round_of(label_.ack, *msg) - now;
    if (!offset_) return;
    const std::int64_t r = now + *offset_;
    if (msg) {
      if (!stage2(r)) {
        init_.incoming(r, *msg);
        if (!agg_ && init_.first().informed()) start_aggregate(init_.first().depth());
        progress_.m = init_.m();
      } else {
        handle(r, *msg);
      }
    }
    if (progress_.inform_origin && r >= *progress_.inform_origin + 2 * m()) done_ = true;
  }

  std::optional<LocalClock> next_wakeup(LocalClock now) const override {
    if (!offset_) return root() ? std::optional<LocalClock>(now) : std::nullopt;
    const std::int64_t r = now + *offset_;
    std::optional<std::int64_t> best;
    auto consider = [&](std::optional<std::int64_t> c) {
      if (c && *c >= r && (!best || *c < *best)) best = c;
    };
    consider(init_.next_transmission(r));
    if (init_.m() && agg_ && !halted_ && agg_->dist > 0 && agg_->delay) {
      const std::int64_t base = 3 * m();
      const std::int64_t s = std::max<std::int64_t>(r - base, 1);
      const std::int64_t tmin = (s + 2) / 2;
      const auto d = static_cast<std::int64_t>(*agg_->delay);
      const std::int64_t t = (tmin + d - 1) / d * d;
      consider(base + 2 * t - 1);
    }
    consider(finish_tx_);
    if (inform_) {
      consider(inform_->next_transmission(r));
      consider(*progress_.inform_origin + 2 * m());
    }
    if (!best) return std::nullopt;
    return *best - *offset_;
  }

  bool terminated() const override { return done_; }
  const TokenSet& knowledge() const override { return agg_ ? agg_->known : empty_; }
  const AggregateState* state() const { return agg_ ? &*agg_ : nullptr; }
  const GossipProgress& progress() const { return progress_; }

 private:
  bool root() const { return label_.ack.is_root(); }
  std::int64_t m() const { return *init_.m(); }
  bool stage2(std::int64_t r) const { return init_.m() && r > 3 * m(); }

  void start_aggregate(std::int64_t dist) {
    agg_ = initial_aggregate_state(label_.colour(), dist, token_);
    has_last_ = label_.term;
    auto& reg = shared_->registry;
    if (dist > 0 || reg.policy().mode == DelayPolicy::Mode::Registry) agg_->delay = reg.delay(agg_->enc, self_);
    ++shared_->changes;
  }

  std::optional<Message> outgoing(std::int64_t r) const {
    if (!stage2(r)) return init_.outgoing(r);
    if (inform_)
      if (auto o = inform_->outgoing(r)) return o;
    const std::int64_t sigma = r - 3 * m();
    if (sigma % 2 == 0) {
      if (finish_tx_ && *finish_tx_ == r) return Message("finish");
      return std::nullopt;
    }
    if (halted_ || !agg_ || agg_->dist == 0 || !agg_->delay) return std::nullopt;
    const std::int64_t t = (sigma + 1) / 2;
    if (t % static_cast<std::int64_t>(*agg_->delay) != 0) return std::nullopt;
    Message out("agg");
    out.set("msgs", agg_->known).set("enc", agg_->enc).set("dist", agg_->dist);
    if (has_last_) out.set("last", true);
    return out;
  }

  void handle(std::int64_t r, const Message& msg) {
    if (msg.tag == "finish") {
      if (progress_.finish_round) return;
      progress_.finish_round = r;
      halted_ = true;
      if (!root()) finish_tx_ = r + 2;
      return;
    }
    if (msg.tag == "agg") {
      if (halted_ || !agg_ || msg.integer("dist") != agg_->dist + 1) return;
      agg_->known.merge(msg.tokens("msgs"));
      absorb_child_enc(*agg_, msg.encoding("enc"), &shared_->registry, self_);
      ++shared_->changes;
      if (msg.has("last")) has_last_ = true;
      if (root() && has_last_ && !progress_.last_round) {
        progress_.last_round = r;
        finish_tx_ = r + 1;
        halted_ = true;
        progress_.inform_origin = r + 2 * m() + 1;
        inform_.emplace(label_.ack, "inform", *progress_.inform_origin);
        inform_->originate(Message().set("msgs", agg_->known));
      }
      return;
    }
    if (!inform_) {
      if (msg.tag != "inform") return;
      progress_.inform_origin = r - sync_round_of(label_.ack, msg);
      inform_.emplace(label_.ack, "inform", *progress_.inform_origin);
    }
    const bool was = inform_->informed();
    inform_->incoming(r, msg);
    if (msg.tag == "inform" && msg.has("msgs") && agg_) agg_->known.merge(msg.tokens("msgs"));
    if (!was && inform_->informed() && label_.ack.is_acknowledger())
      inform_->schedule_ack(inform_->informed_round() + 1, Message());
    if (root() && inform_->ack_round()) progress_.ack_round = inform_->ack_round();
  }

  GossipLabel label_;
  NodeId self_;
  Token token_;
  std::shared_ptr<GossipShared> shared_;
  std::optional<LocalClock> offset_;
  BoundedBroadcast init_;
  std::optional<AggregateState> agg_;
  bool has_last_ = false;
  bool halted_ = false;
  std::optional<std::int64_t> finish_tx_;
  std::optional<BroadcastSession> inform_;
  GossipProgress progress_;
  bool done_ = false;
  TokenSet empty_;
};

const GossipProgram* as_gossip(const NodeProgram& p) { return dynamic_cast<const GossipProgram*>(&p); }

Programs make_programs(const GossipLabeling& l, DelayPolicy policy, std::shared_ptr<GossipShared>* shared_out) {
  auto shared = std::make_shared<GossipShared>(policy);
  Programs programs;
  for (NodeId v = 0; v < l.labels.size(); ++v) programs.push_back(gossip_program(l.labels[v], v, v, shared));
  if (shared_out) *shared_out = shared;
  return programs;
}

// Per-round checks on knowledge, child lists and encodings. Also tracks the
// last round in which each node's aggregate state changed.
class Monitor {
 public:
  Monitor(const Graph& g, NodeId root, GossipInvariants& out)
      : view_(root_tree(g, root)), out_(out), prev_enc_(g.node_count()), prev_delay_(g.node_count()),
        prev_known_(g.node_count(), 0), last_change_(g.node_count()) {}

  void operator()(Round round, ProgramView programs) {
    ++out_.checked_rounds;
    const std::size_t n = programs.size();
    std::vector<const AggregateState*> st(n);
    for (NodeId v = 0; v < n; ++v) {
      st[v] = gossip_state(*programs[v]);
      if (!st[v]) continue;
      const auto& s = *st[v];
      bool changed = !prev_enc_[v] || !(*prev_enc_[v] == s.enc) || prev_delay_[v] != s.delay ||
                     prev_known_[v] != s.known.size();
      if (prev_enc_[v] && !(*prev_enc_[v] == s.enc) && !divides(*prev_enc_[v], s.enc))
        fail(out_.lemma4, "lemma4: node " + std::to_string(v) + " round " + std::to_string(round));
      if (s.children.size() > view_.children[v].size())
        fail(out_.cor3, "cor3: node " + std::to_string(v) + " round " + std::to_string(round));
      if (changed) last_change_[v] = round;
      prev_enc_[v] = s.enc;
      prev_delay_[v] = s.delay;
      prev_known_[v] = s.known.size();
    }
    for (NodeId v = 0; v < n; ++v) {
      if (!st[v]) continue;
      for (auto w = view_.parent[v]; w; w = view_.parent[*w]) {
        if (!st[*w]) continue;
        if (st[v]->enc == st[*w]->enc || (st[v]->delay && st[v]->delay == st[*w]->delay))
          fail(out_.prop3, "prop3: nodes " + std::to_string(v) + "," + std::to_string(*w) + " round " +
                               std::to_string(round));
      }
    }
  }

  const std::vector<std::optional<Round>>& last_change() const { return last_change_; }
  const RootedTreeView& view() const { return view_; }

  void fail(bool& flag, std::string what) {
    flag = false;
    if (out_.violations.size() < 32) out_.violations.push_back(std::move(what));
  }

 private:
  RootedTreeView view_;
  GossipInvariants& out_;
  std::vector<std::optional<Encoding>> prev_enc_;
  std::vector<std::optional<std::uint64_t>> prev_delay_;
  std::vector<std::size_t> prev_known_;
  std::vector<std::optional<Round>> last_change_;
};

// True when no further reception can change any state: every node holds its
// subtree's messages, and absorbing any child's current enc would overwrite
// an entry with itself. Stale entries are allowed; the absorb rule can leave
// them behind when one sibling's enc divides another's.
bool stable(const RootedTreeView& view, const std::vector<TokenSet>& subtree, ProgramView programs) {
  const std::size_t n = programs.size();
  std::vector<const AggregateState*> st(n);
  for (NodeId v = 0; v < n; ++v)
    if (!(st[v] = gossip_state(*programs[v]))) return false;
  for (NodeId v = 0; v < n; ++v) {
    const auto& s = *st[v];
    if (!s.known.contains_all(subtree[v])) return false;
    for (NodeId c : view.children[v]) {
      const Encoding& e = st[c]->enc;
      auto it = std::find_if(s.children.begin(), s.children.end(), [&](const Encoding& x) { return divides(x, e); });
      if (it == s.children.end() || !(*it == e)) return false;
    }
  }
  return true;
}

}  // namespace

std::unique_ptr<NodeProgram> gossip_program(const GossipLabel& label, NodeId self, Token token,
                                            std::shared_ptr<GossipShared> shared) {
  return std::make_unique<GossipProgram>(label, self, token, std::move(shared));
}

const AggregateState* gossip_state(const NodeProgram& p) {
  auto* g = as_gossip(p);
  return g ? g->state() : nullptr;
}

const GossipProgress& gossip_progress(const NodeProgram& p) {
  auto* g = as_gossip(p);
  if (!g) throw PreconditionViolation("gossip_progress: not a gossip program");
  return g->progress();
}

GossipLabeling labeling_gossip(const Graph& tree, DelayPolicy policy, std::optional<NodeId> coordinator,
                               Round horizon) {
  const std::size_t n = tree.node_count();
  if (!tree.is_tree()) throw PreconditionViolation("labeling_gossip: graph is not a tree");
  if (n < 2) throw PreconditionViolation("labeling_gossip: need at least two nodes");
  GossipLabeling out;
  out.coordinator = coordinator.value_or(0);
  if (out.coordinator >= n) throw PreconditionViolation("labeling_gossip: coordinator out of range");
  out.psi = distinguishing_number(tree);
  auto ack = label_ack_tree(tree, out.coordinator);
  out.labels.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    out.labels[v].ack = ack[v];
    out.labels[v].sched = binary(out.psi.witness.color[v]);
  }

  // Run Aggregate without a term bit until the coordinator holds everything.
  auto programs = make_programs(out, policy, nullptr);
  RunOptions ro;
  ro.horizon = horizon;
  ro.record_rounds = false;
  const NodeId r = out.coordinator;
  ro.stop = [&](Round, ProgramView p) { return p[r]->knowledge().size() == n; };
  Trace t = run(tree, programs, ro);
  if (t.status != RunStatus::Stopped)
    throw LimitExceeded("labeling_gossip: coordinator did not collect all messages by round " +
                        std::to_string(t.final_round));
  const auto& log = t.knowledge_log[r];
  const TokenSet& before = log[log.size() - 2].second;
  out.last_round = log.back().first;
  for (Token tok : log.back().second)
    if (!before.contains(tok)) {
      out.term_node = tok;
      break;
    }
  out.labels[out.term_node].term = true;
  for (const auto& l : out.labels) out.max_label_bits = std::max(out.max_label_bits, l.to_bits().size());
  out.formula_bits = gossip_label_length_formula(out.psi.number);
  return out;
}

GossipInvariants gossip_fixpoint_check(const Graph& tree, const GossipLabeling& labeling, DelayPolicy policy,
                                       Round horizon) {
  GossipInvariants inv;
  GossipLabeling plain = labeling;
  for (auto& l : plain.labels) l.term = false;
  std::shared_ptr<GossipShared> shared;
  auto programs = make_programs(plain, policy, &shared);
  Monitor mon(tree, labeling.coordinator, inv);
  const auto& view = mon.view();
  const std::size_t n = tree.node_count();

  std::vector<TokenSet> subtree(n);
  std::vector<NodeId> order(n);
  for (NodeId v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return view.depth[a] > view.depth[b]; });
  for (NodeId v : order) {
    subtree[v].insert(v);
    for (NodeId c : view.children[v]) subtree[v].merge(subtree[c]);
  }

  std::uint64_t seen = UINT64_MAX;
  RunOptions ro;
  ro.horizon = horizon;
  ro.record_rounds = false;
  ro.observer = [&](Round round, ProgramView p) { mon(round, p); };
  ro.stop = [&](Round, ProgramView p) {
    if (shared->changes == seen) return false;
    seen = shared->changes;
    return stable(view, subtree, p);
  };
  Trace t = run(tree, programs, ro);
  inv.settle_round = mon.last_change();
  if (t.status != RunStatus::Stopped) {
    mon.fail(inv.thm5, "thm5: no fixpoint by round " + std::to_string(t.final_round));
    return inv;
  }
  inv.stable_round = t.final_round;

  std::vector<const AggregateState*> st(n);
  for (NodeId v = 0; v < n; ++v) st[v] = gossip_state(*programs[v]);
  for (NodeId v = 0; v < n; ++v)
    for (std::size_t i = 0; i < view.children[v].size(); ++i)
      for (std::size_t j = i + 1; j < view.children[v].size(); ++j) {
        NodeId a = view.children[v][i], b = view.children[v][j];
        if (st[a]->delay == st[b]->delay)
          mon.fail(inv.cor7, "cor7: siblings " + std::to_string(a) + "," + std::to_string(b));
      }
  auto classes = rooted_classes(view, labeling.psi.witness.color);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (st[u]->enc == st[v]->enc && classes[u] != classes[v])
        mon.fail(inv.lemma5, "lemma5: nodes " + std::to_string(u) + "," + std::to_string(v));
  return inv;
}

GossipRun run_gossip(const Graph& tree, const GossipRunOptions& opt) {
  GossipRun out;
  out.labeling = labeling_gossip(tree, opt.policy, opt.coordinator, opt.horizon);
  auto programs = make_programs(out.labeling, opt.policy, nullptr);
  RunOptions ro;
  ro.horizon = opt.horizon;
  ro.fast_forward = opt.fast_forward;
  ro.clock_offsets = opt.clock_offsets;
  ro.record_rounds = opt.record_rounds;
  for (const auto& l : out.labeling.labels) ro.labels.push_back(l.to_bits());
  std::optional<Monitor> mon;
  if (opt.check_invariants) {
    out.invariants.emplace();
    mon.emplace(tree, out.labeling.coordinator, *out.invariants);
    ro.observer = [&](Round round, ProgramView p) { (*mon)(round, p); };
  }
  out.trace = run(tree, programs, ro);
  out.root_progress = gossip_progress(*programs[out.labeling.coordinator]);
  out.solved = out.trace.status == RunStatus::Completed;
  for (const auto& k : out.trace.final_knowledge) out.solved = out.solved && k.size() == tree.node_count();
  if (opt.check_invariants) {
    auto fix = gossip_fixpoint_check(tree, out.labeling, opt.policy, opt.horizon);
    auto& inv = *out.invariants;
    inv.lemma4 = inv.lemma4 && fix.lemma4;
    inv.cor3 = inv.cor3 && fix.cor3;
    inv.prop3 = inv.prop3 && fix.prop3;
    inv.cor7 = fix.cor7;
    inv.lemma5 = fix.lemma5;
    inv.thm5 = fix.thm5;
    inv.checked_rounds += fix.checked_rounds;
    inv.stable_round = fix.stable_round;
    inv.settle_round = fix.settle_round;
    for (auto& v : fix.violations) inv.violations.push_back(v);
  }
  return out;
}

}  // namespace radiolab
