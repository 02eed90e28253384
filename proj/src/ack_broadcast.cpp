#include "radiolab/ack_broadcast.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <queue>

#include "radiolab/error.hpp"
#include "radiolab/graph_algorithms.hpp"

namespace radiolab {

std::string AckBits::bits() const {
  std::string s;
  s += join ? '1' : '0';
  s += stay ? '1' : '0';
  s += ack ? '1' : '0';
  return s;
}

std::string AckLabel::to_bits() const {
  std::string s = bits.bits();
  for (int b = static_cast<int>(colour_width) - 1; b >= 0; --b) s += ((colour >> b) & 1u) ? '1' : '0';
  return s;
}

std::vector<AckLabel> label_ack_tree(const Graph& tree, NodeId root) {
  if (!tree.is_tree()) throw PreconditionViolation("label_ack_tree: not a tree");
  if (tree.node_count() < 2) throw PreconditionViolation("label_ack_tree: need at least two nodes");
  auto t = root_tree(tree, root);
  NodeId z = root;
  for (NodeId v = 0; v < tree.node_count(); ++v)
    if (t.depth[v] == t.height) {
      z = v;
      break;
    }
  std::vector<AckLabel> out(tree.node_count());
  for (NodeId v = 0; v < tree.node_count(); ++v) out[v].bits.stay = !t.children[v].empty();
  out[root].bits = {true, true, true};
  out[z].bits = {false, false, true};
  return out;
}

namespace {

std::int64_t slot_of(std::int64_t s, std::uint32_t c) { return ((s - 1) % c) + 1; }

// First session round > s whose slot is col.
std::int64_t slot_after(std::int64_t s, std::uint32_t col, std::uint32_t c) {
  std::int64_t next = s + 1;
  std::int64_t wait = (static_cast<std::int64_t>(col) - slot_of(next, c) + c) % c;
  return next + wait;
}

}  // namespace

std::vector<std::int64_t> slot_flood_rounds(const Graph& g, NodeId root, const std::vector<std::uint32_t>& colour,
                                            std::uint32_t num_colours) {
  const std::size_t n = g.node_count();
  constexpr auto kInf = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> t(n, kInf);
  std::vector<char> done(n, 0);
  using Item = std::pair<std::int64_t, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  t[root] = 0;
  pq.emplace(0, root);
  while (!pq.empty()) {
    auto [tu, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    std::int64_t tx = slot_after(tu, colour[u], num_colours);
    for (NodeId w : g.neighbors(u))
      if (!done[w] && tx < t[w]) {
        t[w] = tx;
        pq.emplace(tx, w);
      }
  }
  return t;
}

std::vector<AckLabel> label_ack_general(const Graph& g, NodeId root) {
  if (g.node_count() < 2) throw PreconditionViolation("label_ack_general: need at least two nodes");
  if (root >= g.node_count()) throw PreconditionViolation("label_ack_general: root out of range");
  Coloring col = distance_two_coloring(g);
  std::uint32_t c = *std::max_element(col.color.begin(), col.color.end());
  std::uint32_t width = static_cast<std::uint32_t>(std::bit_width(c));
  std::uint32_t palette = (1u << width) - 1;
  auto t = slot_flood_rounds(g, root, col.color, palette);
  NodeId z = root == 0 ? 1 : 0;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (v != root && t[v] > t[z]) z = v;
  std::vector<AckLabel> out(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    out[v].colour = col.color[v];
    out[v].colour_width = width;
  }
  out[root].bits = {true, true, true};
  out[z].bits = {false, false, true};
  return out;
}

std::vector<AckLabel> label_ack(const Graph& g, NodeId root) {
  return g.is_tree() ? label_ack_tree(g, root) : label_ack_general(g, root);
}

std::int64_t sync_round_of(const AckLabel& label, const Message& m) {
  if (label.general()) return m.integer("round");
  return m.integer("hop") + 1;
}

// ---------------------------------------------------------------- session

BroadcastSession::BroadcastSession(const AckLabel& label, std::string kind, std::int64_t origin)
    : label_(label), kind_(std::move(kind)), origin_(origin) {}

void BroadcastSession::schedule(std::int64_t r, Message m) {
  auto it = std::lower_bound(pending_.begin(), pending_.end(), r,
                             [](const auto& p, std::int64_t x) { return p.first < x; });
  if (it != pending_.end() && it->first == r)
    throw std::logic_error("two transmissions scheduled for one round in session " + kind_);
  pending_.insert(it, {r, std::move(m)});
}

std::int64_t BroadcastSession::next_slot_after(std::int64_t r) const {
  return origin_ + slot_after(r - origin_, label_.colour, label_.num_colours());
}

void BroadcastSession::originate(const Message& payload) {
  payload_ = payload;
  payload_.tag = kind_;
  informed_round_ = origin_;
  Message out = payload_;
  if (label_.general()) {
    std::int64_t r = next_slot_after(origin_);
    out.set("path", IntList{label_.colour});
    out.set("round", r - origin_);
    schedule(r, std::move(out));
  } else {
    out.set("hop", std::int64_t{0});
    schedule(origin_ + 1, std::move(out));
  }
}

void BroadcastSession::schedule_ack(std::int64_t r, const Message& extra) {
  Message a = extra;
  a.tag = "ack";
  if (label_.general())
    a.set("path", path_);
  else
    a.set("depth", static_cast<std::int64_t>(depth_));
  schedule(r, std::move(a));
}

bool BroadcastSession::incoming(std::int64_t r, const Message& m) {
  if (m.tag == kind_) {
    if (informed_round_) return true;
    informed_round_ = r;
    payload_ = m;
    if (label_.general()) {
      path_ = m.ints("path");
      std::int64_t tx = next_slot_after(r);
      Message out = m;
      IntList p = path_;
      p.push_back(label_.colour);
      out.set("path", std::move(p));
      out.set("round", tx - origin_);
      schedule(tx, std::move(out));
    } else {
      depth_ = static_cast<std::uint32_t>(m.integer("hop") + 1);
      if (label_.relays()) {
        Message out = m;
        out.set("hop", static_cast<std::int64_t>(depth_));
        schedule(r + 1, std::move(out));
      }
    }
    return true;
  }
  if (m.tag != "ack") return false;
  if (!informed_round_) return true;
  if (label_.general()) {
    IntList p = m.ints("path");
    if (p.empty() || p.back() != label_.colour) return true;
    p.pop_back();
    if (p.empty()) {
      if (label_.is_root() && !ack_round_) {
        ack_round_ = r;
        ack_ = m;
      }
      return true;
    }
    Message fwd = m;
    fwd.set("path", std::move(p));
    schedule(r + 1, std::move(fwd));
    return true;
  }
  if (m.integer("depth") != static_cast<std::int64_t>(depth_) + 1) return true;
  if (label_.is_root()) {
    if (!ack_round_) {
      ack_round_ = r;
      ack_ = m;
    }
    return true;
  }
  Message fwd = m;
  fwd.set("depth", static_cast<std::int64_t>(depth_));
  schedule(r + 1, std::move(fwd));
  return true;
}

std::optional<Message> BroadcastSession::outgoing(std::int64_t r) const {
  for (const auto& [when, msg] : pending_)
    if (when == r) return msg;
  return std::nullopt;
}

std::optional<std::int64_t> BroadcastSession::next_transmission(std::int64_t r) const {
  for (const auto& [when, msg] : pending_)
    if (when >= r) return when;
  return std::nullopt;
}

// ---------------------------------------------------------------- bounded

BoundedBroadcast::BoundedBroadcast(const AckLabel& label, std::string kind, std::int64_t origin)
    : label_(label), origin_(origin), first_(label, std::move(kind), origin) {}

void BoundedBroadcast::originate(const Message& payload) { first_.originate(payload); }

bool BoundedBroadcast::incoming(std::int64_t r, const Message& m) {
  const std::string bound_kind = first_.kind() + "-bound";
  if (m.tag == bound_kind) {
    if (!second_) {
      m_ = m.integer("m");
      second_.emplace(label_, bound_kind, origin_ + 2 * *m_);
    }
    return second_->incoming(r, m);
  }
  bool was_informed = first_.informed();
  if (second_ && m.tag == "ack") return true;
  if (!first_.incoming(r, m)) return false;
  if (!was_informed && first_.informed() && label_.is_acknowledger()) {
    std::int64_t s = r - origin_;
    std::int64_t extra = label_.general() ? label_.num_colours() : 0;
    m_ = s + extra;
    first_.schedule_ack(origin_ + *m_ + 1, Message().set("m", *m_));
  }
  if (label_.is_root() && first_.ack_round() && !second_) {
    m_ = first_.ack_message().integer("m");
    second_.emplace(label_, bound_kind, origin_ + 2 * *m_);
    second_->originate(Message().set("m", *m_));
  }
  return true;
}

std::optional<Message> BoundedBroadcast::outgoing(std::int64_t r) const {
  if (auto o = first_.outgoing(r)) return o;
  if (second_) return second_->outgoing(r);
  return std::nullopt;
}

std::optional<std::int64_t> BoundedBroadcast::next_transmission(std::int64_t r) const {
  auto a = first_.next_transmission(r);
  auto b = second_ ? second_->next_transmission(r) : std::nullopt;
  if (a && b) return std::min(*a, *b);
  return a ? a : b;
}

std::optional<std::int64_t> BoundedBroadcast::done_round() const {
  if (!m_) return std::nullopt;
  return origin_ + 3 * *m_;
}

// ---------------------------------------------------------------- programs

namespace {

class BroadcastProgram : public NodeProgram {
 public:
  BroadcastProgram(const AckLabel& label, AckMode mode, Token token, std::int64_t m, bool designated)
      : label_(label), mode_(mode), m_(m), designated_(designated) {
    if (mode_ == AckMode::Bounded)
      bounded_.emplace(label_, "init", 0);
    else
      session_.emplace(label_, "bcast", 0);
    if (label_.is_root()) known_.insert(token);
  }

  Action act(LocalClock now) override {
    if (label_.is_root() && !offset_) {
      offset_ = 1 - now;
      Message payload;
      payload.set("msgs", known_);
      if (bounded_)
        bounded_->originate(payload);
      else
        session_->originate(payload);
    }
    if (!offset_) return Action::listen();
    std::int64_t r = now + *offset_;
    auto out = bounded_ ? bounded_->outgoing(r) : session_->outgoing(r);
    return out ? Action::send(std::move(*out)) : Action::listen();
  }

  void observe(LocalClock now, const Message* msg) override {
    if (!offset_ && msg) offset_ = sync_round_of(label_, *msg) - now;
    if (!offset_) return;
    std::int64_t r = now + *offset_;
    if (msg) {
      if (msg->has("msgs")) known_.merge(msg->tokens("msgs"));
      if (bounded_)
        bounded_->incoming(r, *msg);
      else
        session_->incoming(r, *msg);
    }
    if (session_ && session_->informed() && !ack_scheduled_) {
      if (mode_ == AckMode::AckDes && designated_ && !label_.is_root()) {
        session_->schedule_ack(m_ + 1, Message().set("msgs", known_));
        ack_scheduled_ = true;
      } else if (mode_ == AckMode::Ack && label_.is_acknowledger()) {
        std::int64_t extra = label_.general() ? label_.num_colours() : 0;
        session_->schedule_ack(session_->informed_round() + extra + 1, Message());
        ack_scheduled_ = true;
      }
    }
    if (bounded_ && bounded_->done_round() && r >= *bounded_->done_round()) done_ = true;
  }

  std::optional<LocalClock> next_wakeup(LocalClock now) const override {
    if (!offset_) {
      if (label_.is_root()) return now;
      return std::nullopt;
    }
    std::int64_t r = now + *offset_;
    auto next = bounded_ ? bounded_->next_transmission(r) : session_->next_transmission(r);
    if (bounded_ && bounded_->done_round() && *bounded_->done_round() >= r)
      next = next ? std::min(*next, *bounded_->done_round()) : *bounded_->done_round();
    if (!next) return std::nullopt;
    return *next - *offset_;
  }

  bool terminated() const override { return done_; }
  const TokenSet& knowledge() const override { return known_; }

  const BroadcastSession& session() const { return bounded_ ? bounded_->first() : *session_; }
  const std::optional<BoundedBroadcast>& bounded() const { return bounded_; }

 private:
  AckLabel label_;
  AckMode mode_;
  std::int64_t m_;
  bool designated_;
  std::optional<LocalClock> offset_;
  std::optional<BroadcastSession> session_;
  std::optional<BoundedBroadcast> bounded_;
  TokenSet known_;
  bool ack_scheduled_ = false;
  bool done_ = false;
};

}  // namespace

std::unique_ptr<NodeProgram> make_broadcast_program(const AckLabel& label, AckMode mode, Token token, std::int64_t m,
                                                    bool designated) {
  return std::make_unique<BroadcastProgram>(label, mode, token, m, designated);
}

BroadcastRun run_broadcast(const Graph& g, NodeId root, AckMode mode, const BroadcastOptions& opt) {
  BroadcastRun out;
  out.labels = opt.force_general ? label_ack_general(g, root) : label_ack(g, root);
  if (mode == AckMode::AckDes && opt.m < 1) throw PreconditionViolation("B_ack:des needs m >= 1");
  Programs programs;
  for (NodeId v = 0; v < g.node_count(); ++v)
    programs.push_back(make_broadcast_program(out.labels[v], mode, v, opt.m, opt.designated && *opt.designated == v));
  RunOptions ro;
  ro.horizon = opt.horizon;
  ro.fast_forward = opt.fast_forward;
  ro.clock_offsets = opt.clock_offsets;
  for (const auto& l : out.labels) ro.labels.push_back(l.to_bits());
  out.trace = run(g, programs, ro);

  auto& res = out.result;
  res.m = opt.m;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto& p = static_cast<const BroadcastProgram&>(*programs[v]);
    const auto& s = p.session();
    res.reception_round.push_back(s.informed() ? std::optional<std::int64_t>(s.informed_round()) : std::nullopt);
    if (v == root) {
      res.ack_round = s.ack_round();
      if (p.bounded() && p.bounded()->m()) {
        res.m = *p.bounded()->m();
        res.t_done = 3 * res.m;
      }
    }
  }
  for (const auto& t : out.trace.termination_round)
    res.termination_round.push_back(t ? std::optional<std::int64_t>(static_cast<std::int64_t>(*t)) : std::nullopt);
  return out;
}

}  // namespace radiolab
