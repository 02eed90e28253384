#include "radiolab/kb.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "radiolab/error.hpp"
#include "radiolab/graph_algorithms.hpp"

namespace radiolab {

namespace {

std::string binary(std::uint64_t v, std::size_t width = 0) {
  std::size_t w = std::max<std::size_t>(width, std::max<std::size_t>(1, std::bit_width(v)));
  std::string s(w, '0');
  for (std::size_t i = 0; i < w; ++i)
    if ((v >> i) & 1u) s[w - 1 - i] = '1';
  return s;
}

}  // namespace

std::uint64_t KBLabel::sched_value() const {
  std::uint64_t v = 0;
  for (char c : sched) v = (v << 1) | (c == '1' ? 1u : 0u);
  return v;
}

std::string KBLabel::to_bits() const {
  std::string s(1, strat ? '1' : '0');
  s += ack.bits.bits();
  s += sched;
  if (ack.general()) s += binary(ack.colour, ack.colour_width);
  return s;
}

KbLabeling labeling_kb(const Graph& g, std::span<const NodeId> sources, std::optional<NodeId> coordinator) {
  const std::size_t n = g.node_count();
  const std::size_t k = sources.size();
  if (n < 2) throw PreconditionViolation("labeling_kb: need at least two nodes");
  if (k == 0 || k > n) throw PreconditionViolation("labeling_kb: need 1 <= k <= n sources");
  std::set<NodeId> src(sources.begin(), sources.end());
  if (src.size() != k || *src.rbegin() >= n) throw PreconditionViolation("labeling_kb: sources must be distinct nodes");

  KbLabeling out;
  out.sources.assign(sources.begin(), sources.end());
  NodeId r = coordinator.value_or(0);
  if (r >= n) throw PreconditionViolation("labeling_kb: coordinator out of range");
  if (src.count(r) && k < n) {
    r = 0;
    while (src.count(r)) ++r;
  }
  out.coordinator = r;

  auto ack = label_ack(g, r);
  Coloring col = distance_two_coloring(g);
  out.colour_count = *std::max_element(col.color.begin(), col.color.end());
  const bool strat = k > g.max_degree();
  const std::size_t width = static_cast<std::size_t>(std::bit_width(out.colour_count));
  out.labels.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    auto& l = out.labels[v];
    l.strat = strat;
    l.ack = ack[v];
    l.sched = strat ? binary(col.color[v], width) : "0";
  }
  if (!strat)
    for (std::size_t i = 0; i < k; ++i) out.labels[sources[i]].sched = binary(i + 1);
  for (const auto& l : out.labels) out.max_label_bits = std::max(out.max_label_bits, l.to_bits().size());
  out.formula_bits = kb_label_length_formula(g, k, out.colour_count);
  return out;
}

std::size_t kb_label_length_formula(const Graph& g, std::size_t k, std::uint32_t colour_count) {
  std::size_t cw = static_cast<std::size_t>(std::bit_width(colour_count));
  std::size_t bits = k <= g.max_degree() ? 4 + static_cast<std::size_t>(std::bit_width(k)) : 4 + cw;
  if (!g.is_tree()) bits += cw;
  return bits;
}

std::size_t kb_tree_length_bound(std::size_t k, std::size_t max_degree) {
  return 4 + 2 * static_cast<std::size_t>(std::min(std::bit_width(k), std::bit_width(max_degree)));
}

namespace {

class KbProgram : public NodeProgram {
 public:
  KbProgram(const KBLabel& label, std::optional<Token> source)
      : label_(label), token_(source), init_(label.ack, "init", 0) {
    if (source) known_.insert(*source);
    if (label_.strat) palette_ = (std::uint64_t{1} << label_.sched.size()) - 1;
  }

  Action act(LocalClock now) override {
    if (root() && !offset_) {
      offset_ = 1 - now;
      init_.originate(Message());
    }
    if (!offset_) return Action::listen();
    const std::int64_t r = now + *offset_;
    advance(r);
    auto out = outgoing(r);
    return out ? Action::send(std::move(*out)) : Action::listen();
  }

  void observe(LocalClock now, const Message* msg) override {
    if (!offset_ && msg) offset_ = sync_round_of(label_.ack, *msg) - now;
    if (!offset_) return;
    const std::int64_t r = now + *offset_;
    advance(r);
    if (msg) handle(r, *msg);
    if (inform_ && inform_->done_round() && r >= *inform_->done_round()) {
      progress_.inform_done = inform_->done_round();
      done_ = true;
    }
  }

  std::optional<LocalClock> next_wakeup(LocalClock now) const override {
    if (!offset_) return root() ? std::optional<LocalClock>(now) : std::nullopt;
    const std::int64_t r = now + *offset_;
    std::optional<std::int64_t> best;
    auto consider = [&](std::optional<std::int64_t> c) {
      if (c && *c >= r && (!best || *c < *best)) best = c;
    };
    consider(init_.next_transmission(r));
    const auto m = progress_.m;
    const auto& agg_end = progress_.aggregate_end;
    if (m) {
      if (!label_.strat) {
        if (phase_) consider(phase_->next_transmission(r));
        if (root() && !agg_end) {
          if (r > 3 * *m && phase_index(r) != current_phase_) return now;
          consider(3 * *m + 2 * *m * current_phase_ + 1);
        }
      } else if (agg_end && r <= *agg_end) {
        const std::int64_t a = std::max<std::int64_t>(r - 3 * *m, 1);
        const std::int64_t slot = ((a - 1) % static_cast<std::int64_t>(palette_)) + 1;
        const std::int64_t want = static_cast<std::int64_t>(label_.sched_value());
        std::int64_t next = a + (want - slot + static_cast<std::int64_t>(palette_)) % static_cast<std::int64_t>(palette_);
        if (3 * *m + next <= *agg_end) consider(3 * *m + next);
      }
      if (agg_end && root() && !inform_) consider(*agg_end + 1);
    }
    if (inform_) {
      consider(inform_->next_transmission(r));
      consider(inform_->done_round());
    }
    if (!best) return std::nullopt;
    return *best - *offset_;
  }

  bool terminated() const override { return done_; }
  const TokenSet& knowledge() const override { return known_; }
  const KbProgress& progress() const { return progress_; }

 private:
  bool root() const { return label_.ack.is_root(); }

  std::int64_t phase_origin(std::int64_t p) const { return 3 * *progress_.m + (p - 1) * 2 * *progress_.m; }
  std::int64_t phase_index(std::int64_t r) const { return (r - 3 * *progress_.m - 1) / (2 * *progress_.m) + 1; }

  // Applies the time-driven transitions up to round r. Idempotent, so it does
  // not matter whether rounds in between were executed.
  void advance(std::int64_t r) {
    if (!progress_.m && init_.m()) {
      progress_.m = init_.m();
      if (label_.strat) progress_.aggregate_end = 3 * *progress_.m + *progress_.m * static_cast<std::int64_t>(palette_);
    }
    if (!progress_.m) return;
    const std::int64_t m = *progress_.m;
    if (!label_.strat && r > 3 * m) {
      const std::int64_t p = phase_index(r);
      while (current_phase_ < p && !(progress_.aggregate_end && r > *progress_.aggregate_end)) {
        if (current_phase_ > 0) close_phase();
        if (progress_.aggregate_end) break;
        ++current_phase_;
        open_phase();
      }
    }
    if (progress_.aggregate_end && r > *progress_.aggregate_end && !inform_) {
      inform_.emplace(label_.ack, "inform", *progress_.aggregate_end);
      if (root()) inform_->originate(Message().set("msgs", known_));
    }
  }

  void open_phase() {
    phase_.reset();
    heard_ = false;
    acted_ = false;
    if (!root()) return;
    progress_.phases = current_phase_;
    const std::int64_t o = phase_origin(current_phase_);
    if (done_phase_ && *done_phase_ == current_phase_) {
      phase_.emplace(label_.ack, "done", o);
      phase_->originate(Message());
    } else {
      phase_.emplace(label_.ack, "phase", o);
      phase_->originate(Message().set("i", current_phase_));
      // The coordinator is source i itself: nothing to route.
      if (token_ && static_cast<std::int64_t>(label_.sched_value()) == current_phase_) heard_ = true;
    }
  }

  void close_phase() {
    if (!root()) return;
    if (done_phase_ && *done_phase_ == current_phase_) {
      progress_.aggregate_end = phase_origin(current_phase_) + 2 * *progress_.m;
      return;
    }
    if (!heard_ && !done_phase_) {
      progress_.silent_phases.push_back(current_phase_);
      done_phase_ = current_phase_ + 1;
    }
  }

  void handle(std::int64_t r, const Message& msg) {
    const auto m = progress_.m;
    if (!m || r <= 3 * *m) {
      init_.incoming(r, msg);
      return;
    }
    if (!progress_.aggregate_end || r <= *progress_.aggregate_end) {
      if (label_.strat) {
        if (msg.tag == "collect") known_.merge(msg.tokens("msgs"));
        return;
      }
      const std::int64_t o = phase_origin(current_phase_);
      if (root() && r > o + *m && r <= o + 2 * *m) heard_ = true;
      if (!phase_ && (msg.tag == "phase" || msg.tag == "done")) phase_.emplace(label_.ack, msg.tag, o);
      if (!phase_) return;
      phase_->incoming(r, msg);
      if (root()) {
        if (phase_->ack_round() && phase_->ack_message().has("mu")) known_.merge(phase_->ack_message().tokens("mu"));
        return;
      }
      if (acted_ || !phase_->informed()) return;
      acted_ = true;
      if (phase_->kind() == "phase") {
        if (token_ && static_cast<std::int64_t>(label_.sched_value()) == phase_->payload().integer("i"))
          phase_->schedule_ack(o + *m + 1, Message().set("mu", TokenSet{*token_}));
      } else {
        progress_.aggregate_end = o + 2 * *m;
        if (label_.ack.is_acknowledger()) {
          std::int64_t extra = label_.ack.general() ? label_.ack.num_colours() : 0;
          phase_->schedule_ack(phase_->informed_round() + extra + 1, Message());
        }
      }
      return;
    }
    if (!inform_) return;
    if (msg.tag == "inform" && msg.has("msgs")) known_.merge(msg.tokens("msgs"));
    inform_->incoming(r, msg);
  }

  std::optional<Message> outgoing(std::int64_t r) const {
    const auto m = progress_.m;
    if (!m || r <= 3 * *m) return init_.outgoing(r);
    if (!progress_.aggregate_end || r <= *progress_.aggregate_end) {
      if (!label_.strat) return phase_ ? phase_->outgoing(r) : std::nullopt;
      const std::int64_t a = r - 3 * *m;
      if (static_cast<std::uint64_t>((a - 1) % static_cast<std::int64_t>(palette_)) + 1 != label_.sched_value())
        return std::nullopt;
      return Message("collect").set("msgs", known_);
    }
    return inform_ ? inform_->outgoing(r) : std::nullopt;
  }

  KBLabel label_;
  std::optional<Token> token_;
  std::uint64_t palette_ = 0;
  std::optional<LocalClock> offset_;
  TokenSet known_;
  BoundedBroadcast init_;
  std::optional<BroadcastSession> phase_;
  std::int64_t current_phase_ = 0;
  std::optional<std::int64_t> done_phase_;
  bool heard_ = false;
  bool acted_ = false;
  std::optional<BoundedBroadcast> inform_;
  KbProgress progress_;
  bool done_ = false;
};

}  // namespace

std::unique_ptr<NodeProgram> kb_program(const KBLabel& label, std::optional<Token> source) {
  return std::make_unique<KbProgram>(label, source);
}

const KbProgress& kb_progress(const NodeProgram& p) {
  auto* k = dynamic_cast<const KbProgram*>(&p);
  if (!k) throw PreconditionViolation("kb_progress: not a KB program");
  return k->progress();
}

KbRun run_kb(const Graph& g, std::span<const NodeId> sources, const KbRunOptions& opt) {
  KbRun out;
  out.labeling = labeling_kb(g, sources, opt.coordinator);
  std::set<NodeId> src(sources.begin(), sources.end());
  Programs programs;
  for (NodeId v = 0; v < g.node_count(); ++v)
    programs.push_back(kb_program(out.labeling.labels[v], src.count(v) ? std::optional<Token>(v) : std::nullopt));
  RunOptions ro;
  ro.horizon = opt.horizon;
  ro.fast_forward = opt.fast_forward;
  ro.clock_offsets = opt.clock_offsets;
  ro.record_rounds = opt.record_rounds;
  for (const auto& l : out.labeling.labels) ro.labels.push_back(l.to_bits());
  out.trace = run(g, programs, ro);
  out.root_progress = kb_progress(*programs[out.labeling.coordinator]);
  return out;
}

}  // namespace radiolab
