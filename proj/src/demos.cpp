#include "radiolab/demos.hpp"

#include <algorithm>
#include <bit>

#include "radiolab/error.hpp"
#include "radiolab/graph_algorithms.hpp"

namespace radiolab {

std::string to_string(DemoProgram p) {
  switch (p) {
    case DemoProgram::RoundRobinByLabel: return "round-robin";
    case DemoProgram::FloodOnReceive: return "flood";
    case DemoProgram::AllTransmit: return "all-transmit";
  }
  return "?";
}

std::optional<DemoProgram> demo_program_from_string(const std::string& s) {
  for (auto p : all_demo_programs())
    if (to_string(p) == s) return p;
  return std::nullopt;
}

const std::vector<DemoProgram>& all_demo_programs() {
  static const std::vector<DemoProgram> all = {DemoProgram::RoundRobinByLabel, DemoProgram::FloodOnReceive,
                                               DemoProgram::AllTransmit};
  return all;
}

namespace {

std::uint64_t label_value(const std::string& label) {
  std::uint64_t v = 0;
  for (char c : label) v = (v << 1) | (c == '1' ? 1u : 0u);
  return v;
}

std::string binary(std::uint64_t v) {
  std::string s;
  for (int i = std::bit_width(v) - 1; i >= 0; --i) s += ((v >> i) & 1u) ? '1' : '0';
  return s.empty() ? "0" : s;
}

class DemoNode : public NodeProgram {
 public:
  DemoNode(DemoProgram kind, const std::string& label, std::optional<Token> token, std::uint64_t period)
      : kind_(kind), slot_(label_value(label) % period), period_(period) {
    if (token) known_.insert(*token);
    if (kind_ == DemoProgram::FloodOnReceive && token) send_at_ = static_cast<LocalClock>(slot_ + 1);
  }

  Action act(LocalClock now) override {
    if (transmits_at(now)) return Action::send(Message("demo").set("msgs", known_));
    return Action::listen();
  }

  void observe(LocalClock now, const Message* m) override {
    if (!m || !m->has("msgs")) return;
    if (known_.merge(m->tokens("msgs")) > 0 && kind_ == DemoProgram::FloodOnReceive) send_at_ = now + 1;
  }

  std::optional<LocalClock> next_wakeup(LocalClock now) const override {
    switch (kind_) {
      case DemoProgram::AllTransmit: return known_.empty() ? std::nullopt : std::optional<LocalClock>(now);
      case DemoProgram::FloodOnReceive:
        if (send_at_ && *send_at_ >= now) return send_at_;
        return std::nullopt;
      case DemoProgram::RoundRobinByLabel: {
        if (known_.empty()) return std::nullopt;
        const auto p = static_cast<LocalClock>(period_);
        LocalClock base = std::max<LocalClock>(now, 1);
        LocalClock r = ((base % p) + p) % p;
        return base + ((static_cast<LocalClock>(slot_) - r) % p + p) % p;
      }
    }
    return now;
  }

  const TokenSet& knowledge() const override { return known_; }

 private:
  bool transmits_at(LocalClock now) const {
    switch (kind_) {
      case DemoProgram::AllTransmit: return !known_.empty();
      case DemoProgram::FloodOnReceive: return send_at_ && *send_at_ == now;
      case DemoProgram::RoundRobinByLabel:
        return !known_.empty() && now >= 1 &&
               static_cast<std::uint64_t>(now) % period_ == slot_;
    }
    return false;
  }

  DemoProgram kind_;
  std::uint64_t slot_;
  std::uint64_t period_;
  TokenSet known_;
  std::optional<LocalClock> send_at_;
};

Trace run_demo(const Graph& g, const std::vector<std::string>& labels, const std::vector<std::optional<Token>>& tokens,
               DemoProgram program, Round horizon) {
  std::uint64_t period = 1;
  for (const auto& l : labels) period = std::max(period, label_value(l) + 1);
  Programs programs;
  for (NodeId v = 0; v < g.node_count(); ++v) programs.push_back(make_demo_program(program, labels[v], tokens[v], period));
  RunOptions ro;
  ro.horizon = horizon;
  ro.labels = labels;
  // Demo programs never terminate, so run to the horizon.
  return run(g, programs, ro);
}

std::uint64_t collisions_in(const Trace& t) { return t.metrics.collisions; }

}  // namespace

std::unique_ptr<NodeProgram> make_demo_program(DemoProgram kind, const std::string& label, std::optional<Token> token,
                                               std::uint64_t period) {
  if (period == 0) throw PreconditionViolation("make_demo_program: period must be positive");
  return std::make_unique<DemoNode>(kind, label, token, period);
}

DemoEvidence demo_duplicate_labels_kn(std::size_t n, std::size_t k, DemoProgram program, Round horizon) {
  if (n < 3 || k < 2 || k > n) throw PreconditionViolation("demo_duplicate_labels_kn: need n >= 3, 2 <= k <= n");
  Graph g = complete_graph(n);
  std::vector<std::string> labels(n);
  std::vector<std::optional<Token>> tokens(n);
  for (NodeId v = 0; v < n; ++v) {
    labels[v] = binary(v);
    if (v < k) tokens[v] = v;
  }
  labels[1] = labels[0];
  Trace t = run_demo(g, labels, tokens, program, horizon);

  DemoEvidence ev;
  ev.name = "duplicate-labels-K" + std::to_string(n);
  ev.program = to_string(program);
  ev.horizon = horizon;
  ev.nodes = n;
  ev.collisions = collisions_in(t);
  ev.pairs_checked = 1;
  if (!histories_equal(t, 0, 1, static_cast<LocalClock>(horizon))) ++ev.history_mismatches;
  for (const auto& rec : t.rounds)
    for (const auto& rx : rec.receptions)
      if (rx.message->has("msgs") && rx.message->tokens("msgs").contains(0)) ++ev.forbidden_deliveries;
  for (NodeId v = 1; v < n; ++v)
    if (t.final_knowledge[v].contains(0)) ++ev.forbidden_deliveries;
  ev.notes.push_back("sources 0 and 1 share label " + labels[0]);
  return ev;
}

DemoEvidence demo_cycle4_identical(DemoProgram program, Round horizon) {
  Graph g = cycle_graph(4);
  std::vector<std::string> labels(4, "1");
  std::vector<std::optional<Token>> tokens(4);
  tokens[0] = 0;
  Trace t = run_demo(g, labels, tokens, program, horizon);
  DemoEvidence ev;
  ev.name = "cycle4-identical-labels";
  ev.program = to_string(program);
  ev.horizon = horizon;
  ev.nodes = 4;
  ev.collisions = collisions_in(t);
  ev.pairs_checked = 1;
  if (!histories_equal(t, 1, 3, static_cast<LocalClock>(horizon))) ++ev.history_mismatches;
  for (const auto& rec : t.rounds)
    for (const auto& rx : rec.receptions)
      if (rx.node == 2 && rx.message->has("msgs") && rx.message->tokens("msgs").contains(0)) ++ev.forbidden_deliveries;
  if (t.final_knowledge[2].contains(0)) ++ev.forbidden_deliveries;
  return ev;
}

std::optional<Permutation> preserved_automorphism(const Graph& tree, const Coloring& coloring) {
  for (const auto& p : enumerate_automorphisms(tree)) {
    if (is_identity(p)) continue;
    bool keeps = true;
    for (NodeId v = 0; v < tree.node_count() && keeps; ++v) keeps = coloring.color[p[v]] == coloring.color[v];
    if (keeps) return p;
  }
  return std::nullopt;
}

DemoEvidence demo_automorphism_histories(const Graph& tree, const Coloring& coloring, const Permutation& phi,
                                         DemoProgram program, Round horizon) {
  const std::size_t n = tree.node_count();
  if (!tree.is_tree()) throw PreconditionViolation("demo_automorphism_histories: graph is not a tree");
  if (coloring.color.size() != n || phi.size() != n || !is_automorphism(tree, phi) || is_identity(phi))
    throw PreconditionViolation("demo_automorphism_histories: phi is not a non-trivial automorphism");
  for (NodeId v = 0; v < n; ++v)
    if (coloring.color[phi[v]] != coloring.color[v])
      throw PreconditionViolation("demo_automorphism_histories: phi does not preserve the coloring");

  std::vector<std::string> labels(n);
  std::vector<std::optional<Token>> tokens(n);
  for (NodeId v = 0; v < n; ++v) {
    labels[v] = binary(coloring.color[v]);
    tokens[v] = v;
  }
  Trace t = run_demo(tree, labels, tokens, program, horizon);

  DemoEvidence ev;
  ev.name = "automorphism-histories";
  ev.program = to_string(program);
  ev.horizon = horizon;
  ev.nodes = n;
  ev.collisions = collisions_in(t);
  auto f = [&](Token tok) { return static_cast<Token>(phi[tok]); };
  for (NodeId x = 0; x < n; ++x) {
    ++ev.pairs_checked;
    if (!histories_equal_mod(t, x, phi[x], static_cast<LocalClock>(horizon), f)) ++ev.history_mismatches;
  }

  // Receptions a -> b that the midpoint argument rules out.
  auto heard = [&](NodeId at, NodeId from) {
    std::uint64_t c = 0;
    for (const auto& rec : t.rounds)
      for (const auto& rx : rec.receptions)
        if (rx.node == at && rx.from == from) ++c;
    return c;
  };
  for (NodeId x = 0; x < n; ++x) {
    if (phi[x] == x) continue;
    auto path = tree_path(tree, x, phi[x]);
    const std::size_t len = path.size() - 1;
    std::uint64_t bad = 0;
    std::string where;
    if (len % 2 == 1) {
      NodeId a = path[(len - 1) / 2], b = path[(len + 1) / 2];
      bad = heard(a, b) + heard(b, a);
      where = "edge " + std::to_string(a) + "-" + std::to_string(b);
    } else {
      NodeId c = path[len / 2], u = path[len / 2 - 1], w = path[len / 2 + 1];
      bad = heard(c, u) + heard(c, w);
      where = "node " + std::to_string(c);
    }
    if (t.final_knowledge[phi[x]].contains(x)) ++bad;
    ev.forbidden_deliveries += bad;
    if (ev.notes.size() < 8) ev.notes.push_back("x=" + std::to_string(x) + " phi(x)=" + std::to_string(phi[x]) + " " + where);
  }
  return ev;
}

}  // namespace radiolab
