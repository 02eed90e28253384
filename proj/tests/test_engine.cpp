#include <doctest.h>

#include <set>

#include "radiolab/engine.hpp"
#include "radiolab/error.hpp"
#include "radiolab/random.hpp"

using namespace radiolab;

namespace {

// Reference reception rule: count transmitting neighbours directly.
std::vector<MessagePtr> reference_step(const Graph& g, const std::vector<Action>& a) {
  std::vector<MessagePtr> out(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (a[v].transmits()) continue;
    int count = 0;
    MessagePtr m;
    for (NodeId u = 0; u < g.node_count(); ++u)
      if (g.adjacent(u, v) && a[u].transmits()) {
        ++count;
        m = a[u].transmit;
      }
    if (count == 1) out[v] = m;
  }
  return out;
}

// Sends its knowledge at a fixed set of clock values, and `lag` rounds after
// each reception that taught it something. Stops after `life` rounds.
class Chatter : public NodeProgram {
 public:
  Chatter(std::set<LocalClock> plan, LocalClock lag, LocalClock life, std::optional<Token> t)
      : plan_(std::move(plan)), lag_(lag), life_(life) {
    if (t) known_.insert(*t);
  }
  Action act(LocalClock now) override {
    if (plan_.count(now) && !known_.empty()) return Action::send(Message("chat").set("k", known_));
    return Action::listen();
  }
  void observe(LocalClock now, const Message* m) override {
    if (m && known_.merge(m->tokens("k")) > 0) plan_.insert(now + lag_);
    if (now >= life_) done_ = true;
  }
  std::optional<LocalClock> next_wakeup(LocalClock now) const override {
    auto it = plan_.lower_bound(now);
    LocalClock w = it == plan_.end() ? life_ : std::min(*it, life_);
    return std::max(w, now);
  }
  bool terminated() const override { return done_; }
  const TokenSet& knowledge() const override { return known_; }

 private:
  std::set<LocalClock> plan_;
  LocalClock lag_, life_;
  TokenSet known_;
  bool done_ = false;
};

Programs chatter_programs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Programs p;
  for (NodeId v = 0; v < n; ++v) {
    std::set<LocalClock> plan;
    for (int i = 0; i < 3; ++i) plan.insert(1 + static_cast<LocalClock>(rng.below(200)));
    std::optional<Token> t;
    if (rng.below(2)) t = v;
    p.push_back(std::make_unique<Chatter>(plan, 1 + rng.below(7), 300 + rng.below(100), t));
  }
  return p;
}

}  // namespace

TEST_CASE("step follows the single-transmitter rule") {
  Rng rng(3);
  for (int it = 0; it < 200; ++it) {
    Graph g = random_connected_graph(9, rng.below(12), it);
    std::vector<Action> a(9);
    for (NodeId v = 0; v < 9; ++v)
      if (rng.below(3) == 0) a[v] = Action::send(Message("m").set("from", std::int64_t{v}));
    auto got = step(g, a);
    auto expect = reference_step(g, a);
    for (NodeId v = 0; v < 9; ++v) CHECK(got[v].received == expect[v]);
  }
}

TEST_CASE("transmitters hear nothing and collisions are silent") {
  Graph g = path_graph(3);
  std::vector<Action> a = {Action::send(Message("a")), Action::listen(), Action::send(Message("b"))};
  auto out = step(g, a);
  CHECK(out[0].received == nullptr);
  CHECK(out[1].received == nullptr);  // collision, no detection
  CHECK(out[2].received == nullptr);
}

TEST_CASE("fast-forward matches naive execution") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Graph g = random_connected_graph(10, seed % 6, seed);
    Rng rng(seed * 7);
    std::vector<LocalClock> offsets(10);
    for (auto& o : offsets) o = static_cast<LocalClock>(rng.below(20)) - 10;
    RunOptions opt;
    opt.horizon = 600;
    opt.clock_offsets = offsets;
    auto pf = chatter_programs(10, seed);
    auto pn = chatter_programs(10, seed);
    opt.fast_forward = true;
    Trace ff = run(g, pf, opt);
    opt.fast_forward = false;
    Trace naive = run(g, pn, opt);
    CHECK(same_execution(ff, naive));
    CHECK(ff.metrics.transmissions == naive.metrics.transmissions);
    CHECK(ff.metrics.executed_rounds <= naive.metrics.executed_rounds);
    CHECK(ff.status == RunStatus::Completed);
  }
}

TEST_CASE("runs are deterministic") {
  Graph g = random_connected_graph(12, 5, 9);
  auto a = chatter_programs(12, 4);
  auto b = chatter_programs(12, 4);
  Trace ta = run(g, a, {});
  Trace tb = run(g, b, {});
  CHECK(same_execution(ta, tb));
  CHECK(ta.metrics == tb.metrics);
}

TEST_CASE("horizon and stop") {
  Graph g = path_graph(4);
  RunOptions opt;
  opt.horizon = 50;
  auto p = chatter_programs(4, 2);
  Trace t = run(g, p, opt);
  CHECK(t.status == RunStatus::HorizonReached);
  CHECK(t.final_round == 50);

  auto q = chatter_programs(4, 2);
  opt.horizon = 1000;
  opt.stop = [](Round r, ProgramView) { return r >= 17; };
  opt.fast_forward = false;
  Trace s = run(g, q, opt);
  CHECK(s.status == RunStatus::Stopped);
  CHECK(s.final_round == 17);

  CHECK_THROWS_AS(run(g, q, RunOptions{.horizon = 0}), PreconditionViolation);
}

TEST_CASE("knowledge log and sparse trace") {
  Graph g = path_graph(5);
  auto p = chatter_programs(5, 8);
  Trace t = run(g, p, {});
  for (const auto& r : t.rounds) CHECK_FALSE(r.transmissions.empty());
  for (NodeId v = 0; v < 5; ++v) {
    REQUIRE_FALSE(t.knowledge_log[v].empty());
    CHECK(t.knowledge_log[v].front().first == 0);
    CHECK(t.knowledge_log[v].back().second == t.final_knowledge[v]);
  }
}

TEST_CASE("histories") {
  // Two leaves of a star with equal labels and equal programs see the same thing.
  Graph g = star_graph(2);
  Programs p;
  p.push_back(std::make_unique<Chatter>(std::set<LocalClock>{3, 5}, 2, 20, Token{0}));
  p.push_back(std::make_unique<Chatter>(std::set<LocalClock>{}, 2, 20, std::nullopt));
  p.push_back(std::make_unique<Chatter>(std::set<LocalClock>{}, 2, 20, std::nullopt));
  RunOptions opt;
  opt.labels = {"h", "x", "x"};
  Trace t = run(g, p, opt);
  CHECK(histories_equal(t, 1, 2, 20));
  CHECK_FALSE(histories_equal(t, 0, 1, 20));
}

TEST_CASE("message serialization round trip") {
  Message m("probe");
  m.set("i", std::int64_t{-42})
      .set("b", true)
      .set("s", std::string("hello world"))
      .set("k", TokenSet{5, 1, 3})
      .set("l", IntList{1, -2, 3})
      .set("e", Encoding(mpz_class("22888183593750")));
  Message back = deserialize(serialize(m));
  CHECK(back == m);
  CHECK(back.tokens("k").items() == std::vector<Token>{1, 3, 5});
  CHECK(map_tokens(m, [](Token t) { return t + 1; }).tokens("k") == TokenSet{2, 4, 6});
}
