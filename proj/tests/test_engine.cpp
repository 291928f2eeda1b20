#include <gtest/gtest.h>

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "advcongest/adversary.hpp"
#include "advcongest/engine.hpp"
#include "advcongest/protocols.hpp"

using namespace advcongest;

namespace {

struct Fixture {
  Graph g = make_circulant(12, {1, 2});
  std::uint32_t D = diameter(g);
};

RunResult run_bb1(const Graph& g, std::uint32_t D, AdversaryStrategy& adv, const EdgeSet& f, std::uint8_t m0 = 1,
                  EngineConfig cfg = {}) {
  cfg.record_transcript = true;
  auto p = bb1_known(g, 0, m0, D);
  return run(g, *p, adv, f, cfg, 17);
}

// Sends one oversized message per fault direction in every round it sees
// honest traffic there, plus one message on a direction outside F.
class Misbehaving : public AdversaryStrategy {
 public:
  std::string name() const override { return "misbehaving"; }
  void act(const AdversaryView& v, std::vector<Emission>& out) override {
    if (v.honest_on_faults.empty()) return;
    for (const auto& em : v.honest_on_faults) out.push_back({em.dir, Message::heard_edge(~0u, ~0u)});
    for (DirId d = 0; d < 2 * v.graph.m(); ++d)
      if (!v.faults.contains(d / 2)) {
        out.push_back({d, Message::accept(0)});
        break;
      }
  }
};

// Records what the adversary is shown.
class Observer : public AdversaryStrategy {
 public:
  std::string name() const override { return "observer"; }
  void act(const AdversaryView& v, std::vector<Emission>& out) override {
    for (const auto& em : v.honest_on_faults) {
      faults_only = faults_only && v.faults.contains(em.dir / 2);
      seen_same_round = true;
      out.push_back(em);
    }
    total_visible += v.honest.size();
  }
  bool faults_only = true;
  bool seen_same_round = false;
  std::uint64_t total_visible = 0;
};

// Every node sends `msg` on every incident direction in round 1, `copies`
// times per direction.
class Shout : public Protocol {
 public:
  Shout(const Graph& g, Message msg, int copies) : g_(g), msg_(msg), copies_(copies) {}
  std::string name() const override { return "shout"; }
  nlohmann::json public_params() const override { return nlohmann::json::object(); }
  void start(const RunContext&) override {}
  void emit(Round r, std::vector<Emission>& out) override {
    if (r != 1) return;
    for (NodeId v = 0; v < g_.n(); ++v)
      for (const auto& inc : g_.incident(v))
        for (int c = 0; c < copies_; ++c) out.push_back({g_.dir(inc.edge, v), msg_});
  }
  void deliver(Round, std::span<const Emission>) override { done_ = true; }
  Round next_active(Round) const override { return kNever; }
  bool finished() const override { return done_; }
  Round completion_round() const override { return 1; }
  Round horizon() const override { return 1; }
  PhaseInfo phase_at(Round) const override { return {}; }
  std::vector<NodeId> initiators() const override { return {0}; }
  void fill_report(RunReport& rep) const override { rep.outputs.assign(g_.n(), std::nullopt); }

 private:
  const Graph& g_;
  Message msg_;
  int copies_;
  bool done_ = false;
};

}  // namespace

TEST(Engine, FaultFreeDeliversWhatWasSent) {
  Fixture fx;
  auto adv = make_silent();
  auto r = run_bb1(fx.g, fx.D, *adv, {});
  ASSERT_FALSE(r.transcript.records.empty());
  for (const auto& rec : r.transcript.records) EXPECT_EQ(rec.sent, rec.delivered);
  EXPECT_TRUE(r.report.safety);
  EXPECT_TRUE(r.report.liveness);
}

TEST(Engine, Deterministic) {
  Fixture fx;
  auto a1 = make_forge_flood(0);
  auto a2 = make_forge_flood(0);
  EdgeSet f{3};
  auto x = run_bb1(fx.g, fx.D, *a1, f);
  auto y = run_bb1(fx.g, fx.D, *a2, f);
  EXPECT_EQ(x.transcript, y.transcript);
  EXPECT_EQ(to_json(x.report).dump(), to_json(y.report).dump());
  EXPECT_EQ(to_jsonl(x.transcript, fx.g), to_jsonl(y.transcript, fx.g));
}

TEST(Engine, IsolationOfHonestEdges) {
  Fixture fx;
  EdgeSet f{5};
  for (const auto& name : {"bit_flip", "forge_flood", "forge_accept"}) {
    auto adv = make_strategy(name, {{"bit", 0}}, fx.g, f);
    auto r = run_bb1(fx.g, fx.D, *adv, f);
    for (const auto& rec : r.transcript.records)
      if (!f.contains(rec.dir / 2)) ASSERT_EQ(rec.sent, rec.delivered) << name;
  }
}

TEST(Engine, SilentRemovesTheEdge) {
  Fixture fx;
  EdgeSet f{0};
  auto adv = make_silent();
  auto r = run_bb1(fx.g, fx.D, *adv, f);
  for (const auto& rec : r.transcript.records)
    if (f.contains(rec.dir / 2)) EXPECT_FALSE(rec.delivered.has_value());
  EXPECT_TRUE(r.report.liveness);
  EXPECT_EQ(r.report.adversary_messages, 0u);
}

TEST(Engine, EchoEqualsFaultFree) {
  Fixture fx;
  auto echo = make_echo();
  auto silent = make_silent();
  auto a = run_bb1(fx.g, fx.D, *echo, EdgeSet{4});
  auto b = run_bb1(fx.g, fx.D, *silent, {});
  EXPECT_EQ(a.report.outputs, b.report.outputs);
  EXPECT_EQ(a.report.rounds_used, b.report.rounds_used);
  auto key = [](const Transcript& t) {
    std::vector<std::tuple<Round, DirId, std::optional<Message>>> v;
    for (const auto& rec : t.records) v.emplace_back(rec.round, rec.dir, rec.delivered);
    std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
      return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
    });
    return v;
  };
  EXPECT_TRUE(key(a.transcript) == key(b.transcript));
}

TEST(Engine, AdversarySeesCurrentRound) {
  Fixture fx;
  Observer obs;
  auto r = run_bb1(fx.g, fx.D, obs, EdgeSet{2});
  EXPECT_TRUE(obs.faults_only);
  EXPECT_TRUE(obs.seen_same_round);
  EXPECT_EQ(obs.total_visible, r.report.honest_messages);
  EXPECT_TRUE(r.report.liveness);
}

TEST(Engine, AdversaryIsConfinedAndTruncated) {
  Fixture fx;
  Misbehaving adv;
  EdgeSet f{1};
  EngineConfig cfg;
  cfg.beta = 2;
  auto r = run_bb1(fx.g, fx.D, adv, f, 1, cfg);
  EXPECT_GT(r.report.adversary_dropped, 0u);
  EXPECT_GT(r.report.adversary_truncated, 0u);
  for (const auto& rec : r.transcript.records)
    if (!f.contains(rec.dir / 2)) ASSERT_EQ(rec.sent, rec.delivered);
  EXPECT_TRUE(r.report.safety);
}

TEST(Engine, HonestBandwidthViolationIsFatal) {
  Fixture fx;
  auto adv = make_silent();
  EngineConfig cfg;
  cfg.beta = 2;
  Shout big(fx.g, Message::heard_edge(1, 2), 1);
  EXPECT_THROW(run(fx.g, big, *adv, {}, cfg), ProtocolViolation);
  Shout twice(fx.g, Message::accept(1), 2);
  EXPECT_THROW(run(fx.g, twice, *adv, {}, {}), ProtocolViolation);
  Shout ok(fx.g, Message::accept(1), 1);
  EXPECT_NO_THROW(run(fx.g, ok, *adv, {}, cfg));
  // Local mode has no bandwidth limit.
  Shout local(fx.g, Message::heard_edge(1, 2), 3);
  EXPECT_NO_THROW(run_local_mode(fx.g, local, *adv, {}, cfg));
  // Protocols refuse parameters their messages cannot fit.
  cfg.beta = 1;
  EXPECT_THROW(run_bb1(fx.g, fx.D, *adv, {}, 1, cfg), std::invalid_argument);
}

TEST(Engine, TooManyFaultsRejected) {
  Fixture fx;
  auto adv = make_silent();
  EXPECT_THROW(run_bb1(fx.g, fx.D, *adv, EdgeSet{0, 1}), std::invalid_argument);
}

TEST(Engine, MaxRoundsCutsTheRun) {
  Fixture fx;
  auto adv = make_silent();
  EngineConfig cfg;
  cfg.max_rounds = 5;
  auto r = run_bb1(fx.g, fx.D, *adv, {}, 1, cfg);
  EXPECT_TRUE(r.report.horizon_exceeded);
  EXPECT_FALSE(r.report.liveness);
  EXPECT_TRUE(r.report.safety);
}

TEST(Engine, LocalModeMatchesCongestOutputs) {
  Graph g = make_circulant(16, {1, 2});
  const std::uint32_t D = diameter(g);
  const std::uint32_t L = 8 * D;
  auto fam = std::make_shared<const CoveringFamily>(build_sampled_family(g, L, 2, 3, {1.0, 2'000'000, 0.5}));
  auto adv = make_silent();
  auto p1 = bbt(g, fam, 0, 1, L, 1);
  auto congest = run(g, *p1, *adv, {}, {});
  auto p2 = bbt(g, fam, 0, 1, L, 1);
  auto local = run_local_mode(g, *p2, *adv, {}, {});
  EXPECT_EQ(congest.report.outputs, local.report.outputs);
  EXPECT_TRUE(local.report.liveness);
  EXPECT_LE(local.report.rounds_used, congest.report.rounds_used);
}

TEST(Transcript, JsonlRoundTrip) {
  Fixture fx;
  auto adv = make_bit_flip();
  auto r = run_bb1(fx.g, fx.D, *adv, EdgeSet{7});
  const auto text = to_jsonl(r.transcript, fx.g);
  EXPECT_EQ(transcript_from_jsonl(text, fx.g), r.transcript);
}

TEST(Message, EncodeDecode) {
  Encoding enc(64, 1000, 8);
  EXPECT_EQ(enc.node_bits(), 6u);
  EXPECT_EQ(enc.index_bits(), 10u);
  for (const auto& m : {Message::flood(1, 999), Message::accept(0), Message::header(1, 17),
                        Message::heard_edge(3, 63), Message::control(ControlKind::MT)}) {
    EXPECT_TRUE(enc.fits(m));
    EXPECT_EQ(enc.decode(enc.encode(m)), m);
    EXPECT_EQ(message_from_json(to_json(m)), m);
  }
  Encoding tight(64, 1000, 2);
  EXPECT_FALSE(tight.fits(Message::heard_edge(3, 63)));
  EXPECT_NE(tight.truncate(Message::heard_edge(3, 63)), Message::heard_edge(3, 63));
}
