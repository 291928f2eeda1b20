#include "advcongest/engine.hpp"

#include <algorithm>

#include "advcongest/rng.hpp"

namespace advcongest {

std::string to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::idle: return "idle";
    case PhaseKind::flood: return "flood";
    case PhaseKind::accept: return "accept";
    case PhaseKind::heard: return "heard";
    case PhaseKind::control: return "control";
  }
  return "idle";
}

std::uint32_t RunContext::bandwidth_bits() const {
  return config_->beta * ceil_log2_at_least1(graph_->n());
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["protocol"] = r.protocol;
  auto& outs = j["outputs"] = nlohmann::json::array();
  for (const auto& o : r.outputs) outs.push_back(o ? nlohmann::json(*o) : nlohmann::json(nullptr));
  j["expected"] = r.expected ? nlohmann::json(*r.expected) : nlohmann::json(nullptr);
  j["rounds_used"] = r.rounds_used;
  auto& ph = j["phases"] = nlohmann::json::array();
  for (const auto& p : r.phases) ph.push_back({{"name", p.name}, {"rounds", p.rounds}});
  j["width"] = r.width;
  j["ell"] = r.ell;
  j["verdicts"] = {{"safety", r.safety}, {"liveness", r.liveness}};
  j["horizon_exceeded"] = r.horizon_exceeded;
  j["diameter_estimate"] = r.diameter_estimate ? nlohmann::json(*r.diameter_estimate) : nlohmann::json(nullptr);
  j["messages"] = {{"honest", r.honest_messages},
                   {"adversary", r.adversary_messages},
                   {"adversary_dropped", r.adversary_dropped},
                   {"adversary_truncated", r.adversary_truncated}};
  if (!r.queue_delay.empty()) {
    std::uint64_t worst = 0;
    for (const auto& q : r.queue_delay) worst = std::max(worst, q.delay);
    j["queue_delay"] = {{"records", r.queue_delay.size()}, {"max_delay", worst}};
  }
  j["details"] = r.details;
  return j;
}

namespace {

constexpr std::uint32_t kNoSlot = ~std::uint32_t{0};

// Orders deliveries by direction, keeping the emission order among equal
// directions. Outside LOCAL mode every direction occurs at most once, so a
// dense scan over the direction slots does the job when the round is busy.
void sort_by_dir(std::vector<Emission>& v, std::vector<Emission>& scratch, std::vector<std::uint32_t>& slot,
                 bool local_mode) {
  auto by_dir = [](const Emission& a, const Emission& b) { return a.dir < b.dir; };
  if (std::is_sorted(v.begin(), v.end(), by_dir)) return;
  if (local_mode) {
    std::stable_sort(v.begin(), v.end(), by_dir);
    return;
  }
  if (v.size() * 16 < slot.size()) {
    std::sort(v.begin(), v.end(), by_dir);
    return;
  }
  for (std::uint32_t i = 0; i < v.size(); ++i) slot[v[i].dir] = i;
  scratch.clear();
  for (auto& s : slot)
    if (s != kNoSlot) {
      scratch.push_back(std::move(v[s]));
      s = kNoSlot;
    }
  v.swap(scratch);
}

}  // namespace

Engine::Engine(const Graph& g, EngineConfig cfg, std::uint64_t seed) : g_(g), cfg_(cfg), seed_(seed) {}

RunResult Engine::run(Protocol& protocol, AdversaryStrategy& adversary, const EdgeSet& faults) {
  if (faults.size() > cfg_.t) throw std::invalid_argument("more adversarial edges than t");
  for (auto e : faults)
    if (e >= g_.m()) throw std::invalid_argument("adversarial edge id out of range");

  RunContext ctx;
  ctx.graph_ = &g_;
  ctx.config_ = &cfg_;
  ctx.awake_.assign(g_.n(), cfg_.wake == WakeMode::simultaneous ? 1 : 0);
  ctx.seeds_.resize(g_.n());
  for (NodeId v = 0; v < g_.n(); ++v) ctx.seeds_[v] = mix64(seed_, 0x6e6f6465ULL, v);
  if (cfg_.wake == WakeMode::triggered)
    for (auto v : protocol.initiators()) ctx.awake_[v] = 1;

  std::vector<char> fault_dir(2 * g_.m(), 0);
  for (auto e : faults) fault_dir[2 * e] = fault_dir[2 * e + 1] = 1;

  protocol.start(ctx);
  adversary.start(g_, faults, protocol);

  RunResult result;
  RunReport& rep = result.report;
  const Round horizon = std::min(protocol.horizon(), cfg_.max_rounds ? cfg_.max_rounds : kNever);

  std::vector<Emission> honest, on_faults, adv, deliveries, sorted;
  std::vector<std::uint32_t> slot(2 * g_.m(), kNoSlot);
  std::vector<Round> last_use(2 * g_.m(), 0);
  std::vector<Round> adv_use(2 * g_.m(), 0);
  Round r = 1;
  Round last_round = 0;
  while (true) {
    if (protocol.finished()) break;
    if (r > horizon) {
      rep.horizon_exceeded = true;
      break;
    }
    const PhaseInfo phase = protocol.phase_at(r);
    const Encoding enc(g_.n(), phase.family ? phase.family->ell() : 2, cfg_.beta);

    honest.clear();
    protocol.emit(r, honest);
    on_faults.clear();
    deliveries.clear();
    for (const auto& em : honest) {
      NodeId from = g_.dir_tail(em.dir);
      if (!ctx.awake_[from]) throw ProtocolViolation("sleeping node " + std::to_string(from) + " emitted");
      if (!cfg_.local_mode) {
        if (!enc.fits(em.msg)) throw ProtocolViolation("honest message exceeds the bandwidth budget");
        if (last_use[em.dir] == r) throw ProtocolViolation("two honest messages on one direction in a round");
        last_use[em.dir] = r;
      }
      if (fault_dir[em.dir]) {
        on_faults.push_back(em);
      } else {
        deliveries.push_back(em);
      }
    }
    rep.honest_messages += honest.size();

    adv.clear();
    AdversaryView view{g_,       faults,   protocol,           phase,      r, honest, on_faults,
                       cfg_.record_transcript ? &result.transcript : nullptr, enc, cfg_.local_mode,
                       ctx.seeds_};
    if (!faults.empty()) adversary.act(view, adv);

    for (auto em : adv) {
      if (em.dir >= 2 * g_.m() || !fault_dir[em.dir]) {
        ++rep.adversary_dropped;
        continue;
      }
      if (!cfg_.local_mode) {
        if (adv_use[em.dir] == r) {
          ++rep.adversary_dropped;
          continue;
        }
        adv_use[em.dir] = r;
        if (!enc.fits(em.msg)) {
          em.msg = enc.truncate(em.msg);
          ++rep.adversary_truncated;
        }
        em.msg.inst = 0;
      }
      deliveries.push_back(em);
      ++rep.adversary_messages;
    }
    sort_by_dir(deliveries, sorted, slot, cfg_.local_mode);

    if (cfg_.record_transcript) {
      auto& rec = result.transcript.records;
      for (const auto& em : honest)
        if (!fault_dir[em.dir]) rec.push_back({r, em.dir, em.msg, em.msg});
      // On F directions, pair honest and adversarial messages in order.
      std::vector<Emission> hs(on_faults), as;
      for (const auto& em : deliveries)
        if (fault_dir[em.dir]) as.push_back(em);
      std::stable_sort(hs.begin(), hs.end(), [](const auto& a, const auto& b) { return a.dir < b.dir; });
      std::size_t i = 0, j = 0;
      while (i < hs.size() || j < as.size()) {
        if (j == as.size() || (i < hs.size() && hs[i].dir < as[j].dir)) {
          rec.push_back({r, hs[i].dir, hs[i].msg, std::nullopt});
          ++i;
        } else if (i == hs.size() || as[j].dir < hs[i].dir) {
          rec.push_back({r, as[j].dir, std::nullopt, as[j].msg});
          ++j;
        } else {
          rec.push_back({r, hs[i].dir, hs[i].msg, as[j].msg});
          ++i;
          ++j;
        }
      }
    }

    if (cfg_.wake == WakeMode::triggered)
      for (const auto& em : deliveries) ctx.awake_[g_.dir_head(em.dir)] = 1;
    protocol.deliver(r, deliveries);
    if (!honest.empty() || !deliveries.empty()) last_round = r;

    Round next = protocol.next_active(r);
    if (!faults.empty()) next = std::min(next, adversary.next_active(r));
    if (next <= r) next = r + 1;
    if (next == kNever) {
      r = kNever;
      if (!protocol.finished()) rep.horizon_exceeded = true;
      break;
    }
    r = next;
  }

  protocol.fill_report(rep);
  rep.protocol = protocol.name();
  if (protocol.finished()) {
    rep.rounds_used = protocol.completion_round();
  } else {
    rep.rounds_used = std::max(last_round, horizon == kNever ? last_round : horizon);
  }

  rep.safety = true;
  for (const auto& o : rep.outputs)
    if (o && (!rep.expected || *o != *rep.expected)) rep.safety = false;
  if (rep.expected) {
    rep.liveness = !rep.horizon_exceeded && protocol.finished();
    for (const auto& o : rep.outputs)
      if (!o || *o != *rep.expected) rep.liveness = false;
  } else {
    rep.liveness = true;
  }
  return result;
}

RunResult run(const Graph& g, Protocol& protocol, AdversaryStrategy& adversary, const EdgeSet& faults,
              EngineConfig cfg, std::uint64_t seed) {
  cfg.local_mode = false;
  return Engine(g, cfg, seed).run(protocol, adversary, faults);
}

RunResult run_local_mode(const Graph& g, Protocol& protocol, AdversaryStrategy& adversary, const EdgeSet& faults,
                         EngineConfig cfg, std::uint64_t seed) {
  cfg.local_mode = true;
  return Engine(g, cfg, seed).run(protocol, adversary, faults);
}

}  // namespace advcongest
