#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "advcongest/protocols.hpp"
#include "executions.hpp"

namespace advcongest {

Round bb1_budget(const CoveringFamily& fam, std::size_t width, const BB1Config& cfg) {
  const double L = fam.L();
  auto r1 = static_cast<Round>(std::ceil(cfg.c1 * (L * static_cast<double>(width) + static_cast<double>(fam.ell()))));
  auto r2 = static_cast<Round>(std::ceil(cfg.c2 * L));
  return std::max<Round>(r1, 1) + std::max<Round>(r2, 1);
}

namespace detail {

BB1Execution::BB1Execution(ExecEnv env, std::shared_ptr<const CoveringFamily> fam, std::size_t width,
                           const BB1Config& cfg, std::vector<NodeId> sources, std::uint8_t payload, Round base,
                           std::string label)
    : env_(env), fam_(std::move(fam)), width_(width), cfg_(cfg), payload_(payload), label_(std::move(label)) {
  const auto n = env_.graph->n();
  ell_ = fam_->ell();
  const double L = fam_->L();
  r1_ = std::max<Round>(1, static_cast<Round>(std::ceil(cfg_.c1 * (L * static_cast<double>(width_) +
                                                                     static_cast<double>(ell_)))));
  r2_ = std::max<Round>(1, static_cast<Round>(std::ceil(cfg_.c2 * L)));
  base_ = base;
  length_ = r1_ + r2_;
  is_source_.assign(n, 0);
  accepted_.assign(n, std::nullopt);
  words_ = (2 * ell_ + 63) / 64;
  stored_.assign(n * words_, 0);
  heap_.resize(n);
  in_busy_.assign(n, 0);
  absent_cache_.resize(env_.graph->m());
  absent_ready_.assign(env_.graph->m(), 0);
  instrument_ = cfg_.instrument.queue_delay;
  if (instrument_) {
    audit_fault_ = cfg_.instrument.audit_faults.mask(env_.graph->m());
    track_.assign(n * 2 * ell_, Track{});
  }
  for (auto v : sources) add_source(v, 1);
}

void BB1Execution::add_source(NodeId v, Round start) {
  is_source_[v] = 1;
  accepted_[v] = payload_;
  starts_.emplace_back(v, start);
}

void BB1Execution::push(NodeId v, std::uint64_t key) {
  auto& h = heap_[v];
  h.push_back(key);
  std::push_heap(h.begin(), h.end(), std::greater<>());
  if (!in_busy_[v]) {
    in_busy_[v] = 1;
    busy_.push_back(v);
  }
}

const std::vector<std::uint32_t>& BB1Execution::absent(EdgeId e) {
  if (!absent_ready_[e]) {
    absent_cache_[e] = fam_->absent_indices(e);
    absent_ready_[e] = 1;
  }
  return absent_cache_[e];
}

void BB1Execution::emit(Round r, std::vector<Emission>& out) {
  if (r < begin() || r > end()) return;
  const Round rho = r - base_;
  const Graph& g = *env_.graph;
  if (rho <= r1_) {
    for (const auto& [v, st] : starts_) {
      if (rho < st || rho >= st + ell_ || !env_.participates(v)) continue;
      const std::uint64_t key = 2 * (rho - st) + payload_;
      if (stored(v, key)) continue;
      set_stored(v, key);
      ++stored_total_;
      if (instrument_) {
        auto& tr = track_[v * 2 * ell_ + key];
        tr.arrival = static_cast<std::uint32_t>(rho - 1);
        tr.eta = 0;
        tr.delay = 0;
        tr.clean = true;
      }
      push(v, key);
    }
    std::size_t keep = 0;
    for (std::size_t bi = 0; bi < busy_.size(); ++bi) {
      const NodeId u = busy_[bi];
      auto& h = heap_[u];
      std::pop_heap(h.begin(), h.end(), std::greater<>());
      const std::uint64_t key = h.back();
      h.pop_back();
      if (instrument_) track_[u * 2 * ell_ + key].sent = static_cast<std::uint32_t>(rho);
      const auto msg = Message::flood(static_cast<std::uint8_t>(key & 1u), static_cast<std::uint32_t>(key >> 1));
      for (const auto& inc : g.incident(u)) out.push_back({g.dir(inc.edge, u), msg});
      if (h.empty()) {
        in_busy_[u] = 0;
      } else {
        busy_[keep++] = u;
      }
    }
    busy_.resize(keep);
    return;
  }
  if (rho == r1_ + 1) {
    for (const auto& [v, st] : starts_) {
      (void)st;
      if (!env_.participates(v)) continue;
      for (const auto& inc : g.incident(v)) out.push_back({g.dir(inc.edge, v), Message::accept(payload_)});
    }
  }
  for (const auto& [v, b] : relay_)
    for (const auto& inc : g.incident(v)) out.push_back({g.dir(inc.edge, v), Message::accept(b)});
  relay_.clear();
}

void BB1Execution::deliver(Round r, std::span<const Emission> in) {
  if (r < begin() || r > end()) return;
  const Round rho = r - base_;
  const Graph& g = *env_.graph;
  if (rho <= r1_) {
    for (const auto& em : in) {
      if (em.msg.tag != Tag::Flood || em.msg.bit > 1 || em.msg.a >= ell_) continue;
      const NodeId u = g.dir_head(em.dir);
      const std::uint64_t key = 2 * std::uint64_t{em.msg.a} + em.msg.bit;
      if (stored(u, key)) continue;
      // Sources originate every index themselves and never relay.
      if (is_source_[u] || !env_.participates(u) || !fam_->contains_dir(em.dir, em.msg.a)) continue;
      set_stored(u, key);
      ++stored_total_;
      if (instrument_) {
        const NodeId w = g.dir_tail(em.dir);
        const EdgeId e = em.dir >> 1;
        auto& tr = track_[u * 2 * ell_ + key];
        tr.arrival = static_cast<std::uint32_t>(rho);
        if (audit_fault_[e]) {
          tr.eta = 1;
          tr.delay = 0;
          tr.clean = false;
        } else {
          const auto& prev = track_[w * 2 * ell_ + key];
          tr.eta = prev.eta + 1;
          tr.delay = prev.delay + (prev.sent - prev.arrival - 1);
          tr.clean = prev.clean;
        }
      }
      push(u, key);
    }
    return;
  }
  for (const auto& em : in) {
    if (em.msg.tag != Tag::Accept || em.msg.bit > 1) continue;
    const NodeId u = g.dir_head(em.dir);
    if (accepted_[u] || !env_.participates(u)) continue;
    const std::uint8_t b = em.msg.bit;
    bool ok = false;
    for (auto i : absent(em.dir >> 1))
      if (stored(u, 2 * std::uint64_t{i} + b)) {
        ok = true;
        break;
      }
    if (!ok) continue;
    accepted_[u] = b;
    relay_.emplace_back(u, b);
  }
}

Round BB1Execution::next_active(Round r) const {
  if (r >= end()) return kNever;
  if (r < begin()) return begin();
  const Round rho = r - base_;
  if (rho < r1_) {
    if (!busy_.empty()) return r + 1;
    Round best = r1_ + 1;
    for (const auto& [v, st] : starts_) {
      if (rho + 1 < st) {
        best = std::min(best, st);
      } else if (rho + 1 < st + ell_) {
        best = rho + 1;
        break;
      }
    }
    return base_ + std::min<Round>(best, r1_ + 1);
  }
  if (!relay_.empty()) return r + 1;
  return end();
}

PhaseInfo BB1Execution::phase_at(Round r) const {
  PhaseInfo p;
  p.family = fam_.get();
  p.L = fam_->L();
  p.t = 1;
  if (r <= base_ + r1_) {
    p.kind = PhaseKind::flood;
    p.label = label_;
    p.start = begin();
    p.end = base_ + r1_;
  } else {
    p.kind = PhaseKind::accept;
    p.label = label_;
    p.start = base_ + r1_ + 1;
    p.end = end();
  }
  return p;
}

std::optional<std::uint8_t> BB1Execution::accepted(NodeId v) const { return accepted_[v]; }

void BB1Execution::add_phase_counts(std::vector<PhaseCount>& out) const {
  out.push_back({label_ + ".flood", r1_});
  out.push_back({label_ + ".accept", r2_});
}

std::vector<QueueDelayRecord> BB1Execution::queue_delay() const {
  std::vector<QueueDelayRecord> out;
  if (!instrument_) return out;
  const auto n = env_.graph->n();
  for (NodeId v = 0; v < n; ++v) {
    if (is_source_[v]) continue;
    for (std::uint64_t key = 0; key < 2 * ell_; ++key) {
      if (!stored(v, key)) continue;
      const auto& tr = track_[v * 2 * ell_ + key];
      QueueDelayRecord q;
      q.node = v;
      q.index = static_cast<std::uint32_t>(key >> 1);
      q.bit = static_cast<std::uint8_t>(key & 1u);
      q.eta = tr.eta;
      q.delay = tr.delay;
      q.arrival = tr.arrival;
      q.clean = tr.clean;
      out.push_back(q);
    }
  }
  return out;
}

}  // namespace detail

namespace {

void check_index_fits(const RunContext& ctx, std::size_t ell) {
  if (ctx.config().local_mode) return;
  if (4 + ceil_log2_at_least1(ell) > ctx.bandwidth_bits())
    throw std::invalid_argument("subgraph index does not fit in the message budget; raise beta");
}

class BB1Known final : public Protocol {
 public:
  BB1Known(const Graph& g, std::shared_ptr<const CoveringFamily> fam, NodeId s, std::uint8_t m0,
           std::uint32_t D_prime, const BB1Config& cfg)
      : g_(g), fam_(std::move(fam)), s_(s), m0_(m0), D_(D_prime), cfg_(cfg) {
    if (s >= g.n()) throw std::invalid_argument("bb1_known: source out of range");
    if (m0 > 1) throw std::invalid_argument("bb1_known: message must be one bit");
    if (fam_->L() != 7 * D_prime)
      throw std::invalid_argument("bb1_known: family built for L=" + std::to_string(fam_->L()) + ", expected " +
                                  std::to_string(7 * D_prime));
    if (fam_->edge_universe() != g.m()) throw std::invalid_argument("bb1_known: family built for another graph");
    width_ = fam_->flavor() == Flavor::hash ? fam_->hash_count() : width(*fam_, g);
  }

  std::string name() const override { return "bb1_known"; }
  nlohmann::json public_params() const override {
    return {{"protocol", name()}, {"source", s_},      {"D_prime", D_},   {"L", fam_->L()},
            {"c1", cfg_.c1},      {"c2", cfg_.c2},      {"width", width_}, {"family", fam_->descriptor()}};
  }

  void start(const RunContext& ctx) override {
    check_index_fits(ctx, fam_->ell());
    std::vector<NodeId> sources;
    if (cfg_.source_active) sources.push_back(s_);
    exec_ = std::make_unique<detail::BB1Execution>(detail::ExecEnv{&g_, &ctx, nullptr}, fam_, width_, cfg_,
                                                   std::move(sources), m0_, 0, "bb1");
  }
  void emit(Round r, std::vector<Emission>& out) override { exec_->emit(r, out); }
  void deliver(Round r, std::span<const Emission> in) override {
    exec_->deliver(r, in);
    if (r >= exec_->end()) done_ = true;
  }
  Round next_active(Round r) const override { return done_ ? kNever : exec_->next_active(r); }
  bool finished() const override { return done_; }
  Round completion_round() const override { return exec_->end(); }
  Round horizon() const override { return exec_->end(); }
  PhaseInfo phase_at(Round r) const override { return exec_->phase_at(r); }
  std::vector<NodeId> initiators() const override {
    return cfg_.source_active ? std::vector<NodeId>{s_} : std::vector<NodeId>{};
  }
  void fill_report(RunReport& rep) const override {
    rep.outputs.resize(g_.n());
    for (NodeId v = 0; v < g_.n(); ++v) rep.outputs[v] = exec_->accepted(v);
    if (cfg_.source_active) rep.expected = m0_;
    exec_->add_phase_counts(rep.phases);
    rep.width = width_;
    rep.ell = fam_->ell();
    if (cfg_.instrument.queue_delay) rep.queue_delay = exec_->queue_delay();
    rep.details["D_prime"] = D_;
    rep.details["L"] = fam_->L();
    rep.details["R1"] = exec_->flood_rounds();
    rep.details["R2"] = exec_->accept_rounds();
    rep.details["stored_messages"] = exec_->stored_messages();
  }

 private:
  const Graph& g_;
  std::shared_ptr<const CoveringFamily> fam_;
  NodeId s_;
  std::uint8_t m0_;
  std::uint32_t D_;
  BB1Config cfg_;
  std::size_t width_ = 0;
  std::unique_ptr<detail::BB1Execution> exec_;
  bool done_ = false;
};

}  // namespace

std::unique_ptr<Protocol> bb1_known(const Graph& g, std::shared_ptr<const CoveringFamily> fam, NodeId s,
                                    std::uint8_t m0, std::uint32_t D_prime, const BB1Config& cfg) {
  return std::make_unique<BB1Known>(g, std::move(fam), s, m0, D_prime, cfg);
}

std::unique_ptr<Protocol> bb1_known(const Graph& g, NodeId s, std::uint8_t m0, std::uint32_t D_prime,
                                    const BB1Config& cfg) {
  auto fam = std::make_shared<const CoveringFamily>(build_hash_family(g, 7 * D_prime, cfg.seed, cfg.family));
  return bb1_known(g, std::move(fam), s, m0, D_prime, cfg);
}

}  // namespace advcongest
