#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "advcongest/protocols.hpp"
#include "executions.hpp"

namespace advcongest {

namespace {
Round iteration_rounds(std::uint32_t L, double c3) {
  return std::max<Round>(1, static_cast<Round>(std::ceil(c3 * static_cast<double>(L))));
}
}  // namespace

Round bbt_budget(std::size_t ell, std::uint32_t L, const BBTConfig& cfg, bool local_mode) {
  const Round it = iteration_rounds(L, cfg.c3);
  return it * (local_mode ? 1 : ell) + it;
}

namespace detail {

BBTExecution::BBTExecution(ExecEnv env, std::shared_ptr<const CoveringFamily> fam, std::uint32_t L, std::uint32_t t,
                           const BBTConfig& cfg, std::vector<NodeId> sources, std::uint8_t payload,
                           std::optional<NodeId> known_source, Round base, bool local_mode, std::string label)
    : env_(env),
      fam_(std::move(fam)),
      L_(L),
      t_(t),
      cfg_(cfg),
      payload_(payload),
      known_source_(known_source),
      local_(local_mode),
      label_(std::move(label)) {
  if (t_ == 0 || t_ > 4) throw std::invalid_argument("bbt: t must be in [1, 4]");
  const auto n = env_.graph->n();
  ell_ = fam_->ell();
  iter_len_ = iteration_rounds(L_, cfg_.c3);
  flood_len_ = iter_len_ * (local_ ? 1 : ell_);
  accept_len_ = iter_len_;
  base_ = base;
  length_ = flood_len_ + accept_len_;
  max_len_ = static_cast<std::uint32_t>(std::min<Round>(n > 1 ? n - 1 : 1, iter_len_));
  is_source_.assign(n, 0);
  accepted_.assign(n, std::nullopt);
  for (auto v : sources) {
    if (is_source_[v]) continue;
    is_source_[v] = 1;
    sources_.push_back(v);
    accepted_[v] = payload_;
  }
  words_ = (ell_ + 63) / 64;
  adopted_.assign(n * words_, 0);
  streams_.resize(n);
  archive_.resize(n);
  verdict_cache_.resize(n);
}

std::uint32_t BBTExecution::iteration_of(Round r) const {
  return static_cast<std::uint32_t>((r - base_ - 1) / iter_len_);
}
Round BBTExecution::iteration_start(std::uint32_t k) const { return base_ + Round{k} * iter_len_ + 1; }
Round BBTExecution::iteration_last(std::uint32_t k) const { return base_ + Round{k + 1} * iter_len_; }

void BBTExecution::finish_stream(NodeId v, Stream& s) {
  if (s.is_void || s.archived >= 0) return;
  s.complete = true;
  Bundle b;
  b.bit = s.bit;
  b.iteration = s.iteration;
  const Graph& g = *env_.graph;
  b.order.push_back(edge_key(g.dir_tail(s.from), g.dir_head(s.from)));
  b.order.insert(b.order.end(), s.edges.begin(), s.edges.end());
  b.path = b.order;
  std::sort(b.path.begin(), b.path.end());
  b.path.erase(std::unique(b.path.begin(), b.path.end()), b.path.end());
  s.archived = static_cast<std::int64_t>(archive_[v].size());
  archive_[v].push_back(std::move(b));
}

void BBTExecution::emit(Round r, std::vector<Emission>& out) {
  if (r < begin() || r > end()) return;
  const Graph& g = *env_.graph;
  if (in_flood(r)) {
    // Sources open every iteration.
    if (local_) {
      if (r == begin())
        for (auto s : sources_) {
          if (!env_.participates(s)) continue;
          for (std::uint32_t k = 0; k < ell_; ++k)
            for (const auto& inc : g.incident(s)) out.push_back({g.dir(inc.edge, s), Message::header(payload_, 0, k)});
        }
    } else {
      const auto k = iteration_of(r);
      if (r == iteration_start(k))
        for (auto s : sources_) {
          if (!env_.participates(s)) continue;
          for (const auto& inc : g.incident(s)) out.push_back({g.dir(inc.edge, s), Message::header(payload_, 0)});
        }
    }
    for (NodeId v = 0; v < streams_.size(); ++v) {
      auto& list = streams_[v];
      if (list.empty()) continue;
      if (!local_) {
        const auto k = iteration_of(r);
        std::erase_if(list, [&](const Stream& s) { return s.iteration != k; });
      }
      if (!env_.participates(v)) {
        list.clear();
        continue;
      }
      for (auto& s : list) {
        if (s.done_sending) continue;
        const Round p = r - s.header_round;
        const std::uint32_t inst = local_ ? s.iteration : 0;
        std::optional<Message> msg;
        if (p == 1) {
          msg = Message::header(s.bit, s.len + 1, inst);
        } else if (p == 2) {
          msg = Message::heard_edge(g.dir_tail(s.from), g.dir_head(s.from), inst);
        } else if (p >= 3 && p <= Round{s.len} + 2 && !s.is_void && s.edges.size() >= p - 2) {
          const EdgeKey e = s.edges[p - 3];
          msg = Message::heard_edge(static_cast<std::uint32_t>(e >> 32), static_cast<std::uint32_t>(e & 0xffffffffu),
                                    inst);
        }
        if (!msg) {
          s.done_sending = true;
          continue;
        }
        for (const auto& inc : g.incident(v)) out.push_back({g.dir(inc.edge, v), *msg});
        if (p == Round{s.len} + 2) s.done_sending = true;
      }
      std::erase_if(list, [](const Stream& s) { return s.done_sending && (s.complete || s.is_void); });
    }
    return;
  }
  if (r == begin() + flood_len_)
    for (auto s : sources_) {
      if (!env_.participates(s)) continue;
      for (const auto& inc : g.incident(s)) out.push_back({g.dir(inc.edge, s), Message::accept(payload_)});
    }
  for (const auto& [v, b] : relay_)
    for (const auto& inc : g.incident(v)) out.push_back({g.dir(inc.edge, v), Message::accept(b)});
  relay_.clear();
}

void BBTExecution::deliver(Round r, std::span<const Emission> in) {
  if (r < begin() || r > end()) return;
  const Graph& g = *env_.graph;
  if (in_flood(r)) {
    const std::uint32_t current = local_ ? 0 : iteration_of(r);
    // Streams are at most one per node per iteration; locate by iteration.
    auto find = [&](NodeId v, std::uint32_t k) -> Stream* {
      for (auto& s : streams_[v])
        if (s.iteration == k) return &s;
      return nullptr;
    };
    auto void_stream = [&](NodeId v, Stream& s) {
      if (s.is_void) return;
      s.is_void = true;
      if (s.archived >= 0) {
        archive_[v][static_cast<std::size_t>(s.archived)].is_void = true;
        ++voided_;
      }
    };
    for (const auto& em : in) {
      const NodeId v = g.dir_head(em.dir);
      if (is_source_[v] || !env_.participates(v)) continue;
      const std::uint32_t k = local_ ? em.msg.inst : current;
      if (k >= ell_) continue;
      if (em.msg.tag == Tag::HeardHeader) {
        Stream* s = find(v, k);
        if (s) {
          if (s->from == em.dir) void_stream(v, *s);
          continue;
        }
        auto& word = adopted_[v * words_ + k / 64];
        const std::uint64_t bit = std::uint64_t{1} << (k % 64);
        if (word & bit) continue;
        if (em.msg.bit > 1 || !fam_->contains_dir(em.dir, k)) continue;
        const std::uint32_t x = em.msg.a;
        if (x + 1 > max_len_) continue;
        if (x == 0 && known_source_ && g.dir_tail(em.dir) != *known_source_) continue;
        word |= bit;
        Stream ns;
        ns.iteration = k;
        ns.from = em.dir;
        ns.header_round = r;
        ns.len = x;
        ns.bit = em.msg.bit;
        ns.last_input = r;
        streams_[v].push_back(std::move(ns));
        if (x == 0) finish_stream(v, streams_[v].back());
      } else if (em.msg.tag == Tag::HeardEdge) {
        Stream* s = find(v, k);
        if (!s || s->from != em.dir || s->is_void) continue;
        if (s->edges.size() < s->len && r == s->header_round + s->edges.size() + 1) {
          s->edges.push_back(edge_key(em.msg.a, em.msg.b));
          s->last_input = r;
          if (s->edges.size() == s->len) finish_stream(v, *s);
        } else {
          void_stream(v, *s);
        }
      }
    }
    // A missing edge in its slot voids the bundle.
    for (NodeId v = 0; v < streams_.size(); ++v)
      for (auto& s : streams_[v])
        if (!s.is_void && !s.complete && s.header_round + s.edges.size() + 1 <= r) void_stream(v, s);
    return;
  }
  for (const auto& em : in) {
    if (em.msg.tag != Tag::Accept || em.msg.bit > 1) continue;
    const NodeId v = g.dir_head(em.dir);
    if (accepted_[v] || !env_.participates(v)) continue;
    const NodeId w = g.dir_tail(em.dir);
    const std::uint8_t b = em.msg.bit;
    const std::uint64_t ck = 2 * std::uint64_t{em.dir >> 1} + b;
    auto [it, fresh] = verdict_cache_[v].try_emplace(ck, 0);
    if (fresh) {
      const EdgeKey excluded = edge_key(v, w);
      std::vector<std::vector<EdgeKey>> paths;
      for (const auto& bd : archive_[v]) {
        if (bd.is_void || bd.bit != b) continue;
        if (std::binary_search(bd.path.begin(), bd.path.end(), excluded)) continue;
        paths.push_back(bd.path);
      }
      it->second = mincut_paths(paths, t_).meets_threshold ? 1 : 0;
    }
    if (!it->second) continue;
    accepted_[v] = b;
    relay_.emplace_back(v, b);
  }
}

Round BBTExecution::next_active(Round r) const {
  if (r >= end()) return kNever;
  if (r < begin()) return begin();
  const Round accept_start = begin() + flood_len_;
  if (r + 1 < accept_start) {
    for (const auto& list : streams_)
      if (!list.empty()) return r + 1;
    bool any_source = false;
    for (auto s : sources_) any_source = any_source || env_.participates(s);
    if (!any_source) return accept_start;
    if (local_) return accept_start;
    const auto k = iteration_of(r + 1);
    const Round st = iteration_start(k);
    if (st == r + 1) return st;
    return k + 1 < ell_ ? iteration_start(k + 1) : accept_start;
  }
  if (r + 1 == accept_start) return accept_start;
  if (!relay_.empty()) return r + 1;
  return end();
}

PhaseInfo BBTExecution::phase_at(Round r) const {
  PhaseInfo p;
  p.family = fam_.get();
  p.L = L_;
  p.t = t_;
  p.label = label_;
  p.parallel = local_;
  p.iteration_length = iter_len_;
  if (in_flood(r)) {
    p.kind = PhaseKind::heard;
    p.start = begin();
    p.end = begin() + flood_len_ - 1;
  } else {
    p.kind = PhaseKind::accept;
    p.start = begin() + flood_len_;
    p.end = end();
  }
  return p;
}

std::optional<std::uint8_t> BBTExecution::accepted(NodeId v) const { return accepted_[v]; }

void BBTExecution::add_phase_counts(std::vector<PhaseCount>& out) const {
  out.push_back({label_ + ".heard", flood_len_});
  out.push_back({label_ + ".accept", accept_len_});
}

}  // namespace detail

namespace {

class BBTKnown final : public Protocol {
 public:
  BBTKnown(const Graph& g, std::shared_ptr<const CoveringFamily> fam, NodeId s, std::uint8_t m0, std::uint32_t L,
           std::uint32_t t, const BBTConfig& cfg, std::string name)
      : g_(g), fam_(std::move(fam)), s_(s), m0_(m0), L_(L), t_(t), cfg_(cfg), name_(std::move(name)) {
    if (s >= g.n()) throw std::invalid_argument("bbt: source out of range");
    if (m0 > 1) throw std::invalid_argument("bbt: message must be one bit");
    if (t == 0 || t > 4) throw std::invalid_argument("bbt: t must be in [1, 4]");
    if (L == 0) throw std::invalid_argument("bbt: L must be positive");
    if (fam_->edge_universe() != g.m()) throw std::invalid_argument("bbt: family built for another graph");
  }

  std::string name() const override { return name_; }
  nlohmann::json public_params() const override {
    return {{"protocol", name_}, {"source", s_}, {"L", L_}, {"t", t_}, {"c3", cfg_.c3},
            {"family", fam_->descriptor()}};
  }

  void start(const RunContext& ctx) override {
    local_ = ctx.config().local_mode;
    std::vector<NodeId> sources;
    if (cfg_.source_active) sources.push_back(s_);
    exec_ = std::make_unique<detail::BBTExecution>(detail::ExecEnv{&g_, &ctx, nullptr}, fam_, L_, t_, cfg_,
                                                   std::move(sources), m0_, s_, 0, local_, "bbt");
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
    rep.ell = fam_->ell();
    rep.width = width(*fam_, g_);
    std::uint64_t bundles = 0;
    for (NodeId v = 0; v < g_.n(); ++v) bundles += exec_->bundles(v).size();
    rep.details["L"] = L_;
    rep.details["t"] = t_;
    rep.details["local_mode"] = local_;
    rep.details["bundles_stored"] = bundles;
    rep.details["bundles_voided"] = exec_->voided_bundles();
  }

  const detail::BBTExecution* execution() const { return exec_.get(); }

 private:
  const Graph& g_;
  std::shared_ptr<const CoveringFamily> fam_;
  NodeId s_;
  std::uint8_t m0_;
  std::uint32_t L_, t_;
  BBTConfig cfg_;
  std::string name_;
  bool local_ = false;
  std::unique_ptr<detail::BBTExecution> exec_;
  bool done_ = false;
};

}  // namespace

std::unique_ptr<Protocol> bbt(const Graph& g, std::shared_ptr<const CoveringFamily> fam, NodeId s, std::uint8_t m0,
                              std::uint32_t L, std::uint32_t t, const BBTConfig& cfg) {
  return std::make_unique<BBTKnown>(g, std::move(fam), s, m0, L, t, cfg, "bbt");
}

std::uint32_t expander_path_bound(std::size_t n, double phi_estimate, double c_L) {
  if (!(phi_estimate > 0)) throw std::invalid_argument("expander_broadcast: conductance estimate must be positive");
  const double v = c_L * std::log2(static_cast<double>(std::max<std::size_t>(n, 2))) / phi_estimate;
  return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(v)));
}

std::unique_ptr<Protocol> expander_broadcast(const Graph& g, NodeId s, std::uint8_t m0, std::uint32_t t,
                                             double phi_estimate, std::uint64_t seed,
                                             const ExpanderBroadcastConfig& cfg) {
  const auto L = expander_path_bound(g.n(), phi_estimate, cfg.c_L);
  auto fam = std::make_shared<const CoveringFamily>(build_expander_family(g, t, seed, true, cfg.family, L));
  return std::make_unique<BBTKnown>(g, std::move(fam), s, m0, L, t, cfg.bbt, "expander_broadcast");
}

}  // namespace advcongest
