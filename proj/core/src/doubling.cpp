// Diameter-oblivious broadcast: applications i = 0, 1, ... with D_i = 2^i,
// each made of three fixed windows (data broadcast, back-channel M from the
// uninformed nodes, termination M_T from the source).

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "advcongest/protocols.hpp"
#include "advcongest/rng.hpp"
#include "executions.hpp"

namespace advcongest {

namespace {

Round sat_add(Round a, Round b) { return a > kNever - b ? kNever : a + b; }

struct AppRecord {
  std::uint32_t index = 0;
  std::uint32_t D = 0;
  std::vector<NodeId> acceptors;      // step 1
  std::vector<NodeId> uninformed;     // step 1 non-acceptors among active nodes
  bool source_accepted_M = false;
  bool termination_sent = false;
  std::vector<NodeId> terminated;
  std::uint64_t triggers = 0;
};

class Doubling : public Protocol {
 public:
  Doubling(const Graph& g, NodeId s, std::uint8_t m0, bool source_active, const DoublingConfig& dcfg)
      : g_(g), s_(s), m0_(m0), source_active_(source_active), dcfg_(dcfg) {
    if (s >= g.n()) throw std::invalid_argument("doubling: source out of range");
    if (m0 > 1) throw std::invalid_argument("doubling: message must be one bit");
    if (dcfg.max_applications == 0) throw std::invalid_argument("doubling: max_applications must be positive");
  }

  void start(const RunContext& ctx) override {
    ctx_ = &ctx;
    local_ = ctx.config().local_mode;
    const auto n = g_.n();
    active_.assign(n, 1);
    last_bit_.assign(n, std::nullopt);
    output_.assign(n, std::nullopt);
    estimate_.assign(n, std::nullopt);
    last_trigger_.assign(n, 0);
    horizon_ = 0;
    for (std::uint32_t i = 0; i < dcfg_.max_applications; ++i)
      for (int step = 1; step <= 3; ++step) horizon_ = sat_add(horizon_, window_length(i, step));
    begin_application(0, 0);
  }

  void emit(Round r, std::vector<Emission>& out) override {
    if (done_ || !exec_) return;
    if (dcfg_.triggered_wakeup && step_ == 2 && r == exec_->begin()) {
      for (auto v : apps_.back().acceptors) {
        if (!active_[v] || !ctx_->awake(v)) continue;
        for (const auto& inc : g_.incident(v))
          out.push_back({g_.dir(inc.edge, v), Message::control(ControlKind::StepDone)});
      }
    }
    exec_->emit(r, out);
  }

  void deliver(Round r, std::span<const Emission> in) override {
    if (done_ || !exec_) return;
    if (dcfg_.triggered_wakeup && step_ == 2) handle_triggers(r, in);
    exec_->deliver(r, in);
    if (r >= exec_->end()) finish_window(r);
  }

  Round next_active(Round r) const override {
    if (finished() || !exec_) return kNever;
    return exec_->next_active(r);
  }
  // A stalled run ends with some nodes still undecided.
  bool finished() const override { return done_ || stalled_; }
  Round completion_round() const override { return completion_; }
  Round horizon() const override { return horizon_; }
  PhaseInfo phase_at(Round r) const override {
    PhaseInfo p = exec_ ? exec_->phase_at(r) : PhaseInfo{};
    if (dcfg_.triggered_wakeup && step_ == 2 && exec_ && r == exec_->begin()) p.kind = PhaseKind::control;
    return p;
  }
  std::vector<NodeId> initiators() const override {
    return source_active_ ? std::vector<NodeId>{s_} : std::vector<NodeId>{};
  }

  void fill_report(RunReport& rep) const override {
    rep.outputs = output_;
    if (source_active_) rep.expected = m0_;
    rep.phases = phases_;
    rep.width = max_width_;
    rep.ell = max_ell_;
    if (estimate_[s_]) rep.diameter_estimate = *estimate_[s_];
    auto& apps = rep.details["applications"] = nlohmann::json::array();
    std::uint64_t step1_accepts = 0;
    for (const auto& a : apps_) {
      step1_accepts += a.acceptors.size();
      apps.push_back({{"i", a.index},
                      {"D_i", a.D},
                      {"acceptors", a.acceptors},
                      {"uninformed", a.uninformed},
                      {"source_accepted_M", a.source_accepted_M},
                      {"termination_sent", a.termination_sent},
                      {"terminated", a.terminated},
                      {"triggers", a.triggers}});
    }
    // Acceptances by nodes other than an honest source; any such count in
    // a run without an honest source is a spontaneous accept.
    std::uint64_t foreign = 0;
    for (const auto& a : apps_)
      for (auto v : a.acceptors)
        if (!(source_active_ && v == s_)) ++foreign;
    rep.details["step1_accepts"] = step1_accepts;
    rep.details["spontaneous_accepts"] = source_active_ ? 0 : foreign;
    if (i_star_) rep.details["i_star"] = *i_star_;
    rep.details["applications_run"] = apps_.size();
  }

 protected:
  virtual Round window_length(std::uint32_t i, int step) const = 0;
  virtual std::unique_ptr<detail::Execution> make_execution(std::uint32_t i, int step, std::vector<NodeId> sources,
                                                            std::uint8_t payload, Round base) = 0;

  detail::ExecEnv env() const { return detail::ExecEnv{&g_, ctx_, &active_}; }

  const Graph& g_;
  NodeId s_;
  std::uint8_t m0_;
  bool source_active_;
  DoublingConfig dcfg_;
  const RunContext* ctx_ = nullptr;
  bool local_ = false;
  std::size_t max_width_ = 0;
  std::size_t max_ell_ = 0;

 private:
  void begin_application(std::uint32_t i, Round base) {
    AppRecord rec;
    rec.index = i;
    rec.D = std::uint32_t{1} << i;
    apps_.push_back(rec);
    step_ = 1;
    std::vector<NodeId> sources;
    if (source_active_ && active_[s_]) sources.push_back(s_);
    start_window(1, std::move(sources), m0_, base);
  }

  void start_window(int step, std::vector<NodeId> sources, std::uint8_t payload, Round base) {
    step_ = step;
    exec_ = make_execution(apps_.back().index, step, std::move(sources), payload, base);
    max_ell_ = std::max(max_ell_, exec_->family().ell());
  }

  void handle_triggers(Round r, std::span<const Emission> in) {
    auto* bb1 = dynamic_cast<detail::BB1Execution*>(exec_.get());
    if (!bb1 || r > exec_->begin() - 1 + bb1->flood_rounds()) return;
    const Round local = r - (exec_->begin() - 1);
    auto& rec = apps_.back();
    for (const auto& em : in) {
      if (em.msg.tag != Tag::Control || em.msg.a != static_cast<std::uint32_t>(ControlKind::StepDone)) continue;
      const NodeId v = g_.dir_head(em.dir);
      if (!active_[v] || std::binary_search(rec.acceptors.begin(), rec.acceptors.end(), v)) continue;
      if (last_trigger_[v] == r) continue;
      last_trigger_[v] = r;
      if (local + 1 > bb1->flood_rounds()) continue;
      bb1->add_source(v, local + 1);
      ++rec.triggers;
    }
  }

  void finish_window(Round r) {
    exec_->add_phase_counts(phases_);
    auto& rec = apps_.back();
    const auto prefix = "app" + std::to_string(rec.index) + ".step" + std::to_string(step_);
    for (std::size_t k = phases_.size() - 2; k < phases_.size(); ++k) phases_[k].name = prefix + "." + phases_[k].name;
    if (step_ == 1) {
      std::vector<NodeId> uninformed;
      for (NodeId v = 0; v < g_.n(); ++v) {
        if (!active_[v]) continue;
        auto a = exec_->accepted(v);
        if (a) {
          last_bit_[v] = *a;
          rec.acceptors.push_back(v);
        } else {
          rec.uninformed.push_back(v);
        }
      }
      std::vector<NodeId> sources = dcfg_.triggered_wakeup ? std::vector<NodeId>{} : rec.uninformed;
      start_window(2, std::move(sources), 1, r);
      return;
    }
    if (step_ == 2) {
      auto a = exec_->accepted(s_);
      rec.source_accepted_M = active_[s_] && a && *a == 1;
      std::vector<NodeId> sources;
      if (source_active_ && active_[s_] && !rec.source_accepted_M) {
        sources.push_back(s_);
        rec.termination_sent = true;
      }
      start_window(3, std::move(sources), 1, r);
      return;
    }
    for (NodeId v = 0; v < g_.n(); ++v) {
      if (!active_[v]) continue;
      auto a = exec_->accepted(v);
      if (!a || *a != 1) continue;
      active_[v] = 0;
      output_[v] = last_bit_[v];
      estimate_[v] = rec.D;
      rec.terminated.push_back(v);
      completion_ = r;
    }
    if (!rec.terminated.empty() && !active_[s_] && !i_star_) i_star_ = rec.index;
    const bool anyone_left = std::any_of(active_.begin(), active_.end(), [](char c) { return c != 0; });
    // Once the source has terminated no termination message can follow, so
    // the remaining nodes would idle forever.
    const bool source_gone = source_active_ && !active_[s_];
    if (!anyone_left) {
      done_ = true;
      return;
    }
    if (source_gone || rec.index + 1 >= dcfg_.max_applications) {
      exec_.reset();
      stalled_ = true;
      completion_ = r;
      return;
    }
    begin_application(rec.index + 1, r);
  }

  std::vector<char> active_;
  std::vector<std::optional<std::uint8_t>> last_bit_;
  std::vector<std::optional<std::uint8_t>> output_;
  std::vector<std::optional<std::uint32_t>> estimate_;
  std::vector<Round> last_trigger_;
  std::vector<AppRecord> apps_;
  std::vector<PhaseCount> phases_;
  std::unique_ptr<detail::Execution> exec_;
  int step_ = 1;
  Round horizon_ = 0;
  Round completion_ = 0;
  bool done_ = false;
  bool stalled_ = false;
  std::optional<std::uint32_t> i_star_;
};

class BB1Doubling final : public Doubling {
 public:
  BB1Doubling(const Graph& g, NodeId s, std::uint8_t m0, const BB1Config& cfg, const DoublingConfig& dcfg)
      : Doubling(g, s, m0, cfg.source_active, dcfg), cfg_(cfg) {
    cfg_.instrument.queue_delay = false;
  }
  std::string name() const override { return "bb1_unknown"; }
  nlohmann::json public_params() const override {
    return {{"protocol", name()},
            {"source", s_},
            {"c1", cfg_.c1},
            {"c2", cfg_.c2},
            {"a1", cfg_.family.a1},
            {"a2", cfg_.family.a2},
            {"seed", cfg_.seed},
            {"max_applications", dcfg_.max_applications},
            {"triggered_wakeup", dcfg_.triggered_wakeup}};
  }

 protected:
  static std::uint32_t multiplier(int step) { return step == 1 ? 1 : step == 2 ? 9 : 28; }
  std::uint32_t L_for(std::uint32_t i, int step) const { return 7 * multiplier(step) * (std::uint32_t{1} << i); }

  Round window_length(std::uint32_t i, int step) const override {
    if (i >= 31) return kNever;
    const auto L = L_for(i, step);
    auto [h, q] = hash_family_shape(g_.m(), L, cfg_.family);
    const double r1 = std::ceil(cfg_.c1 * (double(L) * double(h) + double(h) * double(q)));
    const double r2 = std::ceil(cfg_.c2 * L);
    const double total = std::max(r1, 1.0) + std::max(r2, 1.0);
    return total >= 1.8e19 ? kNever : static_cast<Round>(total);
  }

  std::unique_ptr<detail::Execution> make_execution(std::uint32_t i, int step, std::vector<NodeId> sources,
                                                    std::uint8_t payload, Round base) override {
    const auto L = L_for(i, step);
    auto fam = std::make_shared<const CoveringFamily>(
        build_hash_family(g_, L, mix64(cfg_.seed, i, static_cast<std::uint64_t>(step)), cfg_.family));
    if (!local_ && 4 + ceil_log2_at_least1(fam->ell()) > ctx_->bandwidth_bits())
      throw std::invalid_argument("subgraph index does not fit in the message budget; raise beta");
    const auto w = fam->hash_count();
    max_width_ = std::max(max_width_, w);
    const auto label = "bb1(" + std::to_string(multiplier(step)) + "D_" + std::to_string(i) + ")";
    return std::make_unique<detail::BB1Execution>(env(), std::move(fam), w, cfg_, std::move(sources), payload, base,
                                                  label);
  }

 private:
  BB1Config cfg_;
};

class BBTDoubling final : public Doubling {
 public:
  BBTDoubling(const Graph& g, NodeId s, std::uint8_t m0, std::uint32_t t, const BBTConfig& cfg,
              const DoublingConfig& dcfg)
      : Doubling(g, s, m0, cfg.source_active, dcfg), t_(t), cfg_(cfg) {
    if (t == 0 || t > 4) throw std::invalid_argument("bbt_unknown: t must be in [1, 4]");
    if (dcfg.triggered_wakeup) throw std::invalid_argument("bbt_unknown: triggered wake-up is not supported");
  }
  std::string name() const override { return "bbt_unknown"; }
  nlohmann::json public_params() const override {
    nlohmann::json fam{{"b", cfg_.family.b}, {"cap", cfg_.family.cap}};
    if (cfg_.family.drop) fam["drop"] = *cfg_.family.drop;
    return {{"protocol", name()}, {"source", s_},       {"t", t_},
            {"c3", cfg_.c3},      {"c", cfg_.c},         {"family", fam},
            {"seed", cfg_.seed},  {"max_applications", dcfg_.max_applications}};
  }

 protected:
  std::uint32_t L_for(std::uint32_t i, int step) const {
    const double Li = double(6 * t_ + 2) * double(std::uint64_t{1} << i);
    const double v = step == 1 ? Li : std::ceil(cfg_.c * t_ * Li);
    return v >= 4e9 ? 4'000'000'000u : static_cast<std::uint32_t>(v);
  }
  std::size_t family_size(std::uint32_t L) const {
    try {
      return build_sampled_family(g_, L, 2 * t_, 0, cfg_.family).ell();
    } catch (const std::invalid_argument&) {
      return 0;
    }
  }

  Round window_length(std::uint32_t i, int step) const override {
    if (i >= 31) return kNever;
    const auto L = L_for(i, step);
    const auto ell = family_size(L);
    if (ell == 0) return kNever;
    return bbt_budget(ell, L, cfg_, local_);
  }

  std::unique_ptr<detail::Execution> make_execution(std::uint32_t i, int step, std::vector<NodeId> sources,
                                                    std::uint8_t payload, Round base) override {
    const auto L = L_for(i, step);
    // Steps 2 and 3 share one family.
    if (step == 1 || !shared_) {
      auto fam = std::make_shared<const CoveringFamily>(build_sampled_family(
          g_, L, 2 * t_, mix64(cfg_.seed, i, static_cast<std::uint64_t>(step == 1 ? 1 : 2)), cfg_.family));
      if (step == 1) {
        step1_ = fam;
        shared_.reset();
      } else {
        shared_ = fam;
      }
    }
    auto fam = step == 1 ? step1_ : shared_;
    std::optional<NodeId> known;
    if (step != 2) known = s_;
    const auto label = std::string(step == 1 ? "bbt(L_" : step == 2 ? "bbtM(L_" : "bbtT(L_") + std::to_string(i) + ")";
    return std::make_unique<detail::BBTExecution>(env(), std::move(fam), L, t_, cfg_, std::move(sources), payload,
                                                  known, base, local_, label);
  }

 private:
  std::uint32_t t_;
  BBTConfig cfg_;
  std::shared_ptr<const CoveringFamily> step1_, shared_;
};

}  // namespace

std::unique_ptr<Protocol> bb1_unknown(const Graph& g, NodeId s, std::uint8_t m0, const BB1Config& cfg,
                                      const DoublingConfig& dcfg) {
  return std::make_unique<BB1Doubling>(g, s, m0, cfg, dcfg);
}

std::unique_ptr<Protocol> bbt_unknown(const Graph& g, NodeId s, std::uint8_t m0, std::uint32_t t,
                                      const BBTConfig& cfg, const DoublingConfig& dcfg) {
  return std::make_unique<BBTDoubling>(g, s, m0, t, cfg, dcfg);
}

}  // namespace advcongest
