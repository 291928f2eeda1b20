#include "advcongest/adversary.hpp"

#include <algorithm>
#include <stdexcept>

namespace advcongest {

namespace {

std::vector<DirId> fault_dirs(const EdgeSet& faults) {
  std::vector<DirId> out;
  for (auto e : faults) {
    out.push_back(2 * e);
    out.push_back(2 * e + 1);
  }
  return out;
}

void echo_into(const AdversaryView& view, std::vector<Emission>& out) {
  out.insert(out.end(), view.honest_on_faults.begin(), view.honest_on_faults.end());
}

bool carries_bit(Tag t) { return t == Tag::Flood || t == Tag::Accept || t == Tag::HeardHeader; }

class Silent final : public AdversaryStrategy {
 public:
  std::string name() const override { return "silent"; }
  void act(const AdversaryView&, std::vector<Emission>&) override {}
};

class Echo final : public AdversaryStrategy {
 public:
  std::string name() const override { return "echo"; }
  void act(const AdversaryView& view, std::vector<Emission>& out) override { echo_into(view, out); }
};

class BitFlip final : public AdversaryStrategy {
 public:
  std::string name() const override { return "bit_flip"; }
  void act(const AdversaryView& view, std::vector<Emission>& out) override {
    for (auto em : view.honest_on_faults) {
      if (carries_bit(em.msg.tag)) em.msg.bit ^= 1u;
      out.push_back(em);
    }
  }
};

// Honest traffic on the directions the strategy does not claim this round.
void echo_except(const AdversaryView& view, const std::vector<DirId>& claimed, std::vector<Emission>& out) {
  for (const auto& em : view.honest_on_faults)
    if (std::find(claimed.begin(), claimed.end(), em.dir) == claimed.end()) out.push_back(em);
}

// Shared machinery: per flood phase, each F direction walks through a list
// of indices and injects one flood message per round (all at once in LOCAL
// mode).
class FloodInjector {
 public:
  FloodInjector(std::uint8_t bit, std::vector<std::uint32_t> indices) : bit_(bit), fixed_(std::move(indices)) {}

  void reset(const AdversaryView& view, const std::vector<DirId>& dirs) {
    lists_.clear();
    cursor_.clear();
    const auto* fam = view.phase.family;
    for (auto d : dirs) {
      std::vector<std::uint32_t> l;
      if (!fixed_.empty()) {
        l = fixed_;
      } else if (fam) {
        for (std::size_t i = 0; i < fam->ell(); ++i)
          if (fam->contains_dir(d, i)) l.push_back(static_cast<std::uint32_t>(i));
      }
      lists_.push_back(std::move(l));
      cursor_.push_back(0);
    }
  }

  // Returns the directions written this round.
  std::vector<DirId> inject(const AdversaryView& view, const std::vector<DirId>& dirs, std::vector<Emission>& out) {
    std::vector<DirId> used;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      auto& c = cursor_[k];
      const auto& l = lists_[k];
      if (c >= l.size()) continue;
      if (view.local_mode) {
        for (; c < l.size(); ++c) out.push_back({dirs[k], Message::flood(bit_, l[c])});
      } else {
        out.push_back({dirs[k], Message::flood(bit_, l[c++])});
      }
      used.push_back(dirs[k]);
    }
    return used;
  }

  bool pending() const {
    for (std::size_t k = 0; k < lists_.size(); ++k)
      if (cursor_[k] < lists_[k].size()) return true;
    return false;
  }

 private:
  std::uint8_t bit_;
  std::vector<std::uint32_t> fixed_;
  std::vector<std::vector<std::uint32_t>> lists_;
  std::vector<std::size_t> cursor_;
};

class PhaseTracker {
 public:
  // True when `view` is the first round seen of its phase.
  bool fresh(const AdversaryView& view) {
    const auto key = std::make_pair(view.phase.start, static_cast<int>(view.phase.kind));
    if (seen_ && key == last_) return false;
    seen_ = true;
    last_ = key;
    return true;
  }

 private:
  bool seen_ = false;
  std::pair<Round, int> last_{0, 0};
};

class ForgeFlood final : public AdversaryStrategy {
 public:
  ForgeFlood(std::uint8_t bit, std::vector<std::uint32_t> indices)
      : bit_(bit), indices_(indices), injector_(bit, std::move(indices)) {}
  std::string name() const override { return "forge_flood"; }
  nlohmann::json params() const override { return {{"bit", bit_}, {"indices", indices_}}; }
  void start(const Graph&, const EdgeSet& faults, const Protocol& p) override {
    dirs_ = fault_dirs(faults);
    protocol_ = &p;
  }
  void act(const AdversaryView& view, std::vector<Emission>& out) override {
    if (view.phase.kind != PhaseKind::flood) {
      echo_into(view, out);
      return;
    }
    if (tracker_.fresh(view)) injector_.reset(view, dirs_);
    echo_except(view, injector_.inject(view, dirs_, out), out);
  }
  Round next_active(Round r) const override {
    const auto p = protocol_->phase_at(r + 1);
    if (p.kind != PhaseKind::flood) return kNever;
    // A new flood phase or an unfinished injection list.
    if (p.start == r + 1 || injector_.pending()) return r + 1;
    return kNever;
  }

 private:
  std::uint8_t bit_;
  std::vector<std::uint32_t> indices_;
  FloodInjector injector_;
  PhaseTracker tracker_;
  std::vector<DirId> dirs_;
  const Protocol* protocol_ = nullptr;
};

Round iteration_offset(const PhaseInfo& p, Round r, std::uint32_t& k) {
  if (p.parallel || p.iteration_length == 0) {
    k = 0;
    return r - p.start;
  }
  k = static_cast<std::uint32_t>((r - p.start) / p.iteration_length);
  return (r - p.start) % p.iteration_length;
}

class ForgeAccept final : public AdversaryStrategy {
 public:
  ForgeAccept(std::uint8_t bit, bool spontaneous) : bit_(bit), spontaneous_(spontaneous), injector_(bit, {}) {}
  std::string name() const override { return "forge_accept"; }
  nlohmann::json params() const override { return {{"bit", bit_}, {"spontaneous", spontaneous_}}; }
  void start(const Graph&, const EdgeSet& faults, const Protocol& p) override {
    dirs_ = fault_dirs(faults);
    protocol_ = &p;
  }
  void act(const AdversaryView& view, std::vector<Emission>& out) override {
    const auto& p = view.phase;
    if (p.kind == PhaseKind::accept) {
      for (auto d : dirs_) out.push_back({d, Message::accept(bit_)});
      return;
    }
    if (!spontaneous_) {
      echo_into(view, out);
      return;
    }
    if (p.kind == PhaseKind::flood) {
      if (tracker_.fresh(view)) injector_.reset(view, dirs_);
      echo_except(view, injector_.inject(view, dirs_, out), out);
      return;
    }
    if (p.kind == PhaseKind::heard && p.family) {
      std::uint32_t k = 0;
      const Round o = iteration_offset(p, view.round, k);
      std::vector<DirId> used;
      if (o == 0) {
        for (auto d : dirs_) {
          if (p.parallel) {
            for (std::uint32_t j = 0; j < p.family->ell(); ++j)
              if (p.family->contains_dir(d, j)) out.push_back({d, Message::header(bit_, 0, j)});
          } else if (k < p.family->ell() && p.family->contains_dir(d, k)) {
            out.push_back({d, Message::header(bit_, 0)});
          } else {
            continue;
          }
          used.push_back(d);
        }
      }
      echo_except(view, used, out);
      return;
    }
    echo_into(view, out);
  }
  Round next_active(Round r) const override {
    const auto p = protocol_->phase_at(r + 1);
    if (p.kind == PhaseKind::accept) return r + 1 <= p.end ? r + 1 : kNever;
    if (!spontaneous_) return kNever;
    if (p.kind == PhaseKind::flood) return (p.start == r + 1 || injector_.pending()) ? r + 1 : kNever;
    if (p.kind == PhaseKind::heard) {
      if (p.parallel || p.iteration_length == 0) return p.start == r + 1 ? r + 1 : kNever;
      const Round off = (r + 1 - p.start) % p.iteration_length;
      const Round next = off == 0 ? r + 1 : r + 1 + (p.iteration_length - off);
      return next <= p.end ? next : kNever;
    }
    return kNever;
  }

 private:
  std::uint8_t bit_;
  bool spontaneous_;
  FloodInjector injector_;
  PhaseTracker tracker_;
  std::vector<DirId> dirs_;
  const Protocol* protocol_ = nullptr;
};

class ForgePath final : public AdversaryStrategy {
 public:
  ForgePath(std::uint8_t bit, NodeId source) : bit_(bit), source_(source) {}
  std::string name() const override { return "forge_path"; }
  nlohmann::json params() const override { return {{"bit", bit_}, {"source", source_}}; }
  void start(const Graph& g, const EdgeSet& faults, const Protocol& p) override {
    g_ = &g;
    protocol_ = &p;
    dirs_ = fault_dirs(faults);
    // BFS tree of g minus F rooted at the source.
    std::vector<std::uint32_t> dist(g.n(), kUnreachable);
    std::vector<NodeId> parent(g.n(), 0);
    std::vector<NodeId> queue{source_};
    dist[source_] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const NodeId u = queue[h];
      for (const auto& inc : g.incident(u)) {
        if (faults.contains(inc.edge) || dist[inc.neighbor] != kUnreachable) continue;
        dist[inc.neighbor] = dist[u] + 1;
        parent[inc.neighbor] = u;
        queue.push_back(inc.neighbor);
      }
    }
    paths_.clear();
    for (auto d : dirs_) {
      // Edges from the tail back to the source.
      std::vector<std::pair<NodeId, NodeId>> path;
      NodeId w = g.dir_tail(d);
      bool ok = dist[w] != kUnreachable;
      while (ok && w != source_) {
        path.emplace_back(w, parent[w]);
        w = parent[w];
      }
      paths_.push_back(ok ? std::optional(path) : std::nullopt);
    }
  }

  void act(const AdversaryView& view, std::vector<Emission>& out) override {
    const auto& p = view.phase;
    if (p.kind == PhaseKind::accept) {
      for (auto d : dirs_) out.push_back({d, Message::accept(bit_)});
      return;
    }
    if (p.kind != PhaseKind::heard || !p.family) {
      echo_into(view, out);
      return;
    }
    std::uint32_t k = 0;
    const Round o = iteration_offset(p, view.round, k);
    std::vector<DirId> used;
    for (std::size_t x = 0; x < dirs_.size(); ++x) {
      const auto& path = paths_[x];
      if (!path || o > path->size()) continue;
      const DirId d = dirs_[x];
      auto piece = [&](std::uint32_t inst) {
        if (o == 0) return Message::header(bit_, static_cast<std::uint32_t>(path->size()), inst);
        const auto& e = (*path)[o - 1];
        return Message::heard_edge(e.first, e.second, inst);
      };
      bool wrote = false;
      if (p.parallel) {
        for (std::uint32_t j = 0; j < p.family->ell(); ++j)
          if (p.family->contains_dir(d, j)) {
            out.push_back({d, piece(j)});
            wrote = true;
          }
      } else if (k < p.family->ell() && p.family->contains_dir(d, k)) {
        out.push_back({d, piece(0)});
        wrote = true;
      }
      if (wrote) used.push_back(d);
    }
    echo_except(view, used, out);
  }

  Round next_active(Round r) const override {
    const auto p = protocol_->phase_at(r + 1);
    if (p.kind == PhaseKind::accept) return r + 1 <= p.end ? r + 1 : kNever;
    if (p.kind != PhaseKind::heard || !p.family) return kNever;
    std::size_t longest = 0;
    bool any = false;
    for (const auto& path : paths_)
      if (path) {
        any = true;
        longest = std::max(longest, path->size());
      }
    if (!any) return kNever;
    std::uint32_t k = 0;
    const Round o = iteration_offset(p, r + 1, k);
    if (p.parallel || p.iteration_length == 0) return o <= longest ? r + 1 : kNever;
    auto active_in = [&](std::uint32_t j) {
      for (std::size_t x = 0; x < dirs_.size(); ++x)
        if (paths_[x] && p.family->contains_dir(dirs_[x], j)) return true;
      return false;
    };
    if (o <= longest && k < p.family->ell() && active_in(k)) return r + 1;
    for (std::uint32_t j = k + 1; j < p.family->ell(); ++j) {
      const Round st = p.start + Round{j} * p.iteration_length;
      if (st > p.end) break;
      if (active_in(j)) return st;
    }
    return kNever;
  }

 private:
  std::uint8_t bit_;
  NodeId source_;
  const Graph* g_ = nullptr;
  const Protocol* protocol_ = nullptr;
  std::vector<DirId> dirs_;
  std::vector<std::optional<std::vector<std::pair<NodeId, NodeId>>>> paths_;
};

class Scripted : public AdversaryStrategy {
 public:
  explicit Scripted(Schedule s) : schedule_(std::move(s)) {}
  std::string name() const override { return "scripted"; }
  nlohmann::json params() const override {
    std::size_t count = 0;
    for (const auto& [r, v] : schedule_) count += v.size();
    return {{"messages", count}};
  }
  void act(const AdversaryView& view, std::vector<Emission>& out) override {
    auto it = schedule_.find(view.round);
    if (it == schedule_.end()) return;
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  Round next_active(Round r) const override {
    auto it = schedule_.upper_bound(r);
    return it == schedule_.end() ? kNever : it->first;
  }

 protected:
  Schedule schedule_;
};

class DelayStress final : public Scripted {
 public:
  explicit DelayStress(std::uint8_t bit) : Scripted({}), bit_(bit) {}
  std::string name() const override { return "delay_stress"; }
  nlohmann::json params() const override { return {{"bit", bit_}}; }
  void start(const Graph& g, const EdgeSet& faults, const Protocol& p) override {
    g_ = &g;
    faults_ = faults;
    protocol_ = &p;
  }
  void act(const AdversaryView& view, std::vector<Emission>& out) override {
    if (view.phase.kind == PhaseKind::flood && view.phase.family && tracker_.fresh(view)) {
      auto more = delay_stress_schedule(*g_, *view.phase.family, faults_, view.round,
                                        view.phase.end - view.round + 1, bit_);
      for (auto& [r, v] : more) schedule_[r] = std::move(v);
    }
    Scripted::act(view, out);
  }
  Round next_active(Round r) const override {
    const auto p = protocol_->phase_at(r + 1);
    if (p.kind == PhaseKind::flood && p.start == r + 1) return r + 1;
    return Scripted::next_active(r);
  }

 private:
  std::uint8_t bit_;
  const Graph* g_ = nullptr;
  EdgeSet faults_;
  const Protocol* protocol_ = nullptr;
  PhaseTracker tracker_;
};

}  // namespace

Schedule schedule_from_transcript(const Transcript& t, const EdgeSet& faults) {
  Schedule s;
  for (const auto& rec : t.records)
    if (rec.delivered && faults.contains(rec.dir >> 1)) s[rec.round].push_back({rec.dir, *rec.delivered});
  return s;
}

Schedule schedule_from_jsonl(const std::string& text, const Graph& g, const EdgeSet& faults) {
  return schedule_from_transcript(transcript_from_jsonl(text, g), faults);
}

Schedule delay_stress_schedule(const Graph& g, const CoveringFamily& fam, const EdgeSet& faults, Round first_round,
                               Round rounds, std::uint8_t bit) {
  (void)g;
  Schedule s;
  for (auto d : fault_dirs(faults)) {
    Round r = first_round;
    for (std::size_t i = 0; i < fam.ell() && r < first_round + rounds; ++i) {
      if (!fam.contains_dir(d, i)) continue;
      s[r++].push_back({d, Message::flood(bit, static_cast<std::uint32_t>(i))});
    }
  }
  return s;
}

std::unique_ptr<AdversaryStrategy> make_silent() { return std::make_unique<Silent>(); }
std::unique_ptr<AdversaryStrategy> make_echo() { return std::make_unique<Echo>(); }
std::unique_ptr<AdversaryStrategy> make_bit_flip() { return std::make_unique<BitFlip>(); }
std::unique_ptr<AdversaryStrategy> make_forge_flood(std::uint8_t bit, std::vector<std::uint32_t> indices) {
  return std::make_unique<ForgeFlood>(bit, std::move(indices));
}
std::unique_ptr<AdversaryStrategy> make_forge_accept(std::uint8_t bit, bool spontaneous) {
  return std::make_unique<ForgeAccept>(bit, spontaneous);
}
std::unique_ptr<AdversaryStrategy> make_forge_path(std::uint8_t bit, NodeId source) {
  return std::make_unique<ForgePath>(bit, source);
}
std::unique_ptr<AdversaryStrategy> make_scripted(Schedule schedule) {
  return std::make_unique<Scripted>(std::move(schedule));
}
std::unique_ptr<AdversaryStrategy> make_delay_stress(std::uint8_t bit) { return std::make_unique<DelayStress>(bit); }

std::vector<std::string> strategy_names() {
  return {"silent", "echo", "bit_flip", "forge_flood", "forge_accept", "forge_path", "scripted", "delay_stress"};
}

std::unique_ptr<AdversaryStrategy> make_strategy(const std::string& name, const nlohmann::json& params,
                                                 const Graph& g, const EdgeSet& faults) {
  if (!params.is_null() && !params.is_object()) throw std::invalid_argument("adversary parameters must be an object");
  if (params.is_null()) return make_strategy(name, nlohmann::json::object(), g, faults);
  const auto bit = static_cast<std::uint8_t>(params.value("bit", 1) & 1);
  if (name == "silent") return make_silent();
  if (name == "echo") return make_echo();
  if (name == "bit_flip") return make_bit_flip();
  if (name == "forge_flood")
    return make_forge_flood(bit, params.value("indices", std::vector<std::uint32_t>{}));
  if (name == "forge_accept") return make_forge_accept(bit, params.value("spontaneous", false));
  if (name == "forge_path") return make_forge_path(bit, params.value("source", NodeId{0}));
  if (name == "scripted") return make_scripted(schedule_from_jsonl(params.value("schedule", std::string{}), g, faults));
  if (name == "delay_stress") return make_delay_stress(bit);
  throw std::invalid_argument("unknown adversary strategy '" + name + "'");
}

}  // namespace advcongest
