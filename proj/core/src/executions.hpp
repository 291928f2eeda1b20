#pragma once

// Single broadcast executions occupying a fixed window of rounds. The
// public protocols run one of these directly or chain several of them.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "advcongest/engine.hpp"
#include "advcongest/protocols.hpp"

namespace advcongest::detail {

class Execution {
 public:
  virtual ~Execution() = default;
  Round begin() const { return base_ + 1; }
  Round end() const { return base_ + length_; }
  Round length() const { return length_; }

  virtual void emit(Round r, std::vector<Emission>& out) = 0;
  virtual void deliver(Round r, std::span<const Emission> in) = 0;
  // Earliest round in (r, end()] with activity; end() when nothing else.
  virtual Round next_active(Round r) const = 0;
  virtual PhaseInfo phase_at(Round r) const = 0;
  virtual std::optional<std::uint8_t> accepted(NodeId v) const = 0;
  virtual void add_phase_counts(std::vector<PhaseCount>& out) const = 0;
  virtual const CoveringFamily& family() const = 0;

 protected:
  Round base_ = 0;
  Round length_ = 0;
};

struct ExecEnv {
  const Graph* graph = nullptr;
  const RunContext* ctx = nullptr;          // for wake state
  const std::vector<char>* participants = nullptr;  // null = everyone
  bool participates(NodeId v) const {
    if (participants && !(*participants)[v]) return false;
    return !ctx || ctx->awake(v);
  }
};

class BB1Execution final : public Execution {
 public:
  BB1Execution(ExecEnv env, std::shared_ptr<const CoveringFamily> fam, std::size_t width, const BB1Config& cfg,
               std::vector<NodeId> sources, std::uint8_t payload, Round base, std::string label);

  // A source starts its injection schedule at local round `start`.
  void add_source(NodeId v, Round start);

  void emit(Round r, std::vector<Emission>& out) override;
  void deliver(Round r, std::span<const Emission> in) override;
  Round next_active(Round r) const override;
  PhaseInfo phase_at(Round r) const override;
  std::optional<std::uint8_t> accepted(NodeId v) const override;
  void add_phase_counts(std::vector<PhaseCount>& out) const override;
  const CoveringFamily& family() const override { return *fam_; }

  Round flood_rounds() const { return r1_; }
  Round accept_rounds() const { return r2_; }
  std::size_t width() const { return width_; }
  std::vector<QueueDelayRecord> queue_delay() const;
  std::uint64_t stored_messages() const { return stored_total_; }

 private:
  bool stored(NodeId v, std::uint64_t key) const {
    return (stored_[v * words_ + key / 64] >> (key % 64)) & 1u;
  }
  void set_stored(NodeId v, std::uint64_t key) { stored_[v * words_ + key / 64] |= std::uint64_t{1} << (key % 64); }
  bool injection_pending(Round local) const;
  void push(NodeId v, std::uint64_t key);
  const std::vector<std::uint32_t>& absent(EdgeId e);

  ExecEnv env_;
  std::shared_ptr<const CoveringFamily> fam_;
  std::size_t width_;
  BB1Config cfg_;
  std::uint8_t payload_;
  std::string label_;
  std::size_t ell_;
  Round r1_ = 0, r2_ = 0;
  std::vector<char> is_source_;
  std::vector<std::pair<NodeId, Round>> starts_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> stored_;
  std::vector<std::vector<std::uint64_t>> heap_;  // min-heaps of keys 2*i+bit
  std::vector<NodeId> busy_;
  std::vector<char> in_busy_;
  std::vector<std::optional<std::uint8_t>> accepted_;
  std::vector<std::pair<NodeId, std::uint8_t>> relay_;  // accept relays due next round
  std::vector<std::vector<std::uint32_t>> absent_cache_;
  std::vector<char> absent_ready_;
  std::uint64_t stored_total_ = 0;

  // Queue-delay instrumentation, per (node, key).
  bool instrument_ = false;
  std::vector<char> audit_fault_;
  struct Track {
    std::uint32_t arrival = 0;
    std::uint32_t sent = 0;
    std::uint32_t eta = 0;
    std::uint64_t delay = 0;
    bool clean = true;
  };
  std::vector<Track> track_;
};

class BBTExecution final : public Execution {
 public:
  BBTExecution(ExecEnv env, std::shared_ptr<const CoveringFamily> fam, std::uint32_t L, std::uint32_t t,
               const BBTConfig& cfg, std::vector<NodeId> sources, std::uint8_t payload,
               std::optional<NodeId> known_source, Round base, bool local_mode, std::string label);

  void emit(Round r, std::vector<Emission>& out) override;
  void deliver(Round r, std::span<const Emission> in) override;
  Round next_active(Round r) const override;
  PhaseInfo phase_at(Round r) const override;
  std::optional<std::uint8_t> accepted(NodeId v) const override;
  void add_phase_counts(std::vector<PhaseCount>& out) const override;
  const CoveringFamily& family() const override { return *fam_; }

  struct Bundle {
    std::uint8_t bit = 0;
    std::uint32_t iteration = 0;
    std::vector<EdgeKey> path;  // sorted, includes the receiving edge
    std::vector<EdgeKey> order; // as received, receiving edge first
    bool is_void = false;
  };
  const std::vector<Bundle>& bundles(NodeId v) const { return archive_[v]; }
  std::uint64_t voided_bundles() const { return voided_; }

 private:
  struct Stream {
    std::uint32_t iteration = 0;
    DirId from = 0;
    Round header_round = 0;
    std::uint32_t len = 0;
    std::uint8_t bit = 0;
    std::vector<EdgeKey> edges;  // incoming edges received so far
    Round last_input = 0;
    bool is_void = false;
    bool complete = false;
    bool done_sending = false;
    std::int64_t archived = -1;
  };

  std::uint32_t iteration_of(Round r) const;
  Round iteration_start(std::uint32_t k) const;
  Round iteration_last(std::uint32_t k) const;
  bool in_flood(Round r) const { return r >= begin() && r < begin() + flood_len_; }
  void finish_stream(NodeId v, Stream& s);

  ExecEnv env_;
  std::shared_ptr<const CoveringFamily> fam_;
  std::uint32_t L_, t_;
  BBTConfig cfg_;
  std::uint8_t payload_;
  std::optional<NodeId> known_source_;
  bool local_;
  std::string label_;
  std::size_t ell_;
  Round iter_len_ = 0;
  Round flood_len_ = 0;
  Round accept_len_ = 0;
  std::uint32_t max_len_ = 0;
  std::vector<char> is_source_;
  std::vector<NodeId> sources_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> adopted_;
  std::vector<std::vector<Stream>> streams_;
  std::vector<std::vector<Bundle>> archive_;
  std::vector<std::optional<std::uint8_t>> accepted_;
  std::vector<std::pair<NodeId, std::uint8_t>> relay_;
  std::vector<std::unordered_map<std::uint64_t, char>> verdict_cache_;
  std::uint64_t voided_ = 0;
};

}  // namespace advcongest::detail
