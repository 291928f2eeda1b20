#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "advcongest/covering.hpp"
#include "advcongest/graph.hpp"
#include "advcongest/message.hpp"

namespace advcongest {

using Round = std::uint64_t;
inline constexpr Round kNever = std::numeric_limits<Round>::max();

// A message on one edge direction. The sender is the tail of dir.
struct Emission {
  DirId dir = 0;
  Message msg;
};

enum class WakeMode { simultaneous, triggered };

struct EngineConfig {
  std::uint32_t t = 1;
  std::uint32_t beta = 8;
  WakeMode wake = WakeMode::simultaneous;
  bool local_mode = false;
  bool record_transcript = false;
  // Extra cap on rounds on top of the protocol horizon (0 = none).
  Round max_rounds = 0;
};

enum class PhaseKind { idle, flood, accept, heard, control };
std::string to_string(PhaseKind k);

// Public schedule information. Everything here is known to every node and,
// by the model, to the adversary.
struct PhaseInfo {
  PhaseKind kind = PhaseKind::idle;
  std::string label;
  Round start = 0;  // first round of the phase
  Round end = 0;    // last round of the phase
  const CoveringFamily* family = nullptr;
  Round iteration_length = 0;  // heard phases: rounds per subgraph iteration
  std::uint32_t L = 0;
  std::uint32_t t = 1;
  bool parallel = false;  // LOCAL mode: all subgraphs at once
};

struct QueueDelayRecord {
  NodeId node = 0;
  std::uint32_t index = 0;
  std::uint8_t bit = 0;
  std::uint32_t eta = 0;     // hops on the delivery path
  std::uint64_t delay = 0;   // rounds spent waiting in queues along the path
  Round arrival = 0;         // phase-local round of first receipt
  bool clean = false;        // path free of adversarial edges
};

struct PhaseCount {
  std::string name;
  Round rounds = 0;
};

struct RunReport {
  std::string protocol;
  std::vector<std::optional<std::uint8_t>> outputs;
  std::optional<std::uint8_t> expected;  // m0, or none when no honest source acts
  Round rounds_used = 0;
  std::vector<PhaseCount> phases;
  std::vector<QueueDelayRecord> queue_delay;
  std::size_t width = 0;
  std::size_t ell = 0;
  bool safety = true;
  bool liveness = true;
  bool horizon_exceeded = false;
  std::optional<std::uint32_t> diameter_estimate;
  std::uint64_t honest_messages = 0;
  std::uint64_t adversary_messages = 0;
  std::uint64_t adversary_dropped = 0;    // writes outside F, discarded
  std::uint64_t adversary_truncated = 0;  // oversized messages cut to B bits
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const RunReport& r);

struct TranscriptRecord {
  Round round = 0;
  DirId dir = 0;
  std::optional<Message> sent;
  std::optional<Message> delivered;
};

struct Transcript {
  std::vector<TranscriptRecord> records;
  bool operator==(const Transcript& o) const;
};

std::string to_jsonl(const Transcript& t, const Graph& g);
Transcript transcript_from_jsonl(const std::string& text, const Graph& g);

class RunContext;

// Node state machines for a whole network. Implementations keep one state
// per node and let each node act only on its own state, its incident edges,
// the messages it received and the public parameters.
class Protocol {
 public:
  virtual ~Protocol() = default;
  virtual std::string name() const = 0;
  virtual nlohmann::json public_params() const = 0;

  virtual void start(const RunContext& ctx) = 0;
  // Append the honest emissions of round r.
  virtual void emit(Round r, std::vector<Emission>& out) = 0;
  // Deliveries of round r, sorted by direction id.
  virtual void deliver(Round r, std::span<const Emission> in) = 0;
  // Earliest round > r in which some node may emit or change state without
  // further input. kNever when the protocol is quiescent forever.
  virtual Round next_active(Round r) const = 0;
  virtual bool finished() const = 0;
  // Round in which the last node terminated (valid once finished()).
  virtual Round completion_round() const = 0;
  virtual Round horizon() const = 0;
  virtual PhaseInfo phase_at(Round r) const = 0;
  // Nodes awake at round 1 under triggered wake-up.
  virtual std::vector<NodeId> initiators() const = 0;
  virtual void fill_report(RunReport& rep) const = 0;
};

struct AdversaryView {
  const Graph& graph;
  const EdgeSet& faults;
  const Protocol& protocol;
  const PhaseInfo& phase;
  Round round;
  // All honest emissions of this round (full visibility, rushing).
  std::span<const Emission> honest;
  // The subset of honest emissions on directions of F.
  std::span<const Emission> honest_on_faults;
  // Recorded history; null unless the run records a transcript.
  const Transcript* transcript;
  const Encoding& encoding;
  bool local_mode;
  std::span<const std::uint64_t> node_seeds;
};

class AdversaryStrategy {
 public:
  virtual ~AdversaryStrategy() = default;
  virtual std::string name() const = 0;
  virtual nlohmann::json params() const { return nlohmann::json::object(); }
  virtual void start(const Graph& /*g*/, const EdgeSet& /*faults*/, const Protocol& /*p*/) {}
  // Messages for the directions of F in this round.
  virtual void act(const AdversaryView& view, std::vector<Emission>& out) = 0;
  // Earliest round > r in which the strategy may send without seeing honest
  // traffic on F. kNever for purely reactive strategies.
  virtual Round next_active(Round /*r*/) const { return kNever; }
};

class RunContext {
 public:
  const Graph& graph() const { return *graph_; }
  const EngineConfig& config() const { return *config_; }
  bool awake(NodeId v) const { return awake_[v] != 0; }
  std::uint64_t node_seed(NodeId v) const { return seeds_[v]; }
  std::uint32_t bandwidth_bits() const;

 private:
  friend class Engine;
  const Graph* graph_ = nullptr;
  const EngineConfig* config_ = nullptr;
  std::vector<char> awake_;
  std::vector<std::uint64_t> seeds_;
};

struct RunResult {
  RunReport report;
  Transcript transcript;
};

// Synchronous round executor. Each processed round: honest emissions, then
// the adversary (which sees them) overrides the directions of F, then
// delivery and state transitions. Rounds in which nothing can happen are
// skipped but still counted.
class Engine {
 public:
  Engine(const Graph& g, EngineConfig cfg, std::uint64_t seed = 0);
  RunResult run(Protocol& protocol, AdversaryStrategy& adversary, const EdgeSet& faults);

 private:
  const Graph& g_;
  EngineConfig cfg_;
  std::uint64_t seed_;
};

RunResult run(const Graph& g, Protocol& protocol, AdversaryStrategy& adversary, const EdgeSet& faults,
              EngineConfig cfg, std::uint64_t seed = 0);
RunResult run_local_mode(const Graph& g, Protocol& protocol, AdversaryStrategy& adversary, const EdgeSet& faults,
                         EngineConfig cfg, std::uint64_t seed = 0);

// Thrown when an honest node breaks the model (oversized message, two
// messages on one direction in CONGEST mode, sleeping node sending).
struct ProtocolViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace advcongest
