#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "advcongest/engine.hpp"
#include "advcongest/graph.hpp"
#include "advcongest/protocols.hpp"

namespace advcongest {

inline constexpr int kCsvSchemaVersion = 1;

// Raised for malformed experiment configurations; the message names the field.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GraphSpec {
  std::string kind = "circulant";
  nlohmann::json params = {{"n", 16}, {"offsets", {1, 2}}};
  std::uint64_t seed = 1;
  // When set, an edge list or generator object accepted by graph_from_json.
  std::optional<nlohmann::json> inline_graph;
};

struct ProtocolSpec {
  std::string name = "bb1_known";
  NodeId source = 0;
  std::optional<std::uint8_t> m0;  // none = drawn per trial
  std::optional<std::uint32_t> D_prime;  // bb1_known; default diameter(g)
  std::optional<std::uint32_t> L;        // bbt; default (6t+2) * diameter(g)
  std::optional<double> phi_estimate;    // expander_broadcast; default from the graph
  BB1Config bb1;
  BBTConfig bbt;
  DoublingConfig doubling;
  double c_L = 1.0;
  ExpanderFamilyParams expander;
};

struct AdversarySpec {
  std::string name = "silent";
  nlohmann::json params = nlohmann::json::object();
};

enum class FaultMode { explicit_list, random, worst_of_k };

struct FaultSpec {
  FaultMode mode = FaultMode::random;
  std::vector<std::pair<NodeId, NodeId>> edges;  // explicit_list
  std::optional<std::uint32_t> count;            // default t
  std::uint32_t k = 8;                           // worst_of_k candidates
};

struct ExperimentConfig {
  GraphSpec graph;
  ProtocolSpec protocol;
  std::uint32_t t = 1;
  AdversarySpec adversary;
  FaultSpec faults;
  std::uint32_t trials = 1;
  std::uint64_t seed = 1;
  std::uint32_t beta = 8;
  WakeMode wake = WakeMode::simultaneous;
  bool local_mode = false;
  bool instrument = false;
  bool record_transcript = false;
  Round max_rounds = 0;
};

// Defaults are filled in for every missing field; unknown fields and type
// mismatches raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
// Applies "a.b.c=value" to a config document. The value is parsed as JSON
// when possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

Graph build_graph(const GraphSpec& spec);

struct CandidateSummary {
  EdgeSet faults;
  bool safety = true;
  bool liveness = true;
  Round rounds_used = 0;
  std::optional<std::uint32_t> diameter_estimate;
};

struct TrialOutcome {
  std::uint32_t trial = 0;
  std::uint64_t seed = 0;
  std::uint8_t m0 = 0;
  EdgeSet faults;  // of the reported (worst) run
  RunReport report;
  Transcript transcript;
  std::vector<CandidateSummary> candidates;
  bool all_safe = true;
  bool all_live = true;
};

std::uint64_t trial_seed(const ExperimentConfig& c, std::uint32_t trial);

struct ExperimentContext {
  explicit ExperimentContext(const ExperimentConfig& c);
  ExperimentConfig config;
  Graph graph;
  std::uint32_t diameter = 0;
};

// One trial: draws the fault set(s), runs, and keeps the worst run for
// worst_of_k.
TrialOutcome run_trial(const ExperimentContext& ctx, std::uint32_t trial);
std::vector<TrialOutcome> run_experiment(const ExperimentConfig& c);

// Runs one configured protocol against one fault set.
RunResult run_once(const ExperimentContext& ctx, std::uint64_t seed, std::uint8_t m0, const EdgeSet& faults);

std::vector<EdgeSet> draw_fault_sets(const ExperimentContext& ctx, std::uint64_t seed);

std::string csv_header();
std::string csv_row(const ExperimentContext& ctx, const TrialOutcome& o);
nlohmann::json trial_report(const ExperimentContext& ctx, const TrialOutcome& o);

}  // namespace advcongest
