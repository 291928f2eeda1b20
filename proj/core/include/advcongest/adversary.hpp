#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "advcongest/covering.hpp"
#include "advcongest/engine.hpp"

namespace advcongest {

// Messages the adversary puts on F directions, keyed by round.
using Schedule = std::map<Round, std::vector<Emission>>;

// Uses the delivered side of every record on an F direction.
Schedule schedule_from_transcript(const Transcript& t, const EdgeSet& faults);
Schedule schedule_from_jsonl(const std::string& text, const Graph& g, const EdgeSet& faults);

// Keeps both directions of every F edge busy with flood messages of low
// index, so that honest messages queue behind them. Rounds are absolute;
// the flood phase occupies [first_round, first_round + rounds).
Schedule delay_stress_schedule(const Graph& g, const CoveringFamily& fam, const EdgeSet& faults, Round first_round,
                               Round rounds, std::uint8_t bit);

std::unique_ptr<AdversaryStrategy> make_silent();
std::unique_ptr<AdversaryStrategy> make_echo();
std::unique_ptr<AdversaryStrategy> make_bit_flip();
// Empty index list: every index whose subgraph contains the F direction.
std::unique_ptr<AdversaryStrategy> make_forge_flood(std::uint8_t bit, std::vector<std::uint32_t> indices = {});
// With spontaneous set, the strategy also opens fake broadcasts of `bit`
// from both endpoints in every flood and heard phase.
std::unique_ptr<AdversaryStrategy> make_forge_accept(std::uint8_t bit, bool spontaneous = false);
// Fabricated heard bundles carrying `bit` along genuine paths of g minus F.
// The source is needed to build the claimed paths.
std::unique_ptr<AdversaryStrategy> make_forge_path(std::uint8_t bit, NodeId source);
std::unique_ptr<AdversaryStrategy> make_scripted(Schedule schedule);
// Delay stress generated per flood phase from the public family.
std::unique_ptr<AdversaryStrategy> make_delay_stress(std::uint8_t bit);

// Names: silent, echo, bit_flip, forge_flood, forge_accept, forge_path,
// scripted, delay_stress. Parameters: bit, indices, spontaneous, source,
// schedule (JSON-lines text). Throws std::invalid_argument on unknown names.
std::unique_ptr<AdversaryStrategy> make_strategy(const std::string& name, const nlohmann::json& params,
                                                 const Graph& g, const EdgeSet& faults);
std::vector<std::string> strategy_names();

}  // namespace advcongest
