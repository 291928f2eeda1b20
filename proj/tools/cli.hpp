#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace advcongest::cli {

// Exit codes shared by all subcommands.
inline constexpr int kOk = 0;
inline constexpr int kVerdictFailed = 1;
inline constexpr int kConfigError = 2;

// Reads the config file (empty path = all defaults) and applies the
// key=value overrides in order.
nlohmann::json load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& sets);

// Runs all trials; writes config.json, trial_NNNN.json (and .jsonl when
// transcripts are recorded) and results.csv into out.
int cmd_simulate(const nlohmann::json& doc, const std::filesystem::path& out, std::ostream& log);

// One simulate per value of `vary`; writes sweep.csv plus one subdirectory
// of simulate output per value.
int cmd_sweep(const nlohmann::json& doc, const std::string& vary, const std::vector<std::string>& values,
              const std::filesystem::path& out, std::ostream& log);

struct CoverOptions {
  std::string flavor = "hash";  // hash, sampled, expander, expander_directed, trivial
  std::optional<std::uint32_t> L;  // default 7 * diameter
  std::uint32_t k = 1;
  std::uint32_t seeds = 1;
  bool relaxed = false;  // force the distance form even where the exhaustive check applies
};
int cmd_verify_cover(const nlohmann::json& doc, const CoverOptions& opt, const std::filesystem::path& out,
                     std::ostream& log);

int cmd_conductance(const nlohmann::json& doc, const std::filesystem::path& out, std::ostream& log);

// Re-executes a recorded trial with the adversary replaced by the recorded
// deliveries on F and compares the new transcript with the old one.
int cmd_replay(const std::filesystem::path& report, const std::filesystem::path& transcript,
               const std::filesystem::path& out, std::ostream& log);

}  // namespace advcongest::cli
