// Scenario files, the append-only event log with its digest chain, and
// deterministic replay verification.
#pragma once

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "pmx/engine.hpp"

namespace pmx {

// Process exit codes shared by the library runner and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 2;
inline constexpr int kExitCommand = 3;
inline constexpr int kExitParse = 4;
inline constexpr int kExitDigest = 5;

inline constexpr const char* kScenarioSchema = "pmx-scenario-v1";
inline constexpr const char* kLogSchema = "pmx-log-v1";

struct RunResult {
    int exit_code = kExitOk;
    std::vector<std::string> log_lines;  // header first, then one record per command
    nlohmann::json final_snapshot;
    std::string error;       // set when exit_code != 0
    std::size_t error_seq = 0;  // sequence number of the failing command
};

struct ReplayResult {
    int exit_code = kExitOk;
    std::size_t records = 0;
    std::size_t mismatch_seq = 0;  // first diverging record, when exit_code == kExitDigest
    std::string error;
    nlohmann::json final_snapshot;
};

// Parse a scenario header line into an engine config; returns defaults when
// the first line is a command instead.
EngineConfig config_from_header(const nlohmann::json& header);

// Runs a scenario (JSON-lines, optional header record first). Every accepted
// command appends one log record; a failing command is reported but not
// logged, earlier records stand.
RunResult run_scenario(std::istream& in);
RunResult run_scenario_text(const std::string& text);

// Re-executes a log from genesis; every recomputed record must match the
// recorded bytes exactly.
ReplayResult replay_log(const std::vector<std::string>& lines);
ReplayResult replay_log_stream(std::istream& in);

// State reconstruction at a record boundary (0 = genesis).
nlohmann::json snapshot_at(const std::vector<std::string>& lines, std::size_t seq);

std::vector<std::string> read_lines(std::istream& in);

}  // namespace pmx
