#include "pmx/scenario.hpp"

#include <sstream>

#include "pmx/digest.hpp"

namespace pmx {

using nlohmann::json;

namespace {

// Scenario values are micro-unit integers; floats would break bit-exact
// replay, so they are rejected outright.
void reject_floats(const json& j) {
    if (j.is_number_float())
        fail(Err::ParseError, "floating-point values are not allowed; use micro-unit integers");
    if (j.is_object())
        for (const auto& [_, v] : j.items()) reject_floats(v);
    if (j.is_array())
        for (const auto& v : j) reject_floats(v);
}

json parse_line(const std::string& line, std::size_t lineno, Err err_kind) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
        throw Error(err_kind, "line " + std::to_string(lineno) + ": malformed JSON");
    return j;
}

bool is_header(const json& j) { return j.is_object() && j.contains("schema"); }

json log_header(const json& scenario_header) {
    return {{"schema", kLogSchema}, {"digest_algo", "sha256"}, {"scenario", scenario_header}};
}

// One log record. The chain digest covers the previous digest plus the
// canonical record body, so any byte flip surfaces at that exact record.
json make_record(std::size_t seq, const Command& cmd, const json& result,
                 const std::string& state_digest, const std::string& prev_digest) {
    json body = {{"cmd", cmd.payload},
                 {"result", result},
                 {"seq", seq},
                 {"state", state_digest},
                 {"tick", cmd.tick}};
    body["digest"] = sha256_hex(prev_digest + body.dump());
    return body;
}

}  // namespace

EngineConfig config_from_header(const json& header) {
    EngineConfig config;
    if (!header.is_object()) return config;
    config.numeraire = header.value("numeraire", config.numeraire);
    config.seed = header.value("seed", config.seed);
    config.taker_fee_bps = header.value("taker_fee_bps", config.taker_fee_bps);
    return config;
}

std::vector<std::string> read_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        lines.push_back(line);
    }
    return lines;
}

RunResult run_scenario(std::istream& in) {
    auto lines = read_lines(in);
    RunResult result;

    json scenario_header = json::object();
    std::size_t first_command = 0;
    try {
        if (!lines.empty()) {
            json first = parse_line(lines[0], 1, Err::ParseError);
            if (is_header(first)) {
                require(first.at("schema") == kScenarioSchema, Err::ParseError,
                        "unsupported scenario schema");
                reject_floats(first);
                scenario_header = first;
                first_command = 1;
            }
        }
    } catch (const Error& e) {
        result.exit_code = kExitParse;
        result.error = e.what();
        return result;
    }

    Engine engine(config_from_header(scenario_header));
    json header = log_header(scenario_header);
    result.log_lines.push_back(header.dump());
    std::string prev_digest = sha256_hex(header.dump());

    std::size_t seq = 0;
    for (std::size_t i = first_command; i < lines.size(); ++i) {
        ++seq;
        try {
            json j = parse_line(lines[i], i + 1, Err::ParseError);
            reject_floats(j);
            Command cmd = command_from_json(j);
            cmd.payload = json::parse(cmd.payload.dump());  // canonical echo
            json cmd_result;
            try {
                cmd_result = engine.apply(cmd);
            } catch (const json::exception& e) {
                // missing or ill-typed payload fields
                fail(Err::ParseError, std::string("malformed command: ") + e.what());
            }
            json record = make_record(seq, cmd, cmd_result, engine.snapshot_digest(), prev_digest);
            prev_digest = record.at("digest").get<std::string>();
            result.log_lines.push_back(record.dump());
        } catch (const Error& e) {
            result.error = e.what();
            result.error_seq = seq;
            switch (e.code()) {
                case Err::AssertionFailed: result.exit_code = kExitAssertion; break;
                case Err::ParseError: result.exit_code = kExitParse; break;
                default: result.exit_code = kExitCommand; break;
            }
            result.final_snapshot = engine.snapshot();
            return result;
        }
    }
    result.final_snapshot = engine.snapshot();
    return result;
}

RunResult run_scenario_text(const std::string& text) {
    std::istringstream in(text);
    return run_scenario(in);
}

ReplayResult replay_log(const std::vector<std::string>& lines) {
    ReplayResult result;
    if (lines.empty()) {
        result.exit_code = kExitParse;
        result.error = "empty log";
        return result;
    }

    json header;
    try {
        header = parse_line(lines[0], 1, Err::LogCorrupt);
        require(header.is_object() && header.value("schema", "") == kLogSchema, Err::LogCorrupt,
                "missing pmx-log-v1 header");
        require(header.value("digest_algo", "") == "sha256", Err::LogCorrupt,
                "unsupported digest algorithm");
    } catch (const Error& e) {
        result.exit_code = kExitParse;
        result.error = e.what();
        return result;
    }

    Engine engine(config_from_header(header.value("scenario", json::object())));
    std::string prev_digest = sha256_hex(header.dump());

    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::size_t seq = i;
        result.records = seq;
        try {
            json recorded = parse_line(lines[i], i + 1, Err::LogCorrupt);
            require(recorded.is_object() && recorded.contains("cmd") && recorded.contains("seq"),
                    Err::LogCorrupt, "record " + std::to_string(seq) + " lacks cmd/seq");
            require(recorded.at("seq").is_number_unsigned() &&
                        recorded.at("seq").get<std::size_t>() == seq,
                    Err::LogCorrupt, "sequence gap at record " + std::to_string(seq));

            Command cmd = command_from_json(recorded.at("cmd"));
            json cmd_result;
            try {
                cmd_result = engine.apply(cmd);
            } catch (const Error& e) {
                fail(Err::DigestMismatch,
                     "record " + std::to_string(seq) + ": command now fails: " + e.what());
            } catch (const json::exception& e) {
                fail(Err::DigestMismatch,
                     "record " + std::to_string(seq) + ": command now malformed: " + e.what());
            }
            json expected =
                make_record(seq, cmd, cmd_result, engine.snapshot_digest(), prev_digest);
            if (expected.dump() != lines[i])
                fail(Err::DigestMismatch, "record " + std::to_string(seq) +
                                              " diverges from the recomputed state");
            prev_digest = expected.at("digest").get<std::string>();
        } catch (const Error& e) {
            result.error = e.what();
            result.mismatch_seq = seq;
            result.exit_code = e.code() == Err::LogCorrupt ? kExitParse : kExitDigest;
            return result;
        } catch (const json::exception& e) {
            result.error = std::string("corrupt record: ") + e.what();
            result.mismatch_seq = seq;
            result.exit_code = kExitParse;
            return result;
        }
    }
    result.final_snapshot = engine.snapshot();
    return result;
}

ReplayResult replay_log_stream(std::istream& in) {
    auto lines = read_lines(in);
    return replay_log(lines);
}

json snapshot_at(const std::vector<std::string>& lines, std::size_t seq) {
    require(!lines.empty(), Err::LogCorrupt, "empty log");
    json header = parse_line(lines[0], 1, Err::LogCorrupt);
    require(header.is_object() && header.value("schema", "") == kLogSchema, Err::LogCorrupt,
            "missing pmx-log-v1 header");
    Engine engine(config_from_header(header.value("scenario", json::object())));
    require(seq < lines.size(), Err::LogCorrupt, "sequence beyond end of log");
    for (std::size_t i = 1; i <= seq; ++i) {
        json recorded = parse_line(lines[i], i + 1, Err::LogCorrupt);
        engine.apply(command_from_json(recorded.at("cmd")));
    }
    return engine.snapshot();
}

}  // namespace pmx
