// pmx command-line front door: run scenarios, replay and inspect event logs.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "pmx/scenario.hpp"

namespace {

using nlohmann::json;

std::vector<std::string> load_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << "\n";
        std::exit(pmx::kExitParse);
    }
    return pmx::read_lines(in);
}

int cmd_run(const std::string& scenario_path, const std::string& log_path,
            const std::string& snapshot_path, bool quiet) {
    std::ifstream in(scenario_path);
    if (!in) {
        std::cerr << "cannot open " << scenario_path << "\n";
        return pmx::kExitParse;
    }
    auto result = pmx::run_scenario(in);

    if (!log_path.empty()) {
        std::ofstream out(log_path);
        for (const auto& line : result.log_lines) out << line << "\n";
    } else if (!quiet) {
        for (const auto& line : result.log_lines) std::cout << line << "\n";
    }
    if (!snapshot_path.empty() && !result.final_snapshot.is_null()) {
        std::ofstream out(snapshot_path);
        out << result.final_snapshot.dump() << "\n";
    }
    if (result.exit_code != pmx::kExitOk) {
        std::cerr << "error at seq " << result.error_seq << ": " << result.error << "\n";
    } else if (!quiet) {
        std::cerr << "ok: " << (result.log_lines.size() - 1) << " commands applied\n";
    }
    return result.exit_code;
}

int cmd_replay(const std::string& log_path) {
    auto result = pmx::replay_log(load_lines(log_path));
    if (result.exit_code == pmx::kExitOk) {
        std::cerr << "ok: " << result.records << " records verified\n";
    } else {
        std::cerr << "replay failed at record " << result.mismatch_seq << ": " << result.error
                  << "\n";
    }
    return result.exit_code;
}

int cmd_snapshot(const std::string& log_path, long long at) {
    auto lines = load_lines(log_path);
    std::size_t seq = at < 0 ? lines.size() - 1 : static_cast<std::size_t>(at);
    try {
        std::cout << pmx::snapshot_at(lines, seq).dump() << "\n";
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return pmx::kExitParse;
    }
    return pmx::kExitOk;
}

int cmd_check_solvency(const std::string& log_path) {
    auto lines = load_lines(log_path);
    if (lines.empty()) {
        std::cerr << "empty log\n";
        return pmx::kExitParse;
    }
    try {
        json header = json::parse(lines[0]);
        pmx::Engine engine(pmx::config_from_header(header.value("scenario", json::object())));
        for (std::size_t i = 1; i < lines.size(); ++i) {
            json record = json::parse(lines[i]);
            engine.apply(pmx::command_from_json(record.at("cmd")));
            // apply() already audits; reaching here means solvency held at seq i
        }
        for (const auto& [id, spec] : engine.markets()) {
            json cmd = {{"verb", "check_solvency"}, {"market", id}, {"tick", engine.clock()}};
            std::cout << engine.apply(pmx::command_from_json(cmd)).dump() << "\n";
        }
        std::cerr << "ok: solvency held after every record\n";
        return pmx::kExitOk;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return pmx::kExitCommand;
    }
}

int cmd_arb_scan(const std::string& log_path, long long at, bool strict) {
    auto lines = load_lines(log_path);
    try {
        std::size_t seq = at < 0 ? lines.size() - 1 : static_cast<std::size_t>(at);
        json header = json::parse(lines.at(0));
        pmx::Engine engine(pmx::config_from_header(header.value("scenario", json::object())));
        for (std::size_t i = 1; i <= seq && i < lines.size(); ++i) {
            json record = json::parse(lines[i]);
            engine.apply(pmx::command_from_json(record.at("cmd")));
        }
        bool partial = false;
        for (const auto& [id, spec] : engine.markets()) {
            if (spec.kind != pmx::MarketKind::Wta && !spec.is_ynb()) continue;
            json cmd = {{"verb", "arb_scan"}, {"market", id}, {"tick", engine.clock()}};
            json report = engine.apply(pmx::command_from_json(cmd));
            partial = partial || report.value("partial", false);
            std::cout << report.dump() << "\n";
        }
        if (strict && partial) {
            std::cerr << "strict: partial reports (unquoted labels) treated as failure\n";
            return pmx::kExitAssertion;
        }
        return pmx::kExitOk;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return pmx::kExitCommand;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pmx — deterministic prediction-market engine"};
    app.require_subcommand(1);

    std::string scenario_path, log_path, snapshot_path;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "run a scenario file, emitting the event log");
    run->add_option("scenario", scenario_path, "JSON-lines scenario file")->required();
    run->add_option("--log", log_path, "write the event log to this path");
    run->add_option("--snapshot", snapshot_path, "write the final snapshot to this path");
    run->add_flag("--quiet", quiet, "suppress stdout log echo");

    std::string replay_path;
    auto* replay = app.add_subcommand("replay", "re-execute a log and verify the digest chain");
    replay->add_option("log", replay_path, "event log file")->required();

    std::string snap_log;
    long long at = -1;
    auto* snap = app.add_subcommand("snapshot", "reconstruct state at a record boundary");
    snap->add_option("log", snap_log, "event log file")->required();
    snap->add_option("--at", at, "sequence number (default: end of log)");

    std::string solvency_log;
    auto* solvency = app.add_subcommand("check-solvency", "verify the solvency invariant along a log");
    solvency->add_option("log", solvency_log, "event log file")->required();

    std::string arb_log;
    long long arb_at = -1;
    bool strict = false;
    auto* arb = app.add_subcommand("arb-scan", "arbitrage report over quoted books");
    arb->add_option("log", arb_log, "event log file")->required();
    arb->add_option("--at", arb_at, "sequence number (default: end of log)");
    arb->add_flag("--strict", strict, "treat partial reports as failures");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(scenario_path, log_path, snapshot_path, quiet);
    if (replay->parsed()) return cmd_replay(replay_path);
    if (snap->parsed()) return cmd_snapshot(snap_log, at);
    if (solvency->parsed()) return cmd_check_solvency(solvency_log);
    if (arb->parsed()) return cmd_arb_scan(arb_log, arb_at, strict);
    return 0;
}
