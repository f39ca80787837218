// scenario runner and event log: determinism, digest chain, tamper
// detection, exit codes, log-only state reconstruction.
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "pmx/scenario.hpp"

using namespace pmx;
using nlohmann::json;

namespace {

const char* kBasicScenario = R"({"schema":"pmx-scenario-v1","seed":9}
{"tick":0,"verb":"faucet","account":"alice","cash":10000000}
{"tick":0,"verb":"faucet","account":"bob","cash":10000000}
{"tick":1,"actor":"alice","verb":"create_market","market":{"id":"m1","kind":"WTA","event":"demo","outcomes":["A","B"]}}
{"tick":1,"actor":"alice","verb":"split","market":"m1","amount":4000000}
{"tick":2,"actor":"alice","verb":"order_place","market":"m1","label":"A","side":"ask","price":550000,"qty":2000000}
{"tick":3,"actor":"bob","verb":"order_place","market":"m1","label":"A","side":"bid","price":550000,"qty":1000000}
{"tick":4,"actor":"oracle","verb":"arbiter","market":"m1","outcome":"A"}
{"tick":5,"actor":"bob","verb":"redeem","market":"m1","label":"A","qty":1000000}
{"tick":5,"verb":"assert","check":"cash","account":"bob","expect":10450000}
)";

}  // namespace

TEST_CASE("an empty scenario runs clean with only the log header") {
    auto result = run_scenario_text("");
    CHECK(result.exit_code == kExitOk);
    CHECK(result.log_lines.size() == 1);  // header only
    CHECK(result.final_snapshot.at("accounts").size() == 4);  // the standing vaults
}

TEST_CASE("identical scenarios produce byte-identical logs and snapshots") {
    auto a = run_scenario_text(kBasicScenario);
    auto b = run_scenario_text(kBasicScenario);
    REQUIRE(a.exit_code == kExitOk);
    REQUIRE(a.log_lines.size() == b.log_lines.size());
    for (std::size_t i = 0; i < a.log_lines.size(); ++i) CHECK(a.log_lines[i] == b.log_lines[i]);
    CHECK(a.final_snapshot.dump() == b.final_snapshot.dump());
}

TEST_CASE("replaying a log verifies every record") {
    auto run = run_scenario_text(kBasicScenario);
    REQUIRE(run.exit_code == kExitOk);
    auto replay = replay_log(run.log_lines);
    CHECK(replay.exit_code == kExitOk);
    CHECK(replay.records == run.log_lines.size() - 1);
    CHECK(replay.final_snapshot.dump() == run.final_snapshot.dump());
}

TEST_CASE("a flipped byte is caught at the exact record") {
    auto run = run_scenario_text(kBasicScenario);
    REQUIRE(run.exit_code == kExitOk);
    for (std::size_t victim : {std::size_t{2}, std::size_t{5}, run.log_lines.size() - 1}) {
        auto tampered = run.log_lines;
        auto pos = tampered[victim].find("\"cash\"");
        if (pos == std::string::npos) pos = tampered[victim].size() / 2;
        tampered[victim][pos + 1] ^= 0x1;
        auto replay = replay_log(tampered);
        CHECK(replay.exit_code == kExitDigest);
        CHECK(replay.mismatch_seq == victim);
    }
}

TEST_CASE("a failing command reports its sequence number and keeps earlier records") {
    std::string scenario = R"({"tick":0,"verb":"faucet","account":"alice","cash":1000000}
{"tick":1,"actor":"alice","verb":"transfer","to":"bob","amount":5000000}
)";
    auto result = run_scenario_text(scenario);
    CHECK(result.exit_code == kExitCommand);
    CHECK(result.error_seq == 2);
    CHECK(result.log_lines.size() == 2);  // header + the successful faucet
    CHECK(result.error.find("InsufficientFunds") != std::string::npos);
}

TEST_CASE("assertion failures exit with their own status") {
    std::string scenario = R"({"tick":0,"verb":"faucet","account":"alice","cash":1000000}
{"tick":0,"verb":"assert","check":"cash","account":"alice","expect":2}
)";
    auto result = run_scenario_text(scenario);
    CHECK(result.exit_code == kExitAssertion);
    CHECK(result.error_seq == 2);
}

TEST_CASE("floats and malformed JSON are parse errors") {
    CHECK(run_scenario_text("{\"tick\":0,\"verb\":\"faucet\",\"cash\":1.5}\n").exit_code ==
          kExitParse);
    CHECK(run_scenario_text("this is not json\n").exit_code == kExitParse);
}

TEST_CASE("ill-typed payload fields are parse errors, not crashes") {
    CHECK(run_scenario_text("{\"tick\":0,\"verb\":\"faucet\",\"actor\":123}\n").exit_code ==
          kExitParse);
    CHECK(run_scenario_text("{\"tick\":0,\"verb\":\"create_market\"}\n").exit_code == kExitParse);
    // a present-but-wrong-shaped spec is a command rejection, not a parse error
    CHECK(run_scenario_text("{\"tick\":0,\"verb\":\"create_market\",\"market\":\"m\"}\n")
              .exit_code == kExitCommand);
    std::string bad_assert = R"({"tick":0,"verb":"faucet","account":"a","cash":1000000}
{"tick":0,"verb":"assert","check":"cash","account":"a"}
)";
    CHECK(run_scenario_text(bad_assert).exit_code == kExitParse);  // missing "expect"
}

TEST_CASE("invalid and duplicate market definitions fail as commands") {
    std::string empty_outcomes =
        R"({"tick":0,"verb":"create_market","market":{"id":"m","kind":"WTA","outcomes":[]}}
)";
    auto result = run_scenario_text(empty_outcomes);
    CHECK(result.exit_code == kExitCommand);
    CHECK(result.error.find("InvalidSpec") != std::string::npos);

    std::string dup =
        R"({"tick":0,"verb":"create_market","market":{"id":"m","kind":"WTA","outcomes":["A","B"]}}
{"tick":0,"verb":"create_market","market":{"id":"m","kind":"WTA","outcomes":["A","B"]}}
)";
    result = run_scenario_text(dup);
    CHECK(result.exit_code == kExitCommand);
    CHECK(result.error_seq == 2);
    CHECK(result.error.find("DuplicateMarketId") != std::string::npos);
}

TEST_CASE("ticks must be non-decreasing and faucets stay at genesis") {
    std::string regression = R"({"tick":5,"verb":"tick"}
{"tick":4,"verb":"tick"}
)";
    CHECK(run_scenario_text(regression).exit_code == kExitParse);

    std::string late_faucet = R"({"tick":3,"verb":"faucet","account":"a","cash":1000000}
)";
    CHECK(run_scenario_text(late_faucet).exit_code == kExitParse);
}

TEST_CASE("snapshots ignore the clock: a no-op tick leaves identical bytes") {
    std::string scenario = R"({"tick":0,"verb":"faucet","account":"alice","cash":1000000}
{"tick":1,"verb":"snapshot"}
{"tick":9,"verb":"snapshot"}
)";
    auto result = run_scenario_text(scenario);
    REQUIRE(result.exit_code == kExitOk);
    json first = json::parse(result.log_lines[2]);
    json second = json::parse(result.log_lines[3]);
    CHECK(first.at("result").at("snapshot").dump() == second.at("result").at("snapshot").dump());
    CHECK(first.at("state") == second.at("state"));
}

TEST_CASE("state at any sequence is reconstructible from the log alone") {
    auto run = run_scenario_text(kBasicScenario);
    REQUIRE(run.exit_code == kExitOk);
    auto mid = snapshot_at(run.log_lines, 4);
    CHECK(mid.at("accounts").at("alice").at("cash").get<Micro>() == 6'000'000);
    auto full = snapshot_at(run.log_lines, run.log_lines.size() - 1);
    CHECK(full.dump() == run.final_snapshot.dump());
}

TEST_CASE("replay rejects logs with sequence gaps") {
    auto run = run_scenario_text(kBasicScenario);
    auto lines = run.log_lines;
    lines.erase(lines.begin() + 3);
    auto replay = replay_log(lines);
    CHECK(replay.exit_code == kExitParse);  // LogCorrupt
}

TEST_CASE("query verbs leave the state digest unchanged") {
    std::string scenario = R"({"tick":0,"verb":"faucet","account":"alice","cash":2000000}
{"tick":1,"actor":"alice","verb":"create_market","market":{"id":"m","kind":"WTA","outcomes":["A","B"]}}
{"tick":1,"actor":"alice","verb":"split","market":"m","amount":1000000}
{"tick":1,"verb":"check_solvency","market":"m"}
{"tick":1,"verb":"arb_scan","market":"m"}
{"tick":1,"verb":"surplus_probe_placeholder_no"}
)";
    // the last line is an unknown verb: commands up to it still logged
    auto result = run_scenario_text(scenario);
    CHECK(result.exit_code == kExitParse);  // unknown verb
    REQUIRE(result.log_lines.size() == 6);
    json split_record = json::parse(result.log_lines[3]);
    json solvency_record = json::parse(result.log_lines[4]);
    json arb_record = json::parse(result.log_lines[5]);
    CHECK(split_record.at("state") == solvency_record.at("state"));
    CHECK(solvency_record.at("state") == arb_record.at("state"));
    CHECK(solvency_record.at("result").at("ok").get<bool>());
}
