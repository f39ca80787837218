// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Usage: pmx_acceptance <scenarios-dir>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "pmx/amm.hpp"
#include "pmx/digest.hpp"
#include "pmx/engine.hpp"
#include "pmx/gadgets.hpp"
#include "pmx/lmsr.hpp"
#include "pmx/scenario.hpp"

using namespace pmx;
using nlohmann::json;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail = {}) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << number << ": " << name;
    if (!ok && !detail.empty()) std::cout << " — " << detail;
    std::cout << std::endl;
    if (!ok) ++failures;
}

Command cmd(const char* verb, json payload, const std::string& actor = {}, Tick tick = 0) {
    payload["verb"] = verb;
    payload["tick"] = tick;
    if (!actor.empty()) payload["actor"] = actor;
    return command_from_json(payload);
}

// ---------------------------------------------------------------------------
// 1. Solvency fuzz: random valid operation sequences never break solvency.
// ---------------------------------------------------------------------------

struct FuzzOutcome {
    bool ok = true;
    std::string detail;
};

FuzzOutcome run_fuzz_sequence(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Engine e;
    const std::vector<std::string> who = {"a", "b", "c"};
    for (const auto& w : who)
        e.apply(cmd("faucet", {{"account", w}, {"cash", 200 * kUnit}, {"gov", 10 * kUnit}}));

    int n_outcomes = 2 + static_cast<int>(rng() % 5);  // up to 6
    std::vector<std::string> outcomes;
    for (int i = 0; i < n_outcomes; ++i) outcomes.push_back("O" + std::to_string(i));
    const char* kinds[] = {"WTA", "YNB", "YNB_NR", "SCALAR"};
    std::string kind = kinds[rng() % 4];
    json market = {{"id", "m"}, {"kind", kind}};
    if (kind == "SCALAR")
        market["scalar"] = {{"a", 0}, {"b", 100 * kUnit}, {"precision", 3}};
    else
        market["outcomes"] = outcomes;
    e.apply(cmd("create_market", {{"market", market}}, "a"));
    const MarketSpec& spec = e.market("m");

    std::vector<std::uint64_t> orders;
    std::vector<std::string> pools;
    std::string lmsr_id;
    Tick tick = 1;
    int length = 10 + static_cast<int>(rng() % 191);  // up to ~200 operations

    for (int step = 0; step < length; ++step) {
        if (rng() % 8 == 0) ++tick;
        const std::string& actor = who[rng() % who.size()];
        const std::string& label = spec.labels[rng() % spec.labels.size()];
        std::optional<std::string> bundle;
        if (spec.is_ynb()) bundle = spec.bundles[rng() % spec.bundles.size()].outcome;
        Micro amount = static_cast<Micro>(1 + rng() % 5) * kUnit;
        Micro price = 50'000 + static_cast<Micro>(rng() % 90) * 10'000;

        try {
            switch (rng() % 15) {
                case 0: {
                    json p = {{"market", "m"}, {"amount", amount}};
                    if (bundle) p["bundle"] = *bundle;
                    e.apply(cmd("split", p, actor, tick));
                    break;
                }
                case 1: {
                    json p = {{"market", "m"}, {"qty", amount}};
                    if (bundle) p["bundle"] = *bundle;
                    e.apply(cmd("merge", p, actor, tick));
                    break;
                }
                case 2:
                    e.apply(cmd("transfer", {{"to", who[rng() % who.size()]}, {"amount", amount}},
                                actor, tick));
                    break;
                case 3:
                    e.apply(cmd("transfer_shares",
                                {{"to", who[rng() % who.size()]}, {"market", "m"},
                                 {"label", label}, {"qty", amount}},
                                actor, tick));
                    break;
                case 4:
                case 5: {
                    auto result = e.apply(cmd("order_place",
                                              {{"market", "m"}, {"label", label},
                                               {"side", rng() % 2 ? "bid" : "ask"},
                                               {"price", price}, {"qty", amount}},
                                              actor, tick));
                    if (result.at("resting").get<Qty>() > 0)
                        orders.push_back(result.at("order").get<std::uint64_t>());
                    break;
                }
                case 6:
                    if (!orders.empty()) {
                        std::uint64_t id = orders[rng() % orders.size()];
                        e.apply(cmd("order_cancel", {{"order", static_cast<Micro>(id)}},
                                    who[rng() % who.size()], tick));
                    }
                    break;
                case 7:
                    e.apply(cmd("match_intents",
                                {{"market", "m"}, {"label", label}, {"long_price", price},
                                 {"short_price", price}, {"qty", amount},
                                 {"long", who[rng() % who.size()]},
                                 {"short", who[rng() % who.size()]}},
                                actor, tick));
                    break;
                case 8:
                    if (spec.kind == MarketKind::YnbNegRisk)
                        e.apply(cmd("nr_no", {{"market", "m"}, {"outcome", *bundle}, {"qty", amount}},
                                    actor, tick));
                    break;
                case 9:
                    if (spec.kind == MarketKind::YnbNegRisk)
                        e.apply(cmd("nr_no_set",
                                    {{"market", "m"}, {"outcome", *bundle}, {"qty", kUnit}}, actor,
                                    tick));
                    break;
                case 10:
                    if (pools.empty()) {
                        auto result = e.apply(cmd("amm_create",
                                                  {{"market", "m"}, {"label", label},
                                                   {"shares", amount}, {"cash", amount / 2}},
                                                  actor, tick));
                        pools.push_back(result.at("pool").get<std::string>());
                    } else {
                        e.apply(cmd("amm_swap",
                                    {{"pool", pools[rng() % pools.size()]},
                                     {"side", rng() % 2 ? "buy" : "sell"},
                                     {"amount", amount / 2}},
                                    actor, tick));
                    }
                    break;
                case 11:
                    if (spec.kind == MarketKind::Wta && lmsr_id.empty()) {
                        auto result = e.apply(cmd("lmsr_create",
                                                  {{"market", "m"}, {"b", 10 * kUnit},
                                                   {"bond", 20 * kUnit}},
                                                  actor, tick));
                        lmsr_id = result.at("lmsr").get<std::string>();
                    } else if (!lmsr_id.empty()) {
                        json delta;
                        delta[label] = static_cast<Micro>(rng() % (2 * kUnit)) - kUnit / 2;
                        e.apply(cmd("lmsr_trade", {{"lmsr", lmsr_id}, {"delta", delta}}, actor,
                                    tick));
                    }
                    break;
                case 12:
                    if (step > length / 2 && rng() % 4 == 0) {
                        json p = {{"market", "m"}};
                        if (spec.kind == MarketKind::Scalar)
                            p["x"] = static_cast<Micro>(rng() % (120 * kUnit)) - 10 * kUnit;
                        else
                            p["outcome"] = outcomes[rng() % outcomes.size()];
                        e.apply(cmd("arbiter", p, actor, tick));
                    }
                    break;
                case 13:
                case 14:
                    e.apply(cmd("redeem", {{"market", "m"}, {"label", label}, {"qty", amount}},
                                actor, tick));
                    break;
            }
        } catch (const Error& err) {
            if (err.code() == Err::InvariantViolation)
                return {false, std::string("seed ") + std::to_string(seed) + ": " + err.what()};
            // other rejections are expected fuzz noise
        }
    }
    return {};
}

void criterion_solvency_fuzz() {
    for (std::uint64_t seed = 1; seed <= 10'000; ++seed) {
        auto result = run_fuzz_sequence(seed);
        if (!result.ok) {
            report(1, "solvency holds after every operation (10k random sequences)", false,
                   result.detail);
            return;
        }
    }
    report(1, "solvency holds after every operation (10k random sequences)", true);
}

// ---------------------------------------------------------------------------
// 2. Gadget algebra: negRisk equivalences and split/merge identity.
// ---------------------------------------------------------------------------

Micro payout_at(const MarketSpec& spec, const std::map<std::string, Qty>& holdings,
                const std::string& outcome) {
    __int128 total = 0;
    for (const auto& [label, qty] : holdings)
        total += static_cast<__int128>(qty) * spec.payoff(label, outcome);
    return static_cast<Micro>(total / kUnit);
}

void criterion_gadget_algebra() {
    for (int n : {2, 3, 5, 16}) {
        std::vector<std::string> outcomes;
        for (int i = 0; i < n; ++i) outcomes.push_back("O" + std::to_string(i));
        auto spec = make_ynb("m", "e", outcomes, true);

        // single-NO form: one NO equals a YES portfolio over the complement
        {
            Ledger ledger;
            ledger.credit_cash("t", kUnit);
            split(ledger, spec, "t", outcomes[0], kUnit);
            std::map<std::string, Qty> inputs = {{spec.bundles[0].no_label, kUnit}};
            auto receipt = negrisk_convert_no(ledger, spec, "t", outcomes[0], kUnit);
            for (const auto& omega : spec.outcomes) {
                if (payout_at(spec, inputs, omega) !=
                    payout_at(spec, receipt.minted, omega) + receipt.cash) {
                    report(2, "gadget algebra: negRisk payoff equivalences and split-merge identity", false,
                           "single-NO mismatch at n=" + std::to_string(n) + ", outcome " + omega);
                    return;
                }
            }
        }

        // NO-set form: the NO complement converts to one YES plus (n-2) cash
        {
            Ledger ledger;
            ledger.credit_cash("t", static_cast<Micro>(n - 1) * kUnit);
            std::map<std::string, Qty> inputs;
            for (int i = 1; i < n; ++i) {
                split(ledger, spec, "t", outcomes[i], kUnit);
                transfer_shares(ledger, spec, "t", "bin", spec.bundles[i].yes_label, kUnit);
                inputs[spec.bundles[i].no_label] = kUnit;
            }
            auto receipt = negrisk_convert_no_set(ledger, spec, "t", outcomes[0], kUnit);
            if (receipt.cash != static_cast<Micro>(n - 2) * kUnit) {
                report(2, "gadget algebra: negRisk payoff equivalences and split-merge identity", false,
                       "NO-set cash leg wrong at n=" + std::to_string(n));
                return;
            }
            for (const auto& omega : spec.outcomes) {
                if (payout_at(spec, inputs, omega) !=
                    payout_at(spec, receipt.minted, omega) + receipt.cash) {
                    report(2, "gadget algebra: negRisk payoff equivalences and split-merge identity", false,
                           "NO-set mismatch at n=" + std::to_string(n) + ", outcome " + omega);
                    return;
                }
            }
        }

        // split then merge is a state identity
        {
            Ledger ledger;
            ledger.credit_cash("t", 3 * kUnit);
            ledger.book("m");
            json before = ledger.accounts_to_json();
            split(ledger, spec, "t", outcomes[0], 3 * kUnit);
            merge(ledger, spec, "t", outcomes[0], 3 * kUnit);
            if (json(ledger.accounts_to_json()).dump() != json(before).dump() ||
                ledger.book("m").aggregate_treasury() != 0) {
                report(2, "gadget algebra: negRisk payoff equivalences and split-merge identity", false,
                       "split-merge identity broken at n=" + std::to_string(n));
                return;
            }
        }
    }
    report(2, "gadget algebra: negRisk payoff equivalences and split-merge identity", true);
}

// ---------------------------------------------------------------------------
// 3. HBO fixture reproduces the worked settlement vector exactly.
// ---------------------------------------------------------------------------

void criterion_hbo(const std::filesystem::path& dir) {
    std::ifstream in(dir / "hbo.jsonl");
    if (!in) {
        report(3, "HBO fixture settlement vector exact across all 32 labels", false, "fixture missing");
        return;
    }
    auto result = run_scenario(in);
    if (result.exit_code != kExitOk) {
        report(3, "HBO fixture settlement vector exact across all 32 labels", false,
               "exit " + std::to_string(result.exit_code) + " at seq " +
                   std::to_string(result.error_seq) + ": " + result.error);
        return;
    }
    // Every redemption receipt must match the settlement vector:
    // Other/Multiple:YES -> 1, other NO -> 1, everything else -> 0 per share.
    std::set<std::string> labels_seen;
    for (std::size_t i = 1; i < result.log_lines.size(); ++i) {
        json record = json::parse(result.log_lines[i]);
        if (record.at("cmd").value("verb", "") != "redeem") continue;
        std::string label = record.at("cmd").at("label").get<std::string>();
        Qty qty = record.at("cmd").at("qty").get<Qty>();
        Micro paid = record.at("result").at("paid").get<Micro>();
        bool wins = label == "Other/Multiple:YES" ||
                    (label.size() > 3 && label.substr(label.size() - 3) == ":NO" &&
                     label != "Other/Multiple:NO");
        Micro expected = wins ? qty : 0;
        if (paid != expected) {
            report(3, "HBO fixture settlement vector exact across all 32 labels", false,
                   label + " paid " + std::to_string(paid) + ", expected " +
                       std::to_string(expected));
            return;
        }
        labels_seen.insert(label);
    }
    if (labels_seen.size() != 32) {
        report(3, "HBO fixture settlement vector exact across all 32 labels", false,
               "only " + std::to_string(labels_seen.size()) + " of 32 labels redeemed");
        return;
    }
    report(3, "HBO fixture settlement vector exact across all 32 labels", true);
}

// ---------------------------------------------------------------------------
// 4. WTA quote arithmetic with the brute-force execution oracle.
// ---------------------------------------------------------------------------

void criterion_wta_arbitrage() {
    const std::vector<std::pair<std::string, Micro>> quotes = {
        {"A", 540'000}, {"B", 230'000}, {"C", 230'000}};

    {
        Ledger ledger;
        OrderBooks books;
        auto spec = make_wta("m", "e", {"A", "B", "C"});
        ledger.credit_cash("maker", 100 * kUnit);
        split(ledger, spec, "maker", std::nullopt, 30 * kUnit);
        for (const auto& [label, price] : quotes) {
            books.place(ledger, spec, "maker", label, Side::Ask, price, 10 * kUnit, 0, 0);
            books.place(ledger, spec, "maker", label, Side::Bid, price - 10'000, 10 * kUnit, 0, 0);
        }
        auto report_json = books.detect_arbitrage(spec);
        if (!report_json.flags.empty() || report_json.partial) {
            report(4, "0.54/0.23/0.23 carries no arbitrage flag", false, "unexpected flag");
            return;
        }
    }

    // perturb each ask down one cent: flag plus brute-force-verified profit
    for (std::size_t victim = 0; victim < quotes.size(); ++victim) {
        Ledger ledger;
        OrderBooks books;
        auto spec = make_wta("m", "e", {"A", "B", "C"});
        ledger.credit_cash("maker", 100 * kUnit);
        ledger.credit_cash("arb", 100 * kUnit);
        split(ledger, spec, "maker", std::nullopt, 30 * kUnit);
        for (std::size_t i = 0; i < quotes.size(); ++i) {
            Micro price = quotes[i].second - (i == victim ? 10'000 : 0);
            books.place(ledger, spec, "maker", quotes[i].first, Side::Ask, price, 10 * kUnit, 0, 0);
        }
        auto scan = books.detect_arbitrage(spec);
        if (scan.flags.size() != 1 || scan.flags[0].type != "SUM_ASKS_LT_1" ||
            scan.flags[0].profit != muldiv_floor(10'000, 10 * kUnit, kUnit)) {
            report(4, "perturbed asks flag SUM_ASKS_LT_1 with exact profit", false,
                   "victim " + quotes[victim].first);
            return;
        }
        Micro before = ledger.cash("arb");
        for (std::size_t i = 0; i < quotes.size(); ++i) {
            Micro price = quotes[i].second - (i == victim ? 10'000 : 0);
            books.place(ledger, spec, "arb", quotes[i].first, Side::Bid, price, 10 * kUnit, 0, 0);
        }
        merge(ledger, spec, "arb", std::nullopt, 10 * kUnit);
        Micro realized = ledger.cash("arb") - before;
        if (realized != scan.flags[0].profit) {
            report(4, "brute-force execution realizes the reported profit", false,
                   "realized " + std::to_string(realized));
            return;
        }
    }
    report(4, "WTA quote arithmetic: no false flag; perturbed asks yield exact profit", true);
}

// ---------------------------------------------------------------------------
// 5. Scalar payoff at the benchmark quantity.
// ---------------------------------------------------------------------------

void criterion_scalar() {
    auto spec = make_scalar("pv", "vote share", 0, 100 * kUnit, 3, "percent");
    bool ok = spec.payoff_scalar(kScalarLong, 49'800'000) == 498'000 &&
              spec.payoff_scalar(kScalarShort, 49'800'000) == 502'000;

    // and through the engine: redeem ten long shares for $4.98
    Engine e;
    e.apply(cmd("faucet", {{"account", "alice"}, {"cash", 10 * kUnit}}));
    e.apply(cmd("create_market",
                {{"market", {{"id", "pv"}, {"kind", "SCALAR"},
                             {"scalar", {{"a", 0}, {"b", 100 * kUnit}, {"precision", 3}}}}}}));
    e.apply(cmd("split", {{"market", "pv"}, {"amount", 10 * kUnit}}, "alice", 1));
    e.apply(cmd("arbiter", {{"market", "pv"}, {"x", 49'800'000}}, "oracle", 2));
    auto receipt =
        e.apply(cmd("redeem", {{"market", "pv"}, {"label", "LONG"}, {"qty", 10 * kUnit}}, "alice", 3));
    ok = ok && receipt.at("paid").get<Micro>() == 4'980'000;
    report(5, "scalar X=49.8 on [0,100] pays 0.498 per long share", ok);
}

// ---------------------------------------------------------------------------
// 6. LMSR worst-case loss bound under adversarial flow.
// ---------------------------------------------------------------------------

void criterion_lmsr_bound() {
    std::mt19937_64 rng(20'26);
    int sequences = 0;
    for (int n : {2, 3, 5}) {
        for (Micro b_units : {10, 100}) {
            for (int run = 0; run < 167; ++run) {
                ++sequences;
                Ledger ledger;
                LmsrVenue venue;
                std::vector<std::string> outcomes;
                for (int i = 0; i < n; ++i) outcomes.push_back("O" + std::to_string(i));
                auto spec = make_wta("m", "e", outcomes);
                Micro bond = static_cast<Micro>(std::ceil(b_units * std::log(n) * kUnit)) + kUnit;
                ledger.credit_cash("op", bond);
                ledger.credit_cash("t", 1'000'000 * kUnit);
                auto id = venue.create(ledger, spec, "op", b_units * kUnit, bond);

                Micro premiums = 0;
                int trades = 0;
                for (int i = 0; i < 60; ++i) {
                    std::map<std::string, Qty> delta;
                    delta["O" + std::to_string(rng() % n)] =
                        static_cast<Qty>(rng() % (30 * kUnit)) - 10 * kUnit;
                    try {
                        premiums += venue.trade(ledger, spec, id, "t", delta).cost;
                        ++trades;
                    } catch (const Error&) {
                    }
                }
                Micro worst_payout = 0;
                for (const auto& [label, q] : venue.find(id)->q)
                    worst_payout = std::max(worst_payout, q);
                double bound = b_units * std::log(n) * kUnit + trades;  // 1 micro per trade
                if (static_cast<double>(worst_payout - premiums) > bound) {
                    report(6, "LMSR operator loss bounded by b ln|Omega|", false,
                           "n=" + std::to_string(n) + " b=" + std::to_string(b_units));
                    return;
                }
            }
        }
    }
    report(6,
           "LMSR operator loss bounded by b ln|Omega| (" + std::to_string(sequences) +
               " adversarial sequences)",
           true);
}

// ---------------------------------------------------------------------------
// 7. Seeded bookmaking at the canonical three-way priors.
// ---------------------------------------------------------------------------

void criterion_seeding() {
    Ledger ledger;
    CpmmVenue venue;
    auto spec = make_wta("m", "e", {"A", "B", "C"});
    ledger.credit_cash("op", 200 * kUnit);
    auto result = seed_bookmaker(ledger, venue, spec, "op", 200 * kUnit,
                                 {{"A", 500'000}, {"B", 300'000}, {"C", 200'000}}, 0);
    const std::vector<Micro> expected_cash = {50 * kUnit, 30 * kUnit, 20 * kUnit};
    bool ok = result.pools.size() == 3;
    Micro locked = ledger.book("m").treasuries[""];
    for (std::size_t i = 0; ok && i < result.pools.size(); ++i) {
        const CpmmPool* pool = venue.find(result.pools[i]);
        ok = pool && venue.share_reserve(ledger, *pool) == 100 * kUnit &&
             venue.cash_reserve(ledger, *pool) == expected_cash[i];
        locked += venue.cash_reserve(ledger, *pool);
    }
    ok = ok && locked == 200 * kUnit && ledger.cash("op") == 0;
    ok = ok && check_solvency(spec, ledger.book("m")).ok;
    report(7, "seeding 2n=200 at priors (0.5,0.3,0.2) locks exactly 200 in (100,50)/(100,30)/(100,20)",
           ok);
}

// ---------------------------------------------------------------------------
// 8. Resolution-register fuzz: one transition, conserved bond/slash flows.
// ---------------------------------------------------------------------------

bool run_resolution_fuzz(std::uint64_t seed, std::string& detail) {
    std::mt19937_64 rng(seed);
    Engine e;
    const std::vector<std::string> actors = {"p", "q", "r", "s"};
    for (const auto& a : actors)
        e.apply(cmd("faucet", {{"account", a}, {"cash", 50 * kUnit}, {"gov", 20 * kUnit}}));

    json stages = json::array();
    if (rng() % 2)
        stages.push_back({{"kind", "optimistic"},
                          {"bond", static_cast<Micro>(rng() % 3) * kUnit},
                          {"window", 3 + static_cast<Tick>(rng() % 8)}});
    if (rng() % 2)
        stages.push_back({{"kind", "vote"},
                          {"commit_window", 2 + static_cast<Tick>(rng() % 4)},
                          {"reveal_window", 2 + static_cast<Tick>(rng() % 4)},
                          {"quorum", 100'000 + static_cast<Micro>(rng() % 600'000)},
                          {"slash", static_cast<Micro>(rng() % 500'000)}});
    stages.push_back({{"kind", "arbiter"}, {"allow", json::array({"r"})}});
    e.apply(cmd("create_policy", {{"policy", {{"id", "p"}, {"stages", stages}}}}));
    for (const auto& a : actors)
        if (rng() % 2) e.apply(cmd("enroll", {{"stake", (1 + rng() % 15) * kUnit}}, a));
    e.apply(cmd("create_market", {{"market", {{"id", "m"}, {"kind", "WTA"},
                                              {"outcomes", {"A", "B"}},
                                              {"resolution_policy", "p"}}}}));

    std::string first_outcome;
    Tick tick = 0;
    for (int step = 0; step < 30; ++step) {
        tick += rng() % 3;
        const std::string& actor = actors[rng() % actors.size()];
        std::string outcome = rng() % 2 ? "A" : "B";
        try {
            switch (rng() % 6) {
                case 0:
                    e.apply(cmd("propose",
                                {{"market", "m"}, {"outcome", outcome},
                                 {"bond", static_cast<Micro>(rng() % 4) * kUnit}},
                                actor, tick));
                    break;
                case 1:
                    e.apply(cmd("dispute",
                                {{"market", "m"}, {"bond", static_cast<Micro>(rng() % 4) * kUnit}},
                                actor, tick));
                    break;
                case 2:
                    e.apply(cmd("commit",
                                {{"market", "m"},
                                 {"digest", commit_digest(actor, outcome, "s")}},
                                actor, tick));
                    break;
                case 3:
                    e.apply(cmd("reveal", {{"market", "m"}, {"outcome", outcome}, {"salt", "s"}},
                                actor, tick));
                    break;
                case 4:
                    e.apply(cmd("tally", {{"market", "m"}}, actor, tick));
                    break;
                case 5:
                    e.apply(cmd("arbiter", {{"market", "m"}, {"outcome", outcome}}, actor, tick));
                    break;
            }
        } catch (const Error& err) {
            if (err.code() == Err::InvariantViolation) {
                detail = "seed " + std::to_string(seed) + ": " + err.what();
                return false;
            }
        }
        const Register& reg = e.register_of("m");
        if (reg.resolved) {
            if (first_outcome.empty())
                first_outcome = reg.outcome;
            else if (first_outcome != reg.outcome) {
                detail = "seed " + std::to_string(seed) + ": register changed outcome";
                return false;
            }
        } else if (!first_outcome.empty()) {
            detail = "seed " + std::to_string(seed) + ": register reverted to unresolved";
            return false;
        }
    }
    // conservation of both assets is audited inside apply(); one more look
    e.audit_all();
    return true;
}

void criterion_resolution_fuzz() {
    for (std::uint64_t seed = 1; seed <= 10'000; ++seed) {
        std::string detail;
        if (!run_resolution_fuzz(seed, detail)) {
            report(8, "resolution fuzz: exactly-once registers, conserved bonds", false, detail);
            return;
        }
    }
    report(8, "resolution fuzz: exactly-once registers, conserved bonds (10k chains)", true);
}

// ---------------------------------------------------------------------------
// 9. Determinism: run + replay of every fixture, tamper detection.
// ---------------------------------------------------------------------------

void criterion_determinism(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> fixtures;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".jsonl") fixtures.push_back(entry.path());
    std::sort(fixtures.begin(), fixtures.end());
    if (fixtures.empty()) {
        report(9, "determinism across runs and replay", false, "no fixtures found");
        return;
    }

    for (const auto& path : fixtures) {
        std::ifstream in1(path), in2(path);
        auto first = run_scenario(in1);
        auto second = run_scenario(in2);
        if (first.exit_code != kExitOk || second.exit_code != kExitOk) {
            report(9, "determinism across runs and replay", false,
                   path.filename().string() + " exits " + std::to_string(first.exit_code));
            return;
        }
        if (first.log_lines != second.log_lines ||
            first.final_snapshot.dump() != second.final_snapshot.dump()) {
            report(9, "determinism across runs and replay", false,
                   path.filename().string() + " differs across two runs");
            return;
        }
        auto verified = replay_log(first.log_lines);
        if (verified.exit_code != kExitOk ||
            verified.final_snapshot.dump() != first.final_snapshot.dump()) {
            report(9, "determinism across runs and replay", false,
                   path.filename().string() + " fails replay: " + verified.error);
            return;
        }
        // flip one byte mid-log: detection at exactly that record
        std::size_t victim = first.log_lines.size() / 2;
        if (victim == 0) continue;
        auto tampered = first.log_lines;
        tampered[victim][tampered[victim].size() / 2] ^= 0x1;
        auto caught = replay_log(tampered);
        bool detected = caught.exit_code != kExitOk && caught.mismatch_seq == victim;
        if (!detected) {
            report(9, "determinism across runs and replay", false,
                   path.filename().string() + " tamper not caught at record " +
                       std::to_string(victim));
            return;
        }
    }
    report(9,
           "determinism: " + std::to_string(fixtures.size()) +
               " fixtures run+replay byte-identically; tampering detected",
           true);
}

// ---------------------------------------------------------------------------
// 10. Matched issuance and complementary crossing equal split-plus-transfers.
// ---------------------------------------------------------------------------

std::string route_fingerprint(const Engine& e) {
    json snap = e.snapshot();
    return json({{"accounts", snap.at("accounts")}, {"markets", snap.at("markets")}}).dump();
}

void criterion_clob_equivalence() {
    for (Micro price = 50'000; price <= 950'000; price += 50'000) {
        for (Qty units = 1; units <= 10; ++units) {
            Qty qty = units * kUnit;
            Micro long_cost = muldiv_floor(price, qty, kUnit);

            auto setup = [](Engine& e) {
                e.apply(cmd("faucet", {{"account", "long"}, {"cash", 10 * kUnit}}));
                e.apply(cmd("faucet", {{"account", "short"}, {"cash", 10 * kUnit}}));
                e.apply(cmd("create_market", {{"market", {{"id", "m"}, {"kind", "WTA"},
                                                          {"outcomes", {"Y", "N"}}}}}));
            };

            // route A: matched issuance
            Engine a;
            setup(a);
            a.apply(cmd("match_intents",
                        {{"market", "m"}, {"label", "Y"}, {"long_price", price},
                         {"short_price", price}, {"qty", qty}, {"long", "long"},
                         {"short", "short"}}));

            // route B: two complementary bids crossed
            Engine b;
            setup(b);
            auto bid_y = b.apply(cmd("order_place",
                                     {{"market", "m"}, {"label", "Y"}, {"side", "bid"},
                                      {"price", price}, {"qty", qty}},
                                     "long"));
            auto bid_n = b.apply(cmd("order_place",
                                     {{"market", "m"}, {"label", "N"}, {"side", "bid"},
                                      {"price", kUnit - price}, {"qty", qty}},
                                     "short"));
            b.apply(cmd("comp_cross", {{"order_a", bid_y.at("order").get<Micro>()},
                                       {"order_b", bid_n.at("order").get<Micro>()}}));

            // route C: explicit split plus transfers
            Engine c;
            setup(c);
            c.apply(cmd("split", {{"market", "m"}, {"amount", qty}}, "short"));
            c.apply(cmd("transfer_shares",
                        {{"to", "long"}, {"market", "m"}, {"label", "Y"}, {"qty", qty}}, "short"));
            c.apply(cmd("transfer", {{"to", "short"}, {"amount", long_cost}}, "long"));

            std::string fa = route_fingerprint(a);
            if (fa != route_fingerprint(b) || fa != route_fingerprint(c)) {
                report(10, "matched issuance == crossing == split-plus-transfers", false,
                       "divergence at price " + std::to_string(price) + ", qty " +
                           std::to_string(units));
                return;
            }
        }
    }
    report(10, "matched issuance == crossing == split-plus-transfers on the 0.05 price grid", true);
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path scenarios = argc > 1 ? argv[1] : "scenarios";
    criterion_solvency_fuzz();
    criterion_gadget_algebra();
    criterion_hbo(scenarios);
    criterion_wta_arbitrage();
    criterion_scalar();
    criterion_lmsr_bound();
    criterion_seeding();
    criterion_resolution_fuzz();
    criterion_determinism(scenarios);
    criterion_clob_equivalence();

    if (failures == 0) {
        std::cout << "all acceptance criteria passed" << std::endl;
        return 0;
    }
    std::cout << failures << " criteria failed" << std::endl;
    return 1;
}
