#include "pmx/engine.hpp"

#include <algorithm>

#include "pmx/digest.hpp"
#include "pmx/gadgets.hpp"
#include "pmx/settlement.hpp"

namespace pmx {

using nlohmann::json;

Command command_from_json(const json& j) {
    require(j.is_object(), Err::ParseError, "command must be a JSON object");
    require(j.contains("verb") && j.at("verb").is_string(), Err::ParseError,
            "command needs a string 'verb'");
    Command cmd;
    cmd.verb = j.at("verb").get<std::string>();
    if (j.contains("tick")) {
        require(j.at("tick").is_number_integer(), Err::ParseError, "'tick' must be an integer");
        cmd.tick = j.at("tick").get<Tick>();
    }
    if (j.contains("actor")) {
        require(j.at("actor").is_string(), Err::ParseError, "'actor' must be a string");
        cmd.actor = j.at("actor").get<std::string>();
    }
    cmd.payload = j;
    return cmd;
}

Engine::Engine(EngineConfig config) : config_(std::move(config)), rng_(config_.seed) {
    // Standing venue vault accounts, present from genesis so snapshots do
    // not shift when a venue is first touched.
    ledger_.account(kClobVault);
    ledger_.account(kBondVault);
    ledger_.account(kGovVault);
    ledger_.account(kFeeAccount);
    // Built-in fallback: a terminal arbiter stage open to any account.
    resolution_.register_policy({"default", {ArbiterStage{}}});
    // Executed prices feed the auto-resolve streaks.
    books_.set_trade_hook([this](const std::string& market_id, const std::string& label,
                                 Micro price) { resolution_.note_trade_price(market_id, label, price); });
}

const MarketSpec& Engine::market(const std::string& id) const {
    auto it = markets_.find(id);
    require(it != markets_.end(), Err::UnknownMarket, "market '" + id + "'");
    return it->second;
}

const Register& Engine::register_of(const std::string& id) const {
    auto it = registers_.find(id);
    require(it != registers_.end(), Err::UnknownMarket, "market '" + id + "'");
    return it->second;
}

const MarketSpec& Engine::market_for_trading(const std::string& id) const {
    const MarketSpec& spec = market(id);
    require(!register_of(id).resolved, Err::MarketResolved, id + " has resolved");
    return spec;
}

void Engine::faucet(const std::string& account, Micro cash, Micro gov) {
    require(clock_ == 0, Err::ParseError, "faucet mints only at tick 0");
    require(cash >= 0 && gov >= 0, Err::InvalidSpec, "faucet amounts must be nonnegative");
    ledger_.credit_cash(account, cash);
    ledger_.credit_gov(account, gov);
    genesis_cash_ += cash;
    genesis_gov_ += gov;
}

void Engine::audit(const std::string& market_id) {
    auto it = markets_.find(market_id);
    if (it == markets_.end()) return;
    audit_solvency(it->second, ledger_.book(market_id), &registers_.at(market_id));
}

void Engine::audit_all() const {
    for (const auto& [id, spec] : markets_) {
        const MarketBook* book = ledger_.find_book(id);
        if (book) audit_solvency(spec, *book, &registers_.at(id));
    }
    require(ledger_.total_cash() == genesis_cash_, Err::InvariantViolation,
            "numeraire conservation broken");
    require(ledger_.total_gov() == genesis_gov_, Err::InvariantViolation,
            "governance-token conservation broken");

    // Per-label supply equals the sum of holdings, venue escrow included.
    std::map<ShareKey, Qty> held;
    for (const auto& [_, acct] : ledger_.accounts())
        for (const auto& [key, qty] : acct.shares)
            if (qty != 0) held[key] += qty;
    for (const auto& [id, book] : ledger_.books())
        for (const auto& [label, supply] : book.supplies) {
            auto it = held.find({id, label});
            Qty total = it == held.end() ? 0 : it->second;
            require(total == supply, Err::InvariantViolation,
                    "share conservation broken on " + id + "/" + label);
            if (it != held.end()) held.erase(it);
        }
    require(held.empty(), Err::InvariantViolation, "shares held without recorded supply");
}

void Engine::finalize(const std::string& market_id, const Resolved& outcome) {
    Register& reg = registers_.at(market_id);
    require(!reg.resolved, Err::AlreadyResolved, market_id);
    const MarketSpec& spec = market(market_id);
    if (outcome.is_scalar) {
        require(spec.kind == MarketKind::Scalar, Err::UnknownOutcome,
                market_id + " resolves to a categorical outcome");
        reg.x = outcome.x;
    } else {
        require(spec.has_outcome(outcome.outcome), Err::UnknownOutcome,
                market_id + ": no outcome '" + outcome.outcome + "'");
        reg.outcome = outcome.outcome;
    }
    reg.resolved = true;
    reg.finalized_at = clock_;
    // Resolution clears the venues: resting orders refund, pools and
    // bookmakers freeze.
    books_.cancel_market(ledger_, market_id);
    pools_.freeze_market(market_id);
    lmsr_.freeze_market(market_id);
    resolution_.settle_bonds(ledger_, market_id, outcome);
}

void Engine::finalize_if_resolved(std::vector<std::pair<std::string, Resolved>> resolved) {
    for (const auto& [market_id, outcome] : resolved)
        if (!registers_.at(market_id).resolved) finalize(market_id, outcome);
}

void Engine::advance_to(Tick tick) {
    require(tick >= clock_, Err::ParseError, "ticks must be non-decreasing");
    while (clock_ < tick) {
        ++clock_;
        finalize_if_resolved(resolution_.on_tick(markets_, clock_, rng_, ledger_));
    }
}

json Engine::apply(const Command& cmd) {
    advance_to(cmd.tick);
    json result = dispatch(cmd);
    audit_all();
    return result;
}

namespace {

Micro get_micro(const json& j, const char* key) {
    require(j.contains(key), Err::ParseError, std::string("missing field '") + key + "'");
    require(j.at(key).is_number_integer(), Err::ParseError,
            std::string("field '") + key + "' must be a micro-unit integer");
    return j.at(key).get<Micro>();
}

Micro get_micro_or(const json& j, const char* key, Micro fallback) {
    return j.contains(key) ? get_micro(j, key) : fallback;
}

std::string get_string(const json& j, const char* key) {
    require(j.contains(key) && j.at(key).is_string(), Err::ParseError,
            std::string("missing string field '") + key + "'");
    return j.at(key).get<std::string>();
}

std::optional<std::string> get_optional_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

std::map<std::string, Qty> get_delta(const json& j, const char* key) {
    require(j.contains(key) && j.at(key).is_object(), Err::ParseError,
            std::string("field '") + key + "' must be a label->qty object");
    std::map<std::string, Qty> delta;
    for (const auto& [label, v] : j.at(key).items()) {
        require(v.is_number_integer(), Err::ParseError, "delta entries are micro integers");
        delta[label] = v.get<Qty>();
    }
    return delta;
}

json fills_json(const std::vector<Fill>& fills) {
    json out = json::array();
    for (const auto& f : fills)
        out.push_back({{"maker_order", f.maker_order},
                       {"maker", f.maker},
                       {"taker", f.taker},
                       {"price", f.price},
                       {"qty", f.qty},
                       {"cost", f.cost},
                       {"fee", f.fee}});
    return out;
}

}  // namespace

json Engine::solvency_json(const std::string& market_id) const {
    const MarketSpec& spec = market(market_id);
    const MarketBook* book = ledger_.find_book(market_id);
    MarketBook empty;
    auto report = check_solvency(spec, book ? *book : empty, &register_of(market_id));
    json bundles = json::array();
    for (const auto& b : report.bundles)
        bundles.push_back({{"bundle", b.bundle},
                           {"liability", b.liability},
                           {"treasury", b.treasury},
                           {"ok", b.ok}});
    return {{"market", market_id},
            {"ok", report.ok},
            {"worst_case_liability", report.worst_case_liability},
            {"treasury", report.treasury},
            {"per_bundle_ok", report.per_bundle_ok},
            {"bundles", std::move(bundles)}};
}

json Engine::arb_json(const ArbReport& report) const {
    json flags = json::array();
    for (const auto& f : report.flags) {
        json fj = {{"type", f.type},
                   {"price_sum", f.price_sum},
                   {"depth", f.depth},
                   {"profit", f.profit}};
        if (!f.bundle.empty()) fj["bundle"] = f.bundle;
        flags.push_back(std::move(fj));
    }
    return {{"market", report.market}, {"partial", report.partial}, {"flags", std::move(flags)}};
}

json Engine::dispatch(const Command& cmd) {
    const json& p = cmd.payload;
    const std::string& verb = cmd.verb;

    if (verb == "tick") return {{"tick", clock_}};

    if (verb == "faucet") {
        require(cmd.tick == 0, Err::ParseError, "faucet commands carry tick 0");
        std::string account = p.contains("account") ? get_string(p, "account") : cmd.actor;
        Micro cash = get_micro_or(p, "cash", 0);
        Micro gov = get_micro_or(p, "gov", 0);
        faucet(account, cash, gov);
        return {{"account", account}, {"cash", cash}, {"gov", gov}};
    }

    if (verb == "create_policy") {
        ResolutionPolicy policy = policy_from_json(p.at("policy"));
        resolution_.register_policy(policy);
        return {{"policy", policy.id}};
    }

    if (verb == "create_market") {
        MarketSpec spec = market_from_json(p.at("market"));
        std::string id = spec.id;
        require(!markets_.count(id), Err::DuplicateMarketId, "market '" + id + "'");
        if (spec.resolution_policy.empty()) spec.resolution_policy = "default";
        spec.created_at = clock_;
        auto violations = validate_market(spec);
        if (!violations.empty())
            fail(Err::InvalidSpec,
                 id + ": " + violations.front().rule + ", " + violations.front().detail);
        registers_[id] = Register{};
        ledger_.book(id);  // materialize so snapshots are stable from genesis
        resolution_.attach_market(spec, clock_, rng_, ledger_);
        markets_.emplace(id, std::move(spec));
        return {{"market", id}};
    }

    if (verb == "transfer") {
        auto receipt = transfer_numeraire(ledger_, cmd.actor, get_string(p, "to"),
                                          get_micro(p, "amount"));
        return {{"from", receipt.from}, {"to", receipt.to}, {"amount", receipt.amount}};
    }

    if (verb == "transfer_shares") {
        const MarketSpec& spec = market(get_string(p, "market"));
        auto receipt = transfer_shares(ledger_, spec, cmd.actor, get_string(p, "to"),
                                       get_string(p, "label"), get_micro(p, "qty"));
        return {{"from", receipt.from}, {"to", receipt.to}, {"qty", receipt.qty}};
    }

    if (verb == "split") {
        const MarketSpec& spec = market(get_string(p, "market"));
        auto receipt = split(ledger_, spec, cmd.actor, get_optional_string(p, "bundle"),
                             get_micro(p, "amount"));
        audit(spec.id);
        return {{"market", receipt.market}, {"amount", receipt.amount},
                {"minted", json(receipt.minted)}};
    }

    if (verb == "merge") {
        const MarketSpec& spec = market(get_string(p, "market"));
        auto receipt = merge(ledger_, spec, cmd.actor, get_optional_string(p, "bundle"),
                             get_micro(p, "qty"));
        audit(spec.id);
        return {{"market", receipt.market}, {"qty", receipt.qty}, {"credited", receipt.credited}};
    }

    if (verb == "nr_no") {
        const MarketSpec& spec = market_for_trading(get_string(p, "market"));
        auto receipt = negrisk_convert_no(ledger_, spec, cmd.actor, get_string(p, "outcome"),
                                          get_micro(p, "qty"));
        audit(spec.id);
        return {{"market", receipt.market}, {"outcome", receipt.outcome}, {"qty", receipt.qty},
                {"burned", json(receipt.burned)}, {"minted", json(receipt.minted)}};
    }

    if (verb == "nr_no_set") {
        const MarketSpec& spec = market_for_trading(get_string(p, "market"));
        auto receipt = negrisk_convert_no_set(ledger_, spec, cmd.actor, get_string(p, "outcome"),
                                              get_micro(p, "qty"));
        audit(spec.id);
        return {{"market", receipt.market}, {"outcome", receipt.outcome}, {"qty", receipt.qty},
                {"burned", json(receipt.burned)}, {"minted", json(receipt.minted)},
                {"cash", receipt.cash}};
    }

    if (verb == "order_place") {
        const MarketSpec& spec = market_for_trading(get_string(p, "market"));
        std::string side_str = get_string(p, "side");
        require(side_str == "bid" || side_str == "ask", Err::ParseError,
                "side must be 'bid' or 'ask'");
        auto result = books_.place(ledger_, spec, cmd.actor, get_string(p, "label"),
                                   side_str == "bid" ? Side::Bid : Side::Ask,
                                   get_micro(p, "price"), get_micro(p, "qty"), clock_,
                                   config_.taker_fee_bps);
        audit(spec.id);
        return {{"order", result.order_id}, {"fills", fills_json(result.fills)},
                {"resting", result.resting}};
    }

    if (verb == "order_cancel") {
        auto result = books_.cancel(ledger_, get_micro(p, "order"), cmd.actor);
        return {{"order", result.order_id}, {"cancelled", result.cancelled},
                {"cash_refund", result.cash_refund}, {"share_refund", result.share_refund}};
    }

    if (verb == "match_intents") {
        const MarketSpec& spec = market_for_trading(get_string(p, "market"));
        Micro long_price = get_micro(p, "long_price");
        Micro short_price = get_micro(p, "short_price");
        require(long_price == short_price, Err::PriceMismatch,
                "long and short intents quote different prices");
        auto result = books_.match_intents(ledger_, spec, get_string(p, "label"), long_price,
                                           get_micro(p, "qty"), get_string(p, "long"),
                                           get_string(p, "short"));
        audit(spec.id);
        return {{"qty", result.qty}, {"long_cost", result.long_cost},
                {"short_cost", result.short_cost}, {"long_label", result.long_label},
                {"short_label", result.short_label}};
    }

    if (verb == "comp_cross") {
        std::uint64_t order_a = get_micro(p, "order_a");
        const Order* a = books_.find_order(order_a);
        require(a != nullptr, Err::UnknownOrder, "order " + std::to_string(order_a));
        const MarketSpec& spec = market_for_trading(a->market);
        auto result = books_.complementary_cross(ledger_, spec, order_a, get_micro(p, "order_b"));
        audit(spec.id);
        return {{"qty", result.qty}, {"surplus", result.surplus},
                {"cost_a", result.cost_a}, {"cost_b", result.cost_b}};
    }

    if (verb == "amm_create") {
        const MarketSpec& spec = market_for_trading(get_string(p, "market"));
        auto id = pools_.create(ledger_, spec, cmd.actor, get_string(p, "label"),
                                get_micro(p, "shares"), get_micro(p, "cash"),
                                static_cast<int>(get_micro_or(p, "fee_bps", 0)));
        return {{"pool", id}, {"price", pools_.spot_price(ledger_, id)}};
    }

    if (verb == "amm_swap") {
        std::string side_str = get_string(p, "side");
        require(side_str == "buy" || side_str == "sell", Err::ParseError,
                "side must be 'buy' (cash in) or 'sell' (shares in)");
        std::string pool_id = get_string(p, "pool");
        auto result = pools_.swap(ledger_, pool_id, cmd.actor,
                                  side_str == "buy" ? SwapSide::BuyShares : SwapSide::SellShares,
                                  get_micro(p, "amount"));
        if (const CpmmPool* pool = pools_.find(pool_id)) audit(pool->market);
        return {{"in", result.amount_in}, {"out", result.amount_out}, {"price", result.price}};
    }

    if (verb == "amm_add") {
        auto result = pools_.add_liquidity(ledger_, get_string(p, "pool"), cmd.actor,
                                           get_micro(p, "shares"), get_micro(p, "cash"));
        return {{"lp_minted", result.lp_delta}, {"shares", result.shares}, {"cash", result.cash}};
    }

    if (verb == "amm_remove") {
        auto result = pools_.remove_liquidity(ledger_, get_string(p, "pool"), cmd.actor,
                                              get_micro(p, "lp"));
        return {{"lp_burned", -result.lp_delta}, {"shares", result.shares},
                {"cash", result.cash}, {"closed", result.closed}};
    }

    if (verb == "lmsr_create") {
        const MarketSpec& spec = market_for_trading(get_string(p, "market"));
        auto id = lmsr_.create(ledger_, spec, cmd.actor, get_micro(p, "b"), get_micro(p, "bond"));
        audit(spec.id);
        return {{"lmsr", id}};
    }

    if (verb == "lmsr_quote") {
        Micro cost = lmsr_.quote(get_string(p, "lmsr"), get_delta(p, "delta"));
        return {{"cost", cost}};
    }

    if (verb == "lmsr_trade") {
        std::string id = get_string(p, "lmsr");
        const LmsrBook* book = lmsr_.find(id);
        require(book != nullptr, Err::UnknownBookmaker, "bookmaker " + id);
        const MarketSpec& spec = market(book->market);
        auto result = lmsr_.trade(ledger_, spec, id, cmd.actor, get_delta(p, "delta"));
        audit(spec.id);
        return {{"cost", result.cost}, {"prices", json(result.prices)}};
    }

    if (verb == "seed") {
        const MarketSpec& spec = market_for_trading(get_string(p, "market"));
        std::map<std::string, Micro> priors;
        for (const auto& [label, v] : p.at("priors").items()) {
            require(v.is_number_integer(), Err::ParseError, "priors are micro integers");
            priors[label] = v.get<Micro>();
        }
        auto result = seed_bookmaker(ledger_, pools_, spec, cmd.actor, get_micro(p, "capital"),
                                     priors, static_cast<int>(get_micro_or(p, "fee_bps", 0)));
        audit(spec.id);
        return {{"market", result.market}, {"pools", json(result.pools)},
                {"split_escrow", result.split_escrow}, {"pool_cash", result.pool_cash}};
    }

    if (verb == "enroll") {
        resolution_.enroll(ledger_, cmd.actor, get_micro(p, "stake"));
        return {{"account", cmd.actor}, {"stake", resolution_.enrolled_stake(cmd.actor)}};
    }

    if (verb == "propose") {
        const MarketSpec& spec = market(get_string(p, "market"));
        require(!register_of(spec.id).resolved, Err::AlreadyResolved, spec.id);
        bool is_scalar = p.contains("x");
        auto index = resolution_.propose(ledger_, spec, cmd.actor,
                                         is_scalar ? "" : get_string(p, "outcome"),
                                         is_scalar ? get_micro(p, "x") : 0, is_scalar,
                                         get_micro_or(p, "bond", 0), clock_);
        return {{"market", spec.id}, {"proposal", index}};
    }

    if (verb == "dispute") {
        const MarketSpec& spec = market(get_string(p, "market"));
        require(!register_of(spec.id).resolved, Err::AlreadyResolved, spec.id);
        const MarketResolutionState* st = resolution_.find_state(spec.id);
        require(st != nullptr, Err::UnknownMarket, spec.id);
        std::size_t index = st->proposals.size();
        for (std::size_t i = 0; i < st->proposals.size(); ++i)
            if (!st->proposals[i].disputed && !st->proposals[i].settled) index = i;
        require(index < st->proposals.size(), Err::WrongStage, "no pending proposal to dispute");
        resolution_.dispute(ledger_, spec, index, cmd.actor, get_micro_or(p, "bond", 0), clock_,
                            rng_);
        return {{"market", spec.id}, {"proposal", index}, {"stage", resolution_.find_state(spec.id)->stage}};
    }

    if (verb == "arbiter") {
        const MarketSpec& spec = market(get_string(p, "market"));
        require(!register_of(spec.id).resolved, Err::AlreadyResolved, spec.id);
        bool is_scalar = p.contains("x");
        Resolved outcome = resolution_.arbiter_resolve(spec, cmd.actor,
                                                       is_scalar ? "" : get_string(p, "outcome"),
                                                       is_scalar ? get_micro(p, "x") : 0, is_scalar);
        finalize(spec.id, outcome);
        return {{"market", spec.id}, {"finalized", true}};
    }

    if (verb == "commit") {
        const MarketSpec& spec = market(get_string(p, "market"));
        resolution_.commit_vote(spec, cmd.actor, get_string(p, "digest"), clock_);
        return {{"market", spec.id}, {"voter", cmd.actor}};
    }

    if (verb == "reveal") {
        const MarketSpec& spec = market(get_string(p, "market"));
        bool is_scalar = p.contains("x");
        resolution_.reveal_vote(spec, cmd.actor, is_scalar ? "" : get_string(p, "outcome"),
                                is_scalar ? get_micro(p, "x") : 0, is_scalar,
                                p.value("salt", std::string{}), clock_);
        return {{"market", spec.id}, {"voter", cmd.actor}};
    }

    if (verb == "tally") {
        const MarketSpec& spec = market(get_string(p, "market"));
        require(!register_of(spec.id).resolved, Err::AlreadyResolved, spec.id);
        auto result = resolution_.tally(ledger_, spec, clock_, rng_);
        if (result.outcome) finalize(spec.id, *result.outcome);
        json out = {{"market", spec.id},
                    {"quorum_met", result.quorum_met},
                    {"tie", result.tie},
                    {"revealed_stake", result.revealed_stake},
                    {"total_stake", result.total_stake},
                    {"slashes", json(result.slashes)},
                    {"rewards", json(result.rewards)}};
        if (result.outcome) {
            if (result.outcome->is_scalar)
                out["x"] = result.outcome->x;
            else
                out["outcome"] = result.outcome->outcome;
        }
        return out;
    }

    if (verb == "redeem") {
        const MarketSpec& spec = market(get_string(p, "market"));
        auto receipt = redeem(ledger_, spec, register_of(spec.id), cmd.actor,
                              get_string(p, "label"), get_micro(p, "qty"));
        audit(spec.id);
        return {{"market", receipt.market}, {"label", receipt.label}, {"qty", receipt.qty},
                {"paid", receipt.paid}};
    }

    if (verb == "surplus") {
        const MarketSpec& spec = market(get_string(p, "market"));
        const MarketBook* book = ledger_.find_book(spec.id);
        MarketBook empty;
        auto report = surplus_report(spec, book ? *book : empty, register_of(spec.id));
        return {{"market", spec.id},
                {"outstanding_liability", report.outstanding_liability},
                {"treasury", report.treasury},
                {"redeemed", report.redeemed}};
    }

    if (verb == "check_solvency") return solvency_json(get_string(p, "market"));

    if (verb == "arb_scan") {
        const MarketSpec& spec = market(get_string(p, "market"));
        return arb_json(books_.detect_arbitrage(spec));
    }

    if (verb == "snapshot") return {{"snapshot", snapshot()}};

    if (verb == "assert") return run_assert(cmd);

    fail(Err::ParseError, "unknown verb '" + verb + "'");
}

json Engine::run_assert(const Command& cmd) {
    const json& p = cmd.payload;
    std::string check = get_string(p, "check");

    auto expect_eq = [&](Micro actual) {
        Micro expected = get_micro(p, "expect");
        require(actual == expected, Err::AssertionFailed,
                check + ": expected " + std::to_string(expected) + ", got " +
                    std::to_string(actual));
        return json{{"check", check}, {"value", actual}};
    };

    if (check == "cash") {
        const Account* acct = ledger_.find_account(get_string(p, "account"));
        return expect_eq(acct ? acct->cash : 0);
    }
    if (check == "gov") {
        const Account* acct = ledger_.find_account(get_string(p, "account"));
        return expect_eq(acct ? acct->gov : 0);
    }
    if (check == "shares") {
        const Account* acct = ledger_.find_account(get_string(p, "account"));
        return expect_eq(acct ? acct->holding(get_string(p, "market"), get_string(p, "label")) : 0);
    }
    if (check == "supply") {
        const MarketBook* book = ledger_.find_book(get_string(p, "market"));
        Qty supply = 0;
        if (book) {
            auto it = book->supplies.find(get_string(p, "label"));
            if (it != book->supplies.end()) supply = it->second;
        }
        return expect_eq(supply);
    }
    if (check == "treasury") {
        const MarketBook* book = ledger_.find_book(get_string(p, "market"));
        Micro value = 0;
        if (book) {
            if (auto bundle = get_optional_string(p, "bundle")) {
                auto it = book->treasuries.find(*bundle);
                value = it == book->treasuries.end() ? 0 : it->second;
            } else {
                value = book->aggregate_treasury();
            }
        }
        return expect_eq(value);
    }
    if (check == "register") {
        const Register& reg = register_of(get_string(p, "market"));
        if (p.contains("expect_x")) {
            require(reg.resolved, Err::AssertionFailed, "register still unresolved");
            return expect_eq(reg.x);  // reuse integer comparison on x
        }
        std::string expected = get_string(p, "expect");
        std::string actual = reg.resolved ? reg.outcome : "unresolved";
        require(actual == expected, Err::AssertionFailed,
                "register: expected '" + expected + "', got '" + actual + "'");
        return {{"check", check}, {"value", actual}};
    }
    if (check == "solvent") {
        auto report = solvency_json(get_string(p, "market"));
        bool expected = p.value("expect", true);
        require(report.at("ok").get<bool>() == expected, Err::AssertionFailed,
                "solvency of " + get_string(p, "market") + " is " +
                    (report.at("ok").get<bool>() ? "ok" : "broken"));
        return report;
    }
    if (check == "best_bid" || check == "best_ask") {
        auto best = check == "best_bid"
                        ? books_.best_bid(get_string(p, "market"), get_string(p, "label"))
                        : books_.best_ask(get_string(p, "market"), get_string(p, "label"));
        if (p.at("expect").is_null()) {
            require(!best.has_value(), Err::AssertionFailed, check + ": expected an empty side");
            return {{"check", check}};
        }
        require(best.has_value(), Err::AssertionFailed, check + ": side is empty");
        return expect_eq(*best);
    }
    if (check == "pool_price") return expect_eq(pools_.spot_price(ledger_, get_string(p, "pool")));
    if (check == "lmsr_price") {
        auto prices = lmsr_.prices(get_string(p, "lmsr"));
        auto it = prices.find(get_string(p, "label"));
        require(it != prices.end(), Err::UnknownLabel, "no such label");
        return expect_eq(it->second);
    }
    if (check == "arb") {
        auto report = books_.detect_arbitrage(market(get_string(p, "market")));
        std::vector<std::string> actual;
        for (const auto& f : report.flags) actual.push_back(f.type);
        std::sort(actual.begin(), actual.end());
        std::vector<std::string> expected = p.at("expect").get<std::vector<std::string>>();
        std::sort(expected.begin(), expected.end());
        require(actual == expected, Err::AssertionFailed,
                "arb flags differ on " + report.market);
        return arb_json(report);
    }
    if (check == "total_cash") return expect_eq(ledger_.total_cash());

    fail(Err::ParseError, "unknown assert check '" + check + "'");
}

json Engine::snapshot() const {
    json snap;
    snap["schema"] = "pmx-snapshot-v1";
    snap["numeraire"] = {{"symbol", config_.numeraire}, {"scale", kUnit}};
    snap["accounts"] = ledger_.accounts_to_json();

    json markets = json::object();
    for (const auto& [id, spec] : markets_) {
        json m;
        m["spec"] = market_to_json(spec);
        const Register& reg = registers_.at(id);
        json reg_json = {{"resolved", reg.resolved}};
        if (reg.resolved) {
            reg_json["at"] = reg.finalized_at;
            if (spec.kind == MarketKind::Scalar)
                reg_json["x"] = reg.x;
            else
                reg_json["outcome"] = reg.outcome;
        }
        m["register"] = std::move(reg_json);
        if (const MarketBook* book = ledger_.find_book(id)) {
            json supplies = json::object();
            for (const auto& [label, qty] : book->supplies)
                if (qty != 0) supplies[label] = qty;
            json treasuries = json::object();
            for (const auto& [slice, amount] : book->treasuries)
                if (amount != 0) treasuries[slice] = amount;
            m["supplies"] = std::move(supplies);
            m["treasuries"] = std::move(treasuries);
            m["reserve"] = book->reserve;
            m["redeemed"] = book->redeemed;
        }
        markets[id] = std::move(m);
    }
    snap["markets"] = std::move(markets);
    snap["orders"] = books_.open_orders_json();
    snap["depth"] = books_.depth_json();
    snap["pools"] = pools_.to_json(ledger_);
    snap["lmsr"] = lmsr_.to_json();
    snap["resolution"] = resolution_.to_json();
    snap["totals"] = {{"cash", ledger_.total_cash()}, {"gov", ledger_.total_gov()}};
    return snap;
}

std::string Engine::snapshot_digest() const { return sha256_hex(snapshot().dump()); }

}  // namespace pmx
