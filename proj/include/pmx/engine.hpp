// The engine: one serialized mutation stream over the whole system state —
// catalog, ledger, venues, resolution — with conservation and solvency
// audited after every command.
#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <random>
#include <string>

#include "pmx/amm.hpp"
#include "pmx/ledger.hpp"
#include "pmx/lmsr.hpp"
#include "pmx/market.hpp"
#include "pmx/orderbook.hpp"
#include "pmx/resolution.hpp"
#include "pmx/types.hpp"

namespace pmx {

struct EngineConfig {
    std::string numeraire = "USDC";
    std::uint64_t seed = 0;
    int taker_fee_bps = 0;
};

struct Command {
    Tick tick = 0;
    std::string actor;
    std::string verb;
    nlohmann::json payload;  // canonicalized echo of the whole command object
};

Command command_from_json(const nlohmann::json& j);

class Engine {
  public:
    explicit Engine(EngineConfig config = {});

    // Applies one command; throws Error on rejection (state unchanged).
    nlohmann::json apply(const Command& cmd);

    // Advance the logical clock, processing expiries and auto-resolve rules.
    void advance_to(Tick tick);

    // Canonical archive document: market semantics plus market data. The
    // clock and other transient internals stay out, so replaying the log is
    // the only way to reconstruct a running engine.
    nlohmann::json snapshot() const;
    std::string snapshot_digest() const;

    Tick clock() const { return clock_; }
    const EngineConfig& config() const { return config_; }
    const Ledger& ledger() const { return ledger_; }
    const std::map<std::string, MarketSpec>& markets() const { return markets_; }
    const MarketSpec& market(const std::string& id) const;
    const Register& register_of(const std::string& id) const;
    const OrderBooks& books() const { return books_; }
    const CpmmVenue& pools() const { return pools_; }
    const LmsrVenue& lmsr() const { return lmsr_; }
    const ResolutionEngine& resolution() const { return resolution_; }

    // Direct (non-command) access used by tests and fuzz drivers.
    Ledger& mutable_ledger() { return ledger_; }
    void faucet(const std::string& account, Micro cash, Micro gov);
    void finalize(const std::string& market, const Resolved& outcome);
    void audit(const std::string& market);
    void audit_all() const;

  private:
    nlohmann::json dispatch(const Command& cmd);
    nlohmann::json run_assert(const Command& cmd);
    nlohmann::json solvency_json(const std::string& market) const;
    nlohmann::json arb_json(const ArbReport& report) const;
    const MarketSpec& market_for_trading(const std::string& id) const;  // rejects resolved
    void finalize_if_resolved(std::vector<std::pair<std::string, Resolved>> resolved);

    EngineConfig config_;
    Tick clock_ = 0;
    bool genesis_open_ = true;
    Micro genesis_cash_ = 0;
    Micro genesis_gov_ = 0;
    std::mt19937_64 rng_;
    Ledger ledger_;
    std::map<std::string, MarketSpec> markets_;
    std::map<std::string, Register> registers_;
    OrderBooks books_;
    CpmmVenue pools_;
    LmsrVenue lmsr_;
    ResolutionEngine resolution_;
};

}  // namespace pmx
