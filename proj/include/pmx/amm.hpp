// Constant-product pools for outcome shares and the split-and-seed
// automated-bookmaking procedure.
#pragma once

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <string>
#include <vector>

#include "pmx/ledger.hpp"
#include "pmx/market.hpp"

namespace pmx {

enum class SwapSide { BuyShares, SellShares };

struct CpmmPool {
    std::string id;
    std::string market;
    std::string label;
    std::string vault;  // ledger account holding the reserves
    std::int64_t lp_total = 0;
    std::map<std::string, std::int64_t> lp;
    int fee_bps = 0;
    bool frozen = false;
};

struct SwapResult {
    Micro amount_in = 0;
    Micro amount_out = 0;
    Micro price = 0;  // post-swap spot, micro per share
};

struct LiquidityResult {
    std::int64_t lp_delta = 0;
    Qty shares = 0;
    Micro cash = 0;
    bool closed = false;
};

struct SeedResult {
    std::string market;
    Micro capital = 0;
    std::vector<std::string> pools;
    Micro split_escrow = 0;  // n, locked in the treasury by the split
    Micro pool_cash = 0;     // n, spread across the pools
};

class CpmmVenue {
  public:
    std::string create(Ledger& ledger, const MarketSpec& spec, const std::string& provider,
                       const std::string& label, Qty shares_in, Micro cash_in, int fee_bps);
    SwapResult swap(Ledger& ledger, const std::string& pool_id, const std::string& account,
                    SwapSide side, Micro amount_in);
    LiquidityResult add_liquidity(Ledger& ledger, const std::string& pool_id,
                                  const std::string& account, Qty shares_in, Micro cash_in);
    LiquidityResult remove_liquidity(Ledger& ledger, const std::string& pool_id,
                                     const std::string& account, std::int64_t lp_burn);

    // Post-resolution pools freeze: no swaps or deposits, withdrawals as-is.
    void freeze_market(const std::string& market);

    const CpmmPool* find(const std::string& pool_id) const;
    Qty share_reserve(const Ledger& ledger, const CpmmPool& pool) const;
    Micro cash_reserve(const Ledger& ledger, const CpmmPool& pool) const;
    Micro spot_price(const Ledger& ledger, const std::string& pool_id) const;

    nlohmann::json to_json(const Ledger& ledger) const;

  private:
    CpmmPool& get(const std::string& pool_id);

    std::map<std::string, CpmmPool> pools_;
    int next_id_ = 1;
};

// Split-and-seed bookmaking: half the capital mints complete portfolios, the
// other half funds one pool per label at the prior-implied price. Priors are
// micro-probabilities and must sum to exactly one unit.
SeedResult seed_bookmaker(Ledger& ledger, CpmmVenue& venue, const MarketSpec& spec,
                          const std::string& operator_account, Micro capital,
                          const std::map<std::string, Micro>& priors, int fee_bps);

}  // namespace pmx
