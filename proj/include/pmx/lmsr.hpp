// Hanson LMSR cost-function bookmaker with a posted worst-case-loss bond.
#pragma once

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <string>
#include <vector>

#include "pmx/ledger.hpp"
#include "pmx/market.hpp"

namespace pmx {

struct LmsrBook {
    std::string id;
    std::string market;
    std::string operator_account;
    Micro b = 0;     // liquidity parameter, micro-units
    Micro bond = 0;  // posted at creation, lives in the market treasury
    std::map<std::string, Qty> q;  // outstanding quantity per label
    bool frozen = false;
};

struct LmsrTradeResult {
    Micro cost = 0;  // positive: trader pays; negative: trader receives
    std::map<std::string, Micro> prices;  // post-trade instantaneous prices, micro
};

class LmsrVenue {
  public:
    // Operator posts `bond` >= b ln|Omega| into the market treasury.
    std::string create(Ledger& ledger, const MarketSpec& spec,
                       const std::string& operator_account, Micro b, Micro bond);

    // Pure quote: C(q + delta) - C(q), micro-units rounded half-even.
    Micro quote(const std::string& book_id, const std::map<std::string, Qty>& delta) const;

    LmsrTradeResult trade(Ledger& ledger, const MarketSpec& spec, const std::string& book_id,
                          const std::string& account, const std::map<std::string, Qty>& delta);

    std::map<std::string, Micro> prices(const std::string& book_id) const;

    void freeze_market(const std::string& market);
    const LmsrBook* find(const std::string& book_id) const;

    nlohmann::json to_json() const;

  private:
    const LmsrBook& get(const std::string& book_id) const;

    std::map<std::string, LmsrBook> books_;
    int next_id_ = 1;
};

}  // namespace pmx
