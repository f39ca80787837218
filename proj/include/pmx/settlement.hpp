// Post-finalization pull redemption against the treasury.
#pragma once

#include "pmx/ledger.hpp"
#include "pmx/market.hpp"

namespace pmx {

struct RedemptionReceipt {
    std::string account;
    std::string market;
    std::string label;
    Qty qty = 0;
    Micro paid = 0;  // qty x R_j(omega), floor micro; dust stays in the treasury
};

RedemptionReceipt redeem(Ledger& ledger, const MarketSpec& spec, const Register& reg,
                         const std::string& account, const std::string& label, Qty qty);

struct SurplusReport {
    Micro outstanding_liability = 0;  // winning shares not yet redeemed
    Micro treasury = 0;               // residual held in perpetuity
    Micro redeemed = 0;               // cumulative payouts
};

SurplusReport surplus_report(const MarketSpec& spec, const MarketBook& book, const Register& reg);

}  // namespace pmx
