// Share-algebra gadgets: split, merge and the two negRisk conversions.
#pragma once

#include <map>
#include <optional>
#include <string>

#include "pmx/ledger.hpp"
#include "pmx/market.hpp"

namespace pmx {

struct SplitReceipt {
    std::string market;
    std::string bundle;  // empty for WTA / scalar splits
    Micro amount = 0;
    std::map<std::string, Qty> minted;
};

struct MergeReceipt {
    std::string market;
    std::string bundle;
    Qty qty = 0;
    Micro credited = 0;
};

struct ConvertReceipt {
    std::string market;
    std::string outcome;
    Qty qty = 0;
    std::map<std::string, Qty> burned;
    std::map<std::string, Qty> minted;
    Micro cash = 0;
};

// Mint a complete portfolio against `amount` numeraire. WTA/scalar markets
// take no bundle; YNB kinds require one.
SplitReceipt split(Ledger& ledger, const MarketSpec& spec, const std::string& account,
                   const std::optional<std::string>& bundle, Micro amount);

// Burn a complete portfolio, crediting qty x 1 unit. Inverse of split.
MergeReceipt merge(Ledger& ledger, const MarketSpec& spec, const std::string& account,
                   const std::optional<std::string>& bundle, Qty qty);

// k_N -> one YES share of every other outcome (negRisk markets only).
ConvertReceipt negrisk_convert_no(Ledger& ledger, const MarketSpec& spec,
                                  const std::string& account, const std::string& outcome, Qty qty);

// {l_N : l != k} -> k_Y plus (|Omega|-2) units of cash.
ConvertReceipt negrisk_convert_no_set(Ledger& ledger, const MarketSpec& spec,
                                      const std::string& account, const std::string& outcome,
                                      Qty qty);

}  // namespace pmx
