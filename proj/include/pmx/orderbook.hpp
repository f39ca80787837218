// Central limit order book per share label: price-time priority matching,
// futures-style matched issuance, complementary-bid crossing and the
// arbitrage scanner over quoted books.
#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmx/ledger.hpp"
#include "pmx/market.hpp"

namespace pmx {

enum class Side { Bid, Ask };

const char* to_string(Side side);

struct Order {
    std::uint64_t id = 0;
    std::string account;
    std::string market;
    std::string label;
    Side side = Side::Bid;
    Micro price = 0;  // micro-units per whole share
    Qty open = 0;     // unfilled quantity, micro-shares
    Micro escrow = 0; // numeraire still escrowed (bids only)
    Tick tick = 0;
};

struct Fill {
    std::uint64_t maker_order = 0;
    std::string maker;
    std::string taker;
    Micro price = 0;  // resting (maker) price
    Qty qty = 0;
    Micro cost = 0;   // numeraire paid by the buyer
    Micro fee = 0;    // taker fee, if configured
};

struct PlaceResult {
    std::uint64_t order_id = 0;
    std::vector<Fill> fills;
    Qty resting = 0;
};

struct CancelResult {
    std::uint64_t order_id = 0;
    Qty cancelled = 0;
    Micro cash_refund = 0;
    Qty share_refund = 0;
};

struct MatchResult {
    Qty qty = 0;
    Micro long_cost = 0;
    Micro short_cost = 0;
    std::string long_label;
    std::string short_label;
};

struct CrossResult {
    Qty qty = 0;
    Micro surplus = 0;
    Micro cost_a = 0;
    Micro cost_b = 0;
};

struct ArbFlag {
    std::string type;    // SUM_BIDS_GT_1 | SUM_ASKS_LT_1 | BUNDLE_BIDS_GT_1 | BUNDLE_ASKS_LT_1
    std::string bundle;  // bundle checks only
    Micro price_sum = 0;
    Qty depth = 0;       // min best-level depth across the legs
    Micro profit = 0;    // extractable at that depth
};

struct ArbReport {
    std::string market;
    bool partial = false;  // some legs unquoted; no flag emitted for them
    std::vector<ArbFlag> flags;
};

struct LevelDepth {
    Micro price = 0;
    Qty depth = 0;
};

class OrderBooks {
  public:
    using TradeHook = std::function<void(const std::string& market, const std::string& label,
                                         Micro price)>;

    // Invoked on every execution; the engine feeds auto-resolve price streaks.
    void set_trade_hook(TradeHook hook) { trade_hook_ = std::move(hook); }

    PlaceResult place(Ledger& ledger, const MarketSpec& spec, const std::string& account,
                      const std::string& label, Side side, Micro price, Qty qty, Tick now,
                      int taker_fee_bps);
    CancelResult cancel(Ledger& ledger, std::uint64_t order_id, const std::string& caller);

    // Matched issuance: long and short margin a fresh pair at one price.
    MatchResult match_intents(Ledger& ledger, const MarketSpec& spec, const std::string& label,
                              Micro price, Qty qty, const std::string& long_account,
                              const std::string& short_account);

    // Two resting bids on complementary labels jointly fund a split.
    CrossResult complementary_cross(Ledger& ledger, const MarketSpec& spec,
                                    std::uint64_t order_a, std::uint64_t order_b);

    ArbReport detect_arbitrage(const MarketSpec& spec) const;

    // Resolution cancels all resting orders with escrow refunds.
    std::vector<CancelResult> cancel_market(Ledger& ledger, const std::string& market);

    std::optional<Micro> best_bid(const std::string& market, const std::string& label) const;
    std::optional<Micro> best_ask(const std::string& market, const std::string& label) const;
    std::optional<LevelDepth> best_level(const std::string& market, const std::string& label,
                                         Side side) const;
    const Order* find_order(std::uint64_t id) const;

    nlohmann::json open_orders_json() const;
    nlohmann::json depth_json() const;

  private:
    struct Book {
        // price level -> order ids, FIFO within level
        std::map<Micro, std::deque<std::uint64_t>, std::greater<Micro>> bids;
        std::map<Micro, std::deque<std::uint64_t>> asks;
    };

    using BookKey = std::pair<std::string, std::string>;

    Book& book(const std::string& market, const std::string& label) {
        return books_[{market, label}];
    }
    const Book* find_book(const std::string& market, const std::string& label) const;
    void remove_resting(Order& order);
    void record_trade(const std::string& market, const std::string& label, Micro price);

    std::map<BookKey, Book> books_;
    std::map<std::uint64_t, Order> orders_;
    std::uint64_t next_id_ = 1;
    TradeHook trade_hook_;
};

// The complementary label within the same $1 pair, when one exists
// (YNB bundles, binary WTA, scalar LONG/SHORT).
std::optional<std::string> complement_label(const MarketSpec& spec, const std::string& label);

// Treasury slice a freshly minted pair is booked against.
std::string pair_slice(const MarketSpec& spec, const std::string& label);

}  // namespace pmx
