#include "pmx/orderbook.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace pmx {

using nlohmann::json;

const char* to_string(Side side) { return side == Side::Bid ? "bid" : "ask"; }

namespace {

Micro fill_cost(Micro price, Qty qty) { return muldiv_floor(price, qty, kUnit); }

Micro taker_fee(Micro cost, int fee_bps) {
    return fee_bps > 0 ? muldiv_floor(cost, fee_bps, 10'000) : 0;
}

}  // namespace

std::optional<std::string> complement_label(const MarketSpec& spec, const std::string& label) {
    switch (spec.kind) {
        case MarketKind::Scalar:
            if (label == kScalarLong) return std::string(kScalarShort);
            if (label == kScalarShort) return std::string(kScalarLong);
            return std::nullopt;
        case MarketKind::Wta:
            if (spec.labels.size() == 2 && spec.has_label(label))
                return spec.labels[0] == label ? spec.labels[1] : spec.labels[0];
            return std::nullopt;
        case MarketKind::Ynb:
        case MarketKind::YnbNegRisk: {
            const Bundle* b = spec.bundle_of_label(label);
            if (!b) return std::nullopt;
            return b->yes_label == label ? b->no_label : b->yes_label;
        }
        case MarketKind::General:
            return std::nullopt;
    }
    return std::nullopt;
}

std::string pair_slice(const MarketSpec& spec, const std::string& label) {
    if (spec.is_ynb()) {
        const Bundle* b = spec.bundle_of_label(label);
        require(b != nullptr, Err::UnknownLabel, spec.id + ": no bundle for '" + label + "'");
        return b->outcome;
    }
    return "";
}

const OrderBooks::Book* OrderBooks::find_book(const std::string& market,
                                              const std::string& label) const {
    auto it = books_.find({market, label});
    return it == books_.end() ? nullptr : &it->second;
}

const Order* OrderBooks::find_order(std::uint64_t id) const {
    auto it = orders_.find(id);
    return it == orders_.end() ? nullptr : &it->second;
}

void OrderBooks::record_trade(const std::string& market, const std::string& label, Micro price) {
    if (trade_hook_) trade_hook_(market, label, price);
}

void OrderBooks::remove_resting(Order& order) {
    auto& b = book(order.market, order.label);
    auto strip = [&](auto& side_map) {
        auto it = side_map.find(order.price);
        if (it == side_map.end()) return;
        auto& q = it->second;
        q.erase(std::remove(q.begin(), q.end(), order.id), q.end());
        if (q.empty()) side_map.erase(it);
    };
    if (order.side == Side::Bid)
        strip(b.bids);
    else
        strip(b.asks);
}

PlaceResult OrderBooks::place(Ledger& ledger, const MarketSpec& spec, const std::string& account,
                              const std::string& label, Side side, Micro price, Qty qty, Tick now,
                              int taker_fee_bps) {
    require(spec.has_label(label), Err::UnknownLabel, spec.id + ": no label '" + label + "'");
    require(price > 0 && price < kUnit, Err::PriceOutOfRange,
            "limit price must lie strictly between 0 and the unit payout");
    require(qty > 0, Err::InvalidSpec, "order quantity must be positive");

    Order order;
    order.id = next_id_++;
    order.account = account;
    order.market = spec.id;
    order.label = label;
    order.side = side;
    order.price = price;
    order.open = qty;
    order.tick = now;

    if (side == Side::Bid) {
        // ceil so the escrow covers any partial-fill split of the quantity.
        Micro cost_escrow = muldiv_ceil(price, qty, kUnit);
        order.escrow = cost_escrow + taker_fee(cost_escrow, taker_fee_bps);
        ledger.debit_cash(account, order.escrow);
        ledger.credit_cash(kClobVault, order.escrow);
    } else {
        ledger.debit_shares(account, spec.id, label, qty);
        ledger.credit_shares(kClobVault, spec.id, label, qty);
    }

    PlaceResult result;
    result.order_id = order.id;
    auto& b = book(spec.id, label);

    if (side == Side::Bid) {
        while (order.open > 0 && !b.asks.empty() && b.asks.begin()->first <= price) {
            auto level = b.asks.begin();
            auto& queue = level->second;
            std::uint64_t maker_id = queue.front();
            Order& maker = orders_.at(maker_id);
            Qty traded = std::min(order.open, maker.open);
            Micro cost = fill_cost(maker.price, traded);
            Micro fee = taker_fee(cost, taker_fee_bps);

            // escrow -> seller; shares vault -> buyer; fee -> fee account
            ledger.debit_cash(kClobVault, cost + fee);
            ledger.credit_cash(maker.account, cost);
            if (fee > 0) ledger.credit_cash(kFeeAccount, fee);
            order.escrow -= cost + fee;
            ledger.debit_shares(kClobVault, spec.id, label, traded);
            ledger.credit_shares(account, spec.id, label, traded);

            maker.open -= traded;
            order.open -= traded;
            result.fills.push_back({maker_id, maker.account, account, maker.price, traded, cost, fee});
            record_trade(spec.id, label, maker.price);
            if (maker.open == 0) {
                queue.pop_front();
                if (queue.empty()) b.asks.erase(level);
                orders_.erase(maker_id);
            }
        }
        if (order.open == 0 && order.escrow > 0) {
            // rounding headroom back to the taker
            ledger.debit_cash(kClobVault, order.escrow);
            ledger.credit_cash(account, order.escrow);
            order.escrow = 0;
        }
    } else {
        while (order.open > 0 && !b.bids.empty() && b.bids.begin()->first >= price) {
            auto level = b.bids.begin();
            auto& queue = level->second;
            std::uint64_t maker_id = queue.front();
            Order& maker = orders_.at(maker_id);
            Qty traded = std::min(order.open, maker.open);
            Micro cost = fill_cost(maker.price, traded);
            Micro fee = taker_fee(cost, taker_fee_bps);

            // maker escrow -> seller (net of taker fee); shares vault -> maker
            ledger.debit_cash(kClobVault, cost);
            ledger.credit_cash(account, cost - fee);
            if (fee > 0) ledger.credit_cash(kFeeAccount, fee);
            maker.escrow -= cost;
            ledger.debit_shares(kClobVault, spec.id, label, traded);
            ledger.credit_shares(maker.account, spec.id, label, traded);

            maker.open -= traded;
            order.open -= traded;
            result.fills.push_back({maker_id, maker.account, account, maker.price, traded, cost, fee});
            record_trade(spec.id, label, maker.price);
            if (maker.open == 0) {
                if (maker.escrow > 0) {
                    ledger.debit_cash(kClobVault, maker.escrow);
                    ledger.credit_cash(maker.account, maker.escrow);
                    maker.escrow = 0;
                }
                queue.pop_front();
                if (queue.empty()) b.bids.erase(level);
                orders_.erase(maker_id);
            }
        }
    }

    result.resting = order.open;
    if (order.open > 0) {
        if (order.side == Side::Bid)
            b.bids[order.price].push_back(order.id);
        else
            b.asks[order.price].push_back(order.id);
        orders_.emplace(order.id, order);
    }
    return result;
}

CancelResult OrderBooks::cancel(Ledger& ledger, std::uint64_t order_id, const std::string& caller) {
    auto it = orders_.find(order_id);
    require(it != orders_.end(), Err::UnknownOrder, "order " + std::to_string(order_id));
    Order& order = it->second;
    require(caller.empty() || caller == order.account, Err::NotOwner,
            caller + " does not own order " + std::to_string(order_id));

    CancelResult result;
    result.order_id = order_id;
    result.cancelled = order.open;
    if (order.side == Side::Bid) {
        result.cash_refund = order.escrow;
        if (order.escrow > 0) {
            ledger.debit_cash(kClobVault, order.escrow);
            ledger.credit_cash(order.account, order.escrow);
        }
    } else {
        result.share_refund = order.open;
        ledger.debit_shares(kClobVault, order.market, order.label, order.open);
        ledger.credit_shares(order.account, order.market, order.label, order.open);
    }
    remove_resting(order);
    orders_.erase(it);
    return result;
}

std::vector<CancelResult> OrderBooks::cancel_market(Ledger& ledger, const std::string& market) {
    std::vector<std::uint64_t> ids;
    for (const auto& [id, order] : orders_)
        if (order.market == market) ids.push_back(id);
    std::vector<CancelResult> out;
    out.reserve(ids.size());
    for (auto id : ids) out.push_back(cancel(ledger, id, ""));
    return out;
}

MatchResult OrderBooks::match_intents(Ledger& ledger, const MarketSpec& spec,
                                      const std::string& label, Micro price, Qty qty,
                                      const std::string& long_account,
                                      const std::string& short_account) {
    auto comp = complement_label(spec, label);
    require(comp.has_value(), Err::UnknownLabel,
            spec.id + ": '" + label + "' has no complementary label to issue against");
    require(price > 0 && price < kUnit, Err::PriceOutOfRange,
            "position price must lie strictly between 0 and the unit payout");
    require(qty > 0, Err::InvalidSpec, "quantity must be positive");

    MatchResult result;
    result.qty = qty;
    result.long_label = label;
    result.short_label = *comp;
    result.long_cost = fill_cost(price, qty);
    result.short_cost = qty - result.long_cost;  // maximum-loss margins sum to $1 x qty

    require(ledger.account(long_account).cash >= result.long_cost, Err::InsufficientMargin,
            long_account + " cannot cover the long margin");
    require(ledger.account(short_account).cash >= result.short_cost, Err::InsufficientMargin,
            short_account + " cannot cover the short margin");

    ledger.debit_cash(long_account, result.long_cost);
    ledger.debit_cash(short_account, result.short_cost);
    auto& book = ledger.book(spec.id);
    book.treasuries[pair_slice(spec, label)] += qty;
    book.supplies[label] += qty;
    book.supplies[*comp] += qty;
    ledger.credit_shares(long_account, spec.id, label, qty);
    ledger.credit_shares(short_account, spec.id, *comp, qty);
    record_trade(spec.id, label, price);
    record_trade(spec.id, *comp, kUnit - price);
    return result;
}

CrossResult OrderBooks::complementary_cross(Ledger& ledger, const MarketSpec& spec,
                                            std::uint64_t order_a, std::uint64_t order_b) {
    auto ita = orders_.find(order_a);
    auto itb = orders_.find(order_b);
    require(ita != orders_.end(), Err::UnknownOrder, "order " + std::to_string(order_a));
    require(itb != orders_.end(), Err::UnknownOrder, "order " + std::to_string(order_b));
    Order& a = ita->second;
    Order& b = itb->second;
    require(a.market == spec.id && b.market == spec.id, Err::UnknownOrder,
            "orders belong to another market");
    require(a.side == Side::Bid && b.side == Side::Bid, Err::PricesDoNotCover,
            "complementary cross pairs two bids");
    auto comp = complement_label(spec, a.label);
    require(comp.has_value() && *comp == b.label, Err::UnknownLabel,
            "orders are not on complementary labels");
    require(a.price + b.price >= kUnit, Err::PricesDoNotCover,
            "bid prices sum below the unit payout");

    Qty qty = std::min(a.open, b.open);
    CrossResult result;
    result.qty = qty;
    // Effective prices are the quoted ones scaled down to sum to exactly $1;
    // the surplus (combined - 1) flows back pro rata to contributed escrow.
    Micro sum = a.price + b.price;
    result.cost_a = muldiv_floor(a.price, qty, sum);
    result.cost_b = qty - result.cost_a;
    Micro quoted_a = fill_cost(a.price, qty);
    Micro quoted_b = fill_cost(b.price, qty);
    result.surplus = quoted_a + quoted_b - qty;

    auto settle_leg = [&](Order& order, Micro cost, const std::string& label) {
        ledger.debit_cash(kClobVault, cost);
        order.escrow -= cost;
        ledger.credit_shares(order.account, spec.id, label, qty);
        record_trade(spec.id, label, muldiv_floor(cost, kUnit, qty));
        order.open -= qty;
        if (order.open == 0) {
            if (order.escrow > 0) {
                ledger.debit_cash(kClobVault, order.escrow);
                ledger.credit_cash(order.account, order.escrow);
                order.escrow = 0;
            }
            remove_resting(order);
        }
    };

    // the $1 x qty moves escrow -> treasury and mints the pair
    auto& book = ledger.book(spec.id);
    book.treasuries[pair_slice(spec, a.label)] += qty;
    book.supplies[a.label] += qty;
    book.supplies[b.label] += qty;
    settle_leg(a, result.cost_a, a.label);
    settle_leg(b, result.cost_b, b.label);
    if (a.open == 0) orders_.erase(order_a);
    if (b.open == 0) orders_.erase(order_b);
    return result;
}

std::optional<Micro> OrderBooks::best_bid(const std::string& market,
                                          const std::string& label) const {
    const Book* b = find_book(market, label);
    if (!b || b->bids.empty()) return std::nullopt;
    return b->bids.begin()->first;
}

std::optional<Micro> OrderBooks::best_ask(const std::string& market,
                                          const std::string& label) const {
    const Book* b = find_book(market, label);
    if (!b || b->asks.empty()) return std::nullopt;
    return b->asks.begin()->first;
}

std::optional<LevelDepth> OrderBooks::best_level(const std::string& market,
                                                 const std::string& label, Side side) const {
    const Book* b = find_book(market, label);
    if (!b) return std::nullopt;
    auto sum_level = [&](const auto& level) {
        LevelDepth d{level.first, 0};
        for (auto id : level.second) d.depth += orders_.at(id).open;
        return d;
    };
    if (side == Side::Bid) {
        if (b->bids.empty()) return std::nullopt;
        return sum_level(*b->bids.begin());
    }
    if (b->asks.empty()) return std::nullopt;
    return sum_level(*b->asks.begin());
}

ArbReport OrderBooks::detect_arbitrage(const MarketSpec& spec) const {
    ArbReport report;
    report.market = spec.id;

    auto sum_check = [&](const std::vector<std::string>& legs) {
        Micro bid_sum = 0, ask_sum = 0;
        Qty bid_depth = 0, ask_depth = 0;
        bool bids_ok = true, asks_ok = true;
        bool first = true;
        for (const auto& label : legs) {
            auto bid = best_level(spec.id, label, Side::Bid);
            auto ask = best_level(spec.id, label, Side::Ask);
            if (bid) {
                bid_sum += bid->price;
                bid_depth = first ? bid->depth : std::min(bid_depth, bid->depth);
            } else {
                bids_ok = false;
            }
            if (ask) {
                ask_sum += ask->price;
                ask_depth = first ? ask->depth : std::min(ask_depth, ask->depth);
            } else {
                asks_ok = false;
            }
            first = false;
        }
        if (!bids_ok || !asks_ok) report.partial = true;
        if (bids_ok && bid_sum > kUnit)
            report.flags.push_back({"SUM_BIDS_GT_1", "", bid_sum, bid_depth,
                                    muldiv_floor(bid_sum - kUnit, bid_depth, kUnit)});
        if (asks_ok && ask_sum < kUnit)
            report.flags.push_back({"SUM_ASKS_LT_1", "", ask_sum, ask_depth,
                                    muldiv_floor(kUnit - ask_sum, ask_depth, kUnit)});
    };

    if (spec.kind == MarketKind::Wta) {
        sum_check(spec.labels);
    } else if (spec.kind == MarketKind::YnbNegRisk) {
        std::vector<std::string> yes_legs;
        for (const auto& b : spec.bundles) yes_legs.push_back(b.yes_label);
        sum_check(yes_legs);
    }

    if (spec.is_ynb()) {
        for (const auto& b : spec.bundles) {
            auto bid_y = best_level(spec.id, b.yes_label, Side::Bid);
            auto bid_n = best_level(spec.id, b.no_label, Side::Bid);
            auto ask_y = best_level(spec.id, b.yes_label, Side::Ask);
            auto ask_n = best_level(spec.id, b.no_label, Side::Ask);
            if (bid_y && bid_n) {
                Micro sum = bid_y->price + bid_n->price;
                Qty depth = std::min(bid_y->depth, bid_n->depth);
                if (sum > kUnit)
                    report.flags.push_back({"BUNDLE_BIDS_GT_1", b.outcome, sum, depth,
                                            muldiv_floor(sum - kUnit, depth, kUnit)});
            } else {
                report.partial = true;
            }
            if (ask_y && ask_n) {
                Micro sum = ask_y->price + ask_n->price;
                Qty depth = std::min(ask_y->depth, ask_n->depth);
                if (sum < kUnit)
                    report.flags.push_back({"BUNDLE_ASKS_LT_1", b.outcome, sum, depth,
                                            muldiv_floor(kUnit - sum, depth, kUnit)});
            } else {
                report.partial = true;
            }
        }
    }
    return report;
}

json OrderBooks::open_orders_json() const {
    json out = json::array();
    for (const auto& [id, order] : orders_) {
        out.push_back({{"id", id},
                       {"account", order.account},
                       {"market", order.market},
                       {"label", order.label},
                       {"side", to_string(order.side)},
                       {"price", order.price},
                       {"open", order.open},
                       {"escrow", order.escrow},
                       {"tick", order.tick}});
    }
    return out;
}

json OrderBooks::depth_json() const {
    json out = json::object();
    for (const auto& [key, book] : books_) {
        json levels;
        json bids = json::array();
        for (const auto& [price, queue] : book.bids) {
            Qty depth = 0;
            for (auto id : queue) depth += orders_.at(id).open;
            bids.push_back({{"price", price}, {"qty", depth}});
        }
        json asks = json::array();
        for (const auto& [price, queue] : book.asks) {
            Qty depth = 0;
            for (auto id : queue) depth += orders_.at(id).open;
            asks.push_back({{"price", price}, {"qty", depth}});
        }
        if (bids.empty() && asks.empty()) continue;
        levels["bids"] = std::move(bids);
        levels["asks"] = std::move(asks);
        out[key.first][key.second] = std::move(levels);
    }
    return out;
}

}  // namespace pmx
