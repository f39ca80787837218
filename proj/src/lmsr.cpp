#include "pmx/lmsr.hpp"

#include <nlohmann/json.hpp>

#include <cfenv>
#include <cmath>

namespace pmx {

using nlohmann::json;

namespace {

// C(q) = b ln sum_i exp(q_i / b), in whole units; stable log-sum-exp.
double cost_units(double b_units, const std::vector<double>& q_units) {
    double m = q_units.front() / b_units;
    for (double q : q_units) m = std::max(m, q / b_units);
    double sum = 0.0;
    for (double q : q_units) sum += std::exp(q / b_units - m);
    return b_units * (m + std::log(sum));
}

}  // namespace

const LmsrBook& LmsrVenue::get(const std::string& book_id) const {
    auto it = books_.find(book_id);
    require(it != books_.end(), Err::UnknownBookmaker, "bookmaker " + book_id);
    return it->second;
}

const LmsrBook* LmsrVenue::find(const std::string& book_id) const {
    auto it = books_.find(book_id);
    return it == books_.end() ? nullptr : &it->second;
}

std::string LmsrVenue::create(Ledger& ledger, const MarketSpec& spec,
                              const std::string& operator_account, Micro b, Micro bond) {
    require(spec.kind == MarketKind::Wta, Err::UnsupportedKind,
            "LMSR bookmaking runs on WTA markets");
    require(b > 0, Err::InvalidSpec, "liquidity parameter must be positive");
    double worst_loss_units =
        static_cast<double>(b) / kUnit * std::log(static_cast<double>(spec.labels.size()));
    Micro required = static_cast<Micro>(std::ceil(worst_loss_units * kUnit));
    require(bond >= required, Err::InsufficientBond,
            "bond must cover the worst-case loss b ln|Omega| = " + std::to_string(required) +
                " micro");

    LmsrBook book;
    book.id = "lmsr-" + std::to_string(next_id_++);
    book.market = spec.id;
    book.operator_account = operator_account;
    book.b = b;
    book.bond = bond;
    for (const auto& label : spec.labels) book.q[label] = 0;

    ledger.debit_cash(operator_account, bond);
    ledger.book(spec.id).treasuries[""] += bond;
    std::string id = book.id;
    books_.emplace(id, std::move(book));
    return id;
}

Micro LmsrVenue::quote(const std::string& book_id, const std::map<std::string, Qty>& delta) const {
    const LmsrBook& book = get(book_id);
    for (const auto& [label, _] : delta)
        require(book.q.count(label), Err::UnknownLabel,
                book.market + ": no label '" + label + "'");
    double b_units = static_cast<double>(book.b) / kUnit;
    std::vector<double> before, after;
    before.reserve(book.q.size());
    after.reserve(book.q.size());
    for (const auto& [label, q] : book.q) {
        double d = 0.0;
        auto it = delta.find(label);
        if (it != delta.end()) d = static_cast<double>(it->second) / kUnit;
        before.push_back(static_cast<double>(q) / kUnit);
        after.push_back(static_cast<double>(q) / kUnit + d);
    }
    double cost = cost_units(b_units, after) - cost_units(b_units, before);
    // Half-even micro quantization; the residual is absorbed by the bond.
    return static_cast<Micro>(std::llrint(cost * kUnit));
}

std::map<std::string, Micro> LmsrVenue::prices(const std::string& book_id) const {
    const LmsrBook& book = get(book_id);
    double b_units = static_cast<double>(book.b) / kUnit;
    double m = 0.0;
    bool first = true;
    for (const auto& [_, q] : book.q) {
        double v = static_cast<double>(q) / kUnit / b_units;
        m = first ? v : std::max(m, v);
        first = false;
    }
    double denom = 0.0;
    for (const auto& [_, q] : book.q)
        denom += std::exp(static_cast<double>(q) / kUnit / b_units - m);
    std::map<std::string, Micro> out;
    for (const auto& [label, q] : book.q) {
        double p = std::exp(static_cast<double>(q) / kUnit / b_units - m) / denom;
        out[label] = static_cast<Micro>(std::llrint(p * kUnit));
    }
    return out;
}

LmsrTradeResult LmsrVenue::trade(Ledger& ledger, const MarketSpec& spec,
                                 const std::string& book_id, const std::string& account,
                                 const std::map<std::string, Qty>& delta) {
    auto it = books_.find(book_id);
    require(it != books_.end(), Err::UnknownBookmaker, "bookmaker " + book_id);
    LmsrBook& book = it->second;
    require(!book.frozen, Err::MarketResolved, "bookmaker " + book_id + " is frozen");
    for (const auto& [label, d] : delta) {
        require(book.q.count(label), Err::UnknownLabel, spec.id + ": no label '" + label + "'");
        if (d < 0)
            require(ledger.account(account).holding(spec.id, label) >= -d, Err::InsufficientShares,
                    account + " cannot sell " + std::to_string(-d) + " of " + label);
    }

    Micro cost = quote(book_id, delta);
    if (cost > 0)
        require(ledger.account(account).cash >= cost, Err::InsufficientFunds,
                account + " cannot pay the quoted cost");

    // Reject rather than let quantization push the treasury below the
    // worst-case liability.
    auto& market_book = ledger.book(spec.id);
    Micro new_treasury = market_book.aggregate_treasury() + cost;
    Micro liability = 0;
    for (const auto& outcome : spec.outcomes) {
        __int128 total = 0;
        for (const auto& label : spec.labels) {
            Qty supply = 0;
            auto sit = market_book.supplies.find(label);
            if (sit != market_book.supplies.end()) supply = sit->second;
            auto dit = delta.find(label);
            if (dit != delta.end()) supply += dit->second;
            total += static_cast<__int128>(supply) * spec.payoff(label, outcome);
        }
        liability = std::max(liability, ceil_div_i128(total, kUnit));
    }
    require(new_treasury >= liability, Err::BondExhausted,
            "trade would push treasury below the worst-case payout");

    for (const auto& [label, d] : delta) {
        if (d == 0) continue;
        book.q[label] += d;
        market_book.supplies[label] += d;
        if (d > 0)
            ledger.credit_shares(account, spec.id, label, d);
        else
            ledger.debit_shares(account, spec.id, label, -d);
    }
    if (cost > 0) {
        ledger.debit_cash(account, cost);
        market_book.treasuries[""] += cost;
    } else if (cost < 0) {
        market_book.treasuries[""] += cost;  // stays nonnegative per the check above
        ledger.credit_cash(account, -cost);
    }

    LmsrTradeResult result;
    result.cost = cost;
    result.prices = prices(book_id);
    return result;
}

void LmsrVenue::freeze_market(const std::string& market) {
    for (auto& [_, book] : books_)
        if (book.market == market) book.frozen = true;
}

json LmsrVenue::to_json() const {
    json out = json::object();
    for (const auto& [id, book] : books_) {
        json q = json::object();
        for (const auto& [label, qty] : book.q) q[label] = qty;
        out[id] = {{"market", book.market},
                   {"operator", book.operator_account},
                   {"b", book.b},
                   {"bond", book.bond},
                   {"q", std::move(q)},
                   {"frozen", book.frozen}};
    }
    return out;
}

}  // namespace pmx
