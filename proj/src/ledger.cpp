#include "pmx/ledger.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace pmx {

using nlohmann::json;

const Account* Ledger::find_account(const std::string& id) const {
    auto it = accounts_.find(id);
    return it == accounts_.end() ? nullptr : &it->second;
}

const MarketBook* Ledger::find_book(const std::string& market) const {
    auto it = books_.find(market);
    return it == books_.end() ? nullptr : &it->second;
}

Micro Ledger::cash(const std::string& id) const {
    const Account* acct = find_account(id);
    return acct ? acct->cash : 0;
}

Micro Ledger::gov(const std::string& id) const {
    const Account* acct = find_account(id);
    return acct ? acct->gov : 0;
}

Qty Ledger::holding(const std::string& id, const std::string& market,
                    const std::string& label) const {
    const Account* acct = find_account(id);
    return acct ? acct->holding(market, label) : 0;
}

void Ledger::credit_cash(const std::string& id, Micro amount) {
    require(amount >= 0, Err::InvariantViolation, "negative credit");
    accounts_[id].cash += amount;
}

void Ledger::debit_cash(const std::string& id, Micro amount) {
    require(amount >= 0, Err::InvariantViolation, "negative debit");
    auto& acct = accounts_[id];
    require(acct.cash >= amount, Err::InsufficientFunds,
            id + " holds " + std::to_string(acct.cash) + " micro, needs " + std::to_string(amount));
    acct.cash -= amount;
}

void Ledger::credit_gov(const std::string& id, Micro amount) {
    require(amount >= 0, Err::InvariantViolation, "negative credit");
    accounts_[id].gov += amount;
}

void Ledger::debit_gov(const std::string& id, Micro amount) {
    require(amount >= 0, Err::InvariantViolation, "negative debit");
    auto& acct = accounts_[id];
    require(acct.gov >= amount, Err::InsufficientFunds,
            id + " holds " + std::to_string(acct.gov) + " gov micro, needs " + std::to_string(amount));
    acct.gov -= amount;
}

void Ledger::credit_shares(const std::string& id, const std::string& market,
                           const std::string& label, Qty qty) {
    require(qty >= 0, Err::InvariantViolation, "negative share credit");
    if (qty == 0) return;
    accounts_[id].shares[{market, label}] += qty;
}

void Ledger::debit_shares(const std::string& id, const std::string& market,
                          const std::string& label, Qty qty) {
    require(qty >= 0, Err::InvariantViolation, "negative share debit");
    if (qty == 0) return;
    auto& acct = accounts_[id];
    auto it = acct.shares.find({market, label});
    Qty held = it == acct.shares.end() ? 0 : it->second;
    require(held >= qty, Err::InsufficientShares,
            id + " holds " + std::to_string(held) + " of " + market + "/" + label + ", needs " +
                std::to_string(qty));
    it->second -= qty;
    if (it->second == 0) acct.shares.erase(it);
}

Micro Ledger::total_cash() const {
    Micro total = 0;
    for (const auto& [_, acct] : accounts_) total += acct.cash;
    for (const auto& [_, book] : books_) total += book.aggregate_treasury();
    return total;
}

Micro Ledger::total_gov() const {
    Micro total = 0;
    for (const auto& [_, acct] : accounts_) total += acct.gov;
    return total;
}

json Ledger::accounts_to_json() const {
    json out = json::object();
    for (const auto& [id, acct] : accounts_) {
        json shares = json::object();
        for (const auto& [key, qty] : acct.shares)
            if (qty != 0) shares[key.first][key.second] = qty;
        out[id] = {{"cash", acct.cash}, {"gov", acct.gov}, {"shares", std::move(shares)}};
    }
    return out;
}

TransferReceipt transfer_numeraire(Ledger& ledger, const std::string& from,
                                   const std::string& to, Micro amount) {
    require(amount >= 0, Err::InvalidSpec, "transfer amount must be nonnegative");
    if (amount > 0) {
        ledger.debit_cash(from, amount);
        ledger.credit_cash(to, amount);
    }
    return {from, to, amount, 0};
}

TransferReceipt transfer_shares(Ledger& ledger, const MarketSpec& spec, const std::string& from,
                                const std::string& to, const std::string& label, Qty qty) {
    require(spec.has_label(label), Err::UnknownLabel, spec.id + ": no label '" + label + "'");
    require(qty >= 0, Err::InvalidSpec, "transfer quantity must be nonnegative");
    if (qty > 0) {
        ledger.debit_shares(from, spec.id, label, qty);
        ledger.credit_shares(to, spec.id, label, qty);
    }
    return {from, to, 0, qty};
}

namespace {

Qty supply_of(const MarketBook& book, const std::string& label) {
    auto it = book.supplies.find(label);
    return it == book.supplies.end() ? 0 : it->second;
}

// Liability at one categorical outcome, ceil micro.
Micro liability_at(const MarketSpec& spec, const MarketBook& book, const std::string& outcome) {
    __int128 total = 0;
    for (const auto& label : spec.labels)
        total += static_cast<__int128>(supply_of(book, label)) * spec.payoff(label, outcome);
    return ceil_div_i128(total, kUnit);
}

// Scalar liability when LONG pays r per share.
Micro scalar_liability(const MarketBook& book, Micro r) {
    __int128 total = static_cast<__int128>(supply_of(book, kScalarLong)) * r +
                     static_cast<__int128>(supply_of(book, kScalarShort)) * (kUnit - r);
    return ceil_div_i128(total, kUnit);
}

}  // namespace

SolvencyReport check_solvency(const MarketSpec& spec, const MarketBook& book, const Register* reg) {
    SolvencyReport report;
    report.treasury = book.aggregate_treasury();
    bool resolved = reg && reg->resolved;

    if (spec.kind == MarketKind::Scalar) {
        // Unresolved: the liability is linear in the LONG payout, so the sup
        // sits at a bound. Once X is registered, only that branch can pay.
        std::vector<Micro> rs;
        if (resolved)
            rs.push_back(spec.payoff_scalar(kScalarLong, reg->x));
        else
            rs = {0, kUnit};
        for (Micro r : rs)
            report.worst_case_liability = std::max(report.worst_case_liability, scalar_liability(book, r));
        report.ok = report.treasury >= report.worst_case_liability;
        return report;
    }

    // Post-resolution only the realized outcome remains payable.
    std::vector<std::string> branches =
        resolved ? std::vector<std::string>{reg->outcome} : spec.outcomes;
    for (const auto& outcome : branches)
        report.worst_case_liability =
            std::max(report.worst_case_liability, liability_at(spec, book, outcome));
    report.ok = report.treasury >= report.worst_case_liability;

    if (spec.is_ynb()) {
        for (const auto& b : spec.bundles) {
            BundleSolvency bs;
            bs.bundle = b.outcome;
            for (const auto& outcome : branches) {
                __int128 payout =
                    static_cast<__int128>(supply_of(book, b.yes_label)) * spec.payoff(b.yes_label, outcome) +
                    static_cast<__int128>(supply_of(book, b.no_label)) * spec.payoff(b.no_label, outcome);
                bs.liability = std::max(bs.liability, ceil_div_i128(payout, kUnit));
            }
            auto it = book.treasuries.find(b.outcome);
            bs.treasury = it == book.treasuries.end() ? 0 : it->second;
            bs.ok = bs.treasury >= bs.liability;
            report.per_bundle_ok = report.per_bundle_ok && bs.ok;
            report.bundles.push_back(std::move(bs));
        }
        // Plain YNB keeps every bundle locally solvent; negRisk conversions
        // move cover into the shared reserve, so only the aggregate bound
        // applies there. Post-resolution the negRisk draw order (own slice,
        // then reserve) can leave individual slices short, so the aggregate
        // is the binding check for both.
        if (spec.kind == MarketKind::Ynb && !resolved)
            report.ok = report.ok && report.per_bundle_ok;
    }
    return report;
}

void audit_solvency(const MarketSpec& spec, const MarketBook& book, const Register* reg) {
    auto report = check_solvency(spec, book, reg);
    if (!report.ok)
        fail(Err::InvariantViolation,
             "solvency violated on " + spec.id + ": treasury " + std::to_string(report.treasury) +
                 " < worst-case liability " + std::to_string(report.worst_case_liability));
}

}  // namespace pmx
