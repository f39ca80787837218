#include "pmx/settlement.hpp"

#include <algorithm>

namespace pmx {

namespace {

Micro unit_payoff(const MarketSpec& spec, const Register& reg, const std::string& label) {
    return spec.kind == MarketKind::Scalar ? spec.payoff_scalar(label, reg.x)
                                           : spec.payoff(label, reg.outcome);
}

// Treasury slice a redemption draws from. Winning YES shares of a negRisk
// market may exceed their own bundle slice once conversions have moved cover
// into the shared reserve, so the draw spills over in that order.
void debit_treasury(const MarketSpec& spec, MarketBook& book, const std::string& label,
                    Micro amount) {
    std::string slice = spec.is_ynb() ? spec.bundle_of_label(label)->outcome : "";
    Micro from_slice = std::min(amount, std::max<Micro>(book.treasuries[slice], 0));
    book.treasuries[slice] -= from_slice;
    Micro rest = amount - from_slice;
    if (rest > 0) {
        require(book.reserve >= rest, Err::InvariantViolation,
                spec.id + ": redemption exceeds treasury and reserve");
        book.reserve -= rest;
    }
}

}  // namespace

RedemptionReceipt redeem(Ledger& ledger, const MarketSpec& spec, const Register& reg,
                         const std::string& account, const std::string& label, Qty qty) {
    require(reg.resolved, Err::NotResolved, spec.id + " has not resolved");
    require(spec.has_label(label), Err::UnknownLabel, spec.id + ": no label '" + label + "'");
    require(qty >= 0, Err::InvalidSpec, "redeem quantity must be nonnegative");

    RedemptionReceipt receipt{account, spec.id, label, qty, 0};
    if (qty == 0) return receipt;

    ledger.debit_shares(account, spec.id, label, qty);
    auto& book = ledger.book(spec.id);
    book.supplies[label] -= qty;

    Micro rate = unit_payoff(spec, reg, label);
    Micro paid = muldiv_floor(qty, rate, kUnit);
    if (paid > 0) {
        debit_treasury(spec, book, label, paid);
        ledger.credit_cash(account, paid);
        book.redeemed += paid;
    }
    receipt.paid = paid;
    return receipt;
}

SurplusReport surplus_report(const MarketSpec& spec, const MarketBook& book, const Register& reg) {
    require(reg.resolved, Err::NotResolved, spec.id + " has not resolved");
    SurplusReport report;
    report.treasury = book.aggregate_treasury();
    report.redeemed = book.redeemed;
    __int128 liability = 0;
    for (const auto& [label, supply] : book.supplies)
        liability += static_cast<__int128>(supply) * unit_payoff(spec, reg, label);
    report.outstanding_liability = ceil_div_i128(liability, kUnit);
    return report;
}

}  // namespace pmx
