#include "pmx/gadgets.hpp"

#include <vector>

namespace pmx {

namespace {

// Labels minted by a $1 split and the treasury slice they are backed by.
struct SplitSet {
    std::vector<std::string> labels;
    std::string slice;  // treasury key
};

SplitSet split_set(const MarketSpec& spec, const std::optional<std::string>& bundle) {
    switch (spec.kind) {
        case MarketKind::Wta:
            require(!bundle, Err::UnknownBundle, "WTA markets have no bundles");
            return {spec.labels, ""};
        case MarketKind::Scalar:
            require(!bundle, Err::UnknownBundle, "scalar markets have no bundles");
            return {{kScalarLong, kScalarShort}, ""};
        case MarketKind::Ynb:
        case MarketKind::YnbNegRisk: {
            require(bundle.has_value(), Err::BundleRequired,
                    spec.id + ": YNB splits name a bundle");
            const Bundle* b = spec.find_bundle(*bundle);
            require(b != nullptr, Err::UnknownBundle, spec.id + ": no bundle '" + *bundle + "'");
            return {{b->yes_label, b->no_label}, b->outcome};
        }
        case MarketKind::General:
            fail(Err::UnsupportedKind, spec.id + ": general markets define no complete set");
    }
    fail(Err::UnsupportedKind, "unreachable");
}

}  // namespace

SplitReceipt split(Ledger& ledger, const MarketSpec& spec, const std::string& account,
                   const std::optional<std::string>& bundle, Micro amount) {
    require(amount >= 0, Err::InvalidSpec, "split amount must be nonnegative");
    auto set = split_set(spec, bundle);
    SplitReceipt receipt{spec.id, set.slice, amount, {}};
    if (amount == 0) return receipt;

    ledger.debit_cash(account, amount);
    auto& book = ledger.book(spec.id);
    book.treasuries[set.slice] += amount;
    for (const auto& label : set.labels) {
        book.supplies[label] += amount;
        ledger.credit_shares(account, spec.id, label, amount);
        receipt.minted[label] = amount;
    }
    return receipt;
}

MergeReceipt merge(Ledger& ledger, const MarketSpec& spec, const std::string& account,
                   const std::optional<std::string>& bundle, Qty qty) {
    require(qty >= 0, Err::InvalidSpec, "merge quantity must be nonnegative");
    auto set = split_set(spec, bundle);
    MergeReceipt receipt{spec.id, set.slice, qty, 0};
    if (qty == 0) return receipt;

    for (const auto& label : set.labels) {
        Qty held = ledger.account(account).holding(spec.id, label);
        require(held >= qty, Err::IncompleteSet,
                account + " holds " + std::to_string(held) + " of " + label + ", needs " +
                    std::to_string(qty));
    }
    auto& book = ledger.book(spec.id);
    for (const auto& label : set.labels) {
        ledger.debit_shares(account, spec.id, label, qty);
        book.supplies[label] -= qty;
    }
    book.treasuries[set.slice] -= qty;
    ledger.credit_cash(account, qty);
    receipt.credited = qty;
    return receipt;
}

ConvertReceipt negrisk_convert_no(Ledger& ledger, const MarketSpec& spec,
                                  const std::string& account, const std::string& outcome,
                                  Qty qty) {
    require(spec.kind == MarketKind::YnbNegRisk, Err::NotNegRisk,
            spec.id + " is not a negRisk market");
    require(qty >= 0, Err::InvalidSpec, "convert quantity must be nonnegative");
    const Bundle* b = spec.find_bundle(outcome);
    require(b != nullptr, Err::UnknownOutcome, spec.id + ": no bundle '" + outcome + "'");

    ConvertReceipt receipt{spec.id, outcome, qty, {}, {}, 0};
    if (qty == 0) return receipt;

    // Burn k_N against bundle k; the freed cover moves into the shared
    // reserve, which backs the YES shares minted in every other bundle
    // (jointly WTA, so exactly one of them pays).
    ledger.debit_shares(account, spec.id, b->no_label, qty);
    auto& book = ledger.book(spec.id);
    book.supplies[b->no_label] -= qty;
    book.treasuries[b->outcome] -= qty;
    book.reserve += qty;
    receipt.burned[b->no_label] = qty;
    for (const auto& other : spec.bundles) {
        if (other.outcome == outcome) continue;
        book.supplies[other.yes_label] += qty;
        ledger.credit_shares(account, spec.id, other.yes_label, qty);
        receipt.minted[other.yes_label] = qty;
    }
    return receipt;
}

ConvertReceipt negrisk_convert_no_set(Ledger& ledger, const MarketSpec& spec,
                                      const std::string& account, const std::string& outcome,
                                      Qty qty) {
    require(spec.kind == MarketKind::YnbNegRisk, Err::NotNegRisk,
            spec.id + " is not a negRisk market");
    require(qty >= 0, Err::InvalidSpec, "convert quantity must be nonnegative");
    const Bundle* target = spec.find_bundle(outcome);
    require(target != nullptr, Err::UnknownOutcome, spec.id + ": no bundle '" + outcome + "'");

    ConvertReceipt receipt{spec.id, outcome, qty, {}, {}, 0};
    if (qty == 0) return receipt;

    for (const auto& b : spec.bundles) {
        if (b.outcome == outcome) continue;
        Qty held = ledger.account(account).holding(spec.id, b.no_label);
        require(held >= qty, Err::IncompleteSet,
                account + " holds " + std::to_string(held) + " of " + b.no_label + ", needs " +
                    std::to_string(qty));
    }

    auto& book = ledger.book(spec.id);
    Qty n = static_cast<Qty>(spec.bundles.size());
    for (const auto& b : spec.bundles) {
        if (b.outcome == outcome) continue;
        ledger.debit_shares(account, spec.id, b.no_label, qty);
        book.supplies[b.no_label] -= qty;
        book.treasuries[b.outcome] -= qty;
        book.reserve += qty;
        receipt.burned[b.no_label] = qty;
    }
    // (n-1) quanta of cover entered the reserve; one stays to back the newly
    // minted k_Y, the other (n-2) pay out as cash.
    book.supplies[target->yes_label] += qty;
    ledger.credit_shares(account, spec.id, target->yes_label, qty);
    receipt.minted[target->yes_label] = qty;
    Micro cash = (n - 2) * qty;
    book.reserve -= cash;
    ledger.credit_cash(account, cash);
    receipt.cash = cash;
    return receipt;
}

}  // namespace pmx
