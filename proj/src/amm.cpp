#include "pmx/amm.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

#include "pmx/gadgets.hpp"

namespace pmx {

using nlohmann::json;

namespace {

std::int64_t isqrt(__int128 v) {
    if (v <= 0) return 0;
    std::int64_t r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (static_cast<__int128>(r) * r > v) --r;
    while (static_cast<__int128>(r + 1) * (r + 1) <= v) ++r;
    return r;
}

}  // namespace

CpmmPool& CpmmVenue::get(const std::string& pool_id) {
    auto it = pools_.find(pool_id);
    require(it != pools_.end(), Err::UnknownPool, "pool " + pool_id);
    return it->second;
}

const CpmmPool* CpmmVenue::find(const std::string& pool_id) const {
    auto it = pools_.find(pool_id);
    return it == pools_.end() ? nullptr : &it->second;
}

Qty CpmmVenue::share_reserve(const Ledger& ledger, const CpmmPool& pool) const {
    const Account* vault = ledger.find_account(pool.vault);
    return vault ? vault->holding(pool.market, pool.label) : 0;
}

Micro CpmmVenue::cash_reserve(const Ledger& ledger, const CpmmPool& pool) const {
    const Account* vault = ledger.find_account(pool.vault);
    return vault ? vault->cash : 0;
}

Micro CpmmVenue::spot_price(const Ledger& ledger, const std::string& pool_id) const {
    const CpmmPool* pool = find(pool_id);
    require(pool != nullptr, Err::UnknownPool, "pool " + pool_id);
    Qty x = share_reserve(ledger, *pool);
    require(x > 0, Err::ZeroReserve, "pool " + pool_id + " has no share reserve");
    return muldiv_floor(cash_reserve(ledger, *pool), kUnit, x);
}

std::string CpmmVenue::create(Ledger& ledger, const MarketSpec& spec,
                              const std::string& provider, const std::string& label,
                              Qty shares_in, Micro cash_in, int fee_bps) {
    require(spec.has_label(label), Err::UnknownLabel, spec.id + ": no label '" + label + "'");
    require(shares_in > 0 && cash_in > 0, Err::ZeroReserve,
            "both initial reserves must be positive");
    require(fee_bps >= 0 && fee_bps < 10'000, Err::InvalidSpec, "fee must be in [0, 10000) bps");

    CpmmPool pool;
    pool.id = "pool-" + std::to_string(next_id_++);
    pool.market = spec.id;
    pool.label = label;
    pool.vault = kPoolVaultPrefix + pool.id;
    pool.fee_bps = fee_bps;
    ledger.debit_shares(provider, spec.id, label, shares_in);
    ledger.credit_shares(pool.vault, spec.id, label, shares_in);
    ledger.debit_cash(provider, cash_in);
    ledger.credit_cash(pool.vault, cash_in);
    pool.lp_total = isqrt(static_cast<__int128>(shares_in) * cash_in);
    pool.lp[provider] = pool.lp_total;
    std::string id = pool.id;
    pools_.emplace(id, std::move(pool));
    return id;
}

SwapResult CpmmVenue::swap(Ledger& ledger, const std::string& pool_id, const std::string& account,
                           SwapSide side, Micro amount_in) {
    CpmmPool& pool = get(pool_id);
    require(!pool.frozen, Err::MarketResolved, "pool " + pool_id + " is frozen");
    require(amount_in >= 0, Err::InvalidSpec, "swap input must be nonnegative");

    SwapResult result;
    result.amount_in = amount_in;
    Qty x = share_reserve(ledger, pool);
    Micro y = cash_reserve(ledger, pool);
    require(x > 0 && y > 0, Err::ZeroReserve, "pool " + pool_id + " is empty");
    if (amount_in == 0) {
        result.price = muldiv_floor(y, kUnit, x);
        return result;
    }

    __int128 k = static_cast<__int128>(x) * y;
    // Fee stays in the pool: the invariant is computed on the fee-discounted
    // input while the full input lands in the reserve.
    Micro in_effective = amount_in - muldiv_ceil(amount_in, pool.fee_bps, 10'000);
    require(in_effective > 0, Err::InvalidSpec, "input too small after fee");

    std::int64_t reserve_in = side == SwapSide::BuyShares ? y : x;
    std::int64_t reserve_out = side == SwapSide::BuyShares ? x : y;
    __int128 divisor = static_cast<__int128>(reserve_in) + in_effective;
    std::int64_t keep = static_cast<std::int64_t>((k + divisor - 1) / divisor);  // ceil
    std::int64_t out = reserve_out - keep;
    require(out > 0, Err::InvalidSpec, "input too small to move the pool");
    require(keep > 0 && out < reserve_out, Err::PoolDrained,
            "swap would empty one side of pool " + pool_id);
    result.amount_out = out;

    if (side == SwapSide::BuyShares) {
        ledger.debit_cash(account, amount_in);
        ledger.credit_cash(pool.vault, amount_in);
        ledger.debit_shares(pool.vault, pool.market, pool.label, out);
        ledger.credit_shares(account, pool.market, pool.label, out);
    } else {
        ledger.debit_shares(account, pool.market, pool.label, amount_in);
        ledger.credit_shares(pool.vault, pool.market, pool.label, amount_in);
        ledger.debit_cash(pool.vault, out);
        ledger.credit_cash(account, out);
    }
    result.price = muldiv_floor(cash_reserve(ledger, pool), kUnit, share_reserve(ledger, pool));
    return result;
}

LiquidityResult CpmmVenue::add_liquidity(Ledger& ledger, const std::string& pool_id,
                                         const std::string& account, Qty shares_in,
                                         Micro cash_in) {
    CpmmPool& pool = get(pool_id);
    require(!pool.frozen, Err::MarketResolved, "pool " + pool_id + " is frozen");
    require(shares_in > 0 && cash_in > 0, Err::RatioMismatch, "deposits must be positive");
    Qty x = share_reserve(ledger, pool);
    Micro y = cash_reserve(ledger, pool);
    require(static_cast<__int128>(shares_in) * y == static_cast<__int128>(cash_in) * x,
            Err::RatioMismatch, "deposit must match the reserve ratio exactly");

    LiquidityResult result;
    result.shares = shares_in;
    result.cash = cash_in;
    result.lp_delta = muldiv_floor(pool.lp_total, shares_in, x);
    ledger.debit_shares(account, pool.market, pool.label, shares_in);
    ledger.credit_shares(pool.vault, pool.market, pool.label, shares_in);
    ledger.debit_cash(account, cash_in);
    ledger.credit_cash(pool.vault, cash_in);
    pool.lp_total += result.lp_delta;
    pool.lp[account] += result.lp_delta;
    return result;
}

LiquidityResult CpmmVenue::remove_liquidity(Ledger& ledger, const std::string& pool_id,
                                            const std::string& account, std::int64_t lp_burn) {
    CpmmPool& pool = get(pool_id);
    require(lp_burn > 0, Err::InvalidSpec, "lp burn must be positive");
    auto held = pool.lp.find(account);
    require(held != pool.lp.end() && held->second >= lp_burn, Err::InsufficientShares,
            account + " holds fewer LP shares than requested");

    Qty x = share_reserve(ledger, pool);
    Micro y = cash_reserve(ledger, pool);
    LiquidityResult result;
    result.lp_delta = -lp_burn;
    result.shares = muldiv_floor(x, lp_burn, pool.lp_total);
    result.cash = muldiv_floor(y, lp_burn, pool.lp_total);

    held->second -= lp_burn;
    if (held->second == 0) pool.lp.erase(held);
    pool.lp_total -= lp_burn;
    ledger.debit_shares(pool.vault, pool.market, pool.label, result.shares);
    ledger.credit_shares(account, pool.market, pool.label, result.shares);
    ledger.debit_cash(pool.vault, result.cash);
    ledger.credit_cash(account, result.cash);
    if (pool.lp_total == 0) {
        result.closed = true;
        pools_.erase(pool_id);
    }
    return result;
}

void CpmmVenue::freeze_market(const std::string& market) {
    for (auto& [_, pool] : pools_)
        if (pool.market == market) pool.frozen = true;
}

json CpmmVenue::to_json(const Ledger& ledger) const {
    json out = json::object();
    for (const auto& [id, pool] : pools_) {
        json lp = json::object();
        for (const auto& [acct, amount] : pool.lp) lp[acct] = amount;
        out[id] = {{"market", pool.market},
                   {"label", pool.label},
                   {"shares", share_reserve(ledger, pool)},
                   {"cash", cash_reserve(ledger, pool)},
                   {"lp_total", pool.lp_total},
                   {"lp", std::move(lp)},
                   {"fee_bps", pool.fee_bps},
                   {"frozen", pool.frozen}};
    }
    return out;
}

SeedResult seed_bookmaker(Ledger& ledger, CpmmVenue& venue, const MarketSpec& spec,
                          const std::string& operator_account, Micro capital,
                          const std::map<std::string, Micro>& priors, int fee_bps) {
    require(spec.kind == MarketKind::Wta, Err::UnsupportedKind,
            "seeded bookmaking runs on WTA markets");
    require(capital > 0 && capital % 2 == 0, Err::InvalidSpec,
            "capital must be a positive even number of micro-units");
    Micro prior_sum = 0;
    for (const auto& label : spec.labels) {
        auto it = priors.find(label);
        require(it != priors.end(), Err::PriorsDoNotSum, "missing prior for '" + label + "'");
        require(it->second > 0, Err::PriorsDoNotSum, "prior for '" + label + "' must be positive");
        prior_sum += it->second;
    }
    require(priors.size() == spec.labels.size(), Err::PriorsDoNotSum, "extra prior entries");
    require(prior_sum == kUnit, Err::PriorsDoNotSum,
            "priors sum to " + std::to_string(prior_sum) + " micro, expected exactly one unit");
    require(ledger.account(operator_account).cash >= capital, Err::InsufficientFunds,
            operator_account + " cannot fund the seed capital");

    Micro half = capital / 2;
    // Largest-remainder apportionment of half across the priors, so the
    // seeded pools absorb exactly n.
    std::vector<std::pair<std::string, Micro>> alloc;
    Micro allocated = 0;
    std::vector<std::pair<Micro, std::string>> remainders;
    for (const auto& label : spec.labels) {
        __int128 exact = static_cast<__int128>(priors.at(label)) * half;
        Micro floor_amount = static_cast<Micro>(exact / kUnit);
        alloc.emplace_back(label, floor_amount);
        allocated += floor_amount;
        remainders.emplace_back(static_cast<Micro>(exact % kUnit), label);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    Micro leftover = half - allocated;
    for (Micro i = 0; i < leftover; ++i) {
        const std::string& label = remainders[i % remainders.size()].second;
        for (auto& [l, amount] : alloc)
            if (l == label) {
                ++amount;
                break;
            }
    }

    SeedResult result;
    result.market = spec.id;
    result.capital = capital;
    result.split_escrow = half;
    result.pool_cash = half;

    split(ledger, spec, operator_account, std::nullopt, half);
    for (const auto& [label, cash] : alloc) {
        require(cash > 0, Err::ZeroReserve,
                "prior for '" + label + "' is too small to fund a pool");
        result.pools.push_back(venue.create(ledger, spec, operator_account, label, half, cash, fee_bps));
    }
    return result;
}

}  // namespace pmx
