// Core scalar types, error codes and integer arithmetic helpers.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pmx {

// Numeraire amounts in micro-units (1 unit = 1'000'000 micro). Share
// quantities use the same scale (1 share = 1'000'000 micro-shares) so
// payout arithmetic stays exact in int64.
using Micro = std::int64_t;
using Qty = std::int64_t;
using Tick = std::int64_t;

inline constexpr Micro kUnit = 1'000'000;

enum class Err {
    // market-core
    InvalidSpec,
    DuplicateMarketId,
    UnknownMarket,
    UnknownLabel,
    UnknownOutcome,
    // ledger
    InsufficientFunds,
    InsufficientShares,
    UnknownAccount,
    // gadgets
    BundleRequired,
    UnknownBundle,
    IncompleteSet,
    NotNegRisk,
    UnsupportedKind,
    // order book
    PriceOutOfRange,
    MarketResolved,
    UnknownOrder,
    NotOwner,
    PriceMismatch,
    InsufficientMargin,
    PricesDoNotCover,
    // amm
    ZeroReserve,
    PoolDrained,
    RatioMismatch,
    UnknownPool,
    PriorsDoNotSum,
    BondExhausted,
    UnknownBookmaker,
    // resolution
    AlreadyResolved,
    NotResolved,
    WrongStage,
    InsufficientBond,
    WindowClosed,
    NotArbiter,
    NotEnrolled,
    DeadlinePassed,
    DigestMismatch,
    RevealOpen,
    UnknownPolicy,
    DuplicatePolicyId,
    // scenario / log
    ParseError,
    CommandError,
    AssertionFailed,
    LogCorrupt,
    // engine
    InvariantViolation,
};

const char* to_string(Err code);

class Error : public std::runtime_error {
  public:
    Error(Err code, std::string message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    Err code() const noexcept { return code_; }

  private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool ok, Err code, const std::string& message) {
    if (!ok) throw Error(code, message);
}

// floor(a*b/d) with 128-bit intermediate; a,b,d >= 0, d > 0.
inline std::int64_t muldiv_floor(std::int64_t a, std::int64_t b, std::int64_t d) {
    return static_cast<std::int64_t>((static_cast<__int128>(a) * b) / d);
}

// ceil(a*b/d) with 128-bit intermediate; a,b,d >= 0, d > 0.
inline std::int64_t muldiv_ceil(std::int64_t a, std::int64_t b, std::int64_t d) {
    __int128 n = static_cast<__int128>(a) * b;
    return static_cast<std::int64_t>((n + d - 1) / d);
}

// ceil(n/d) for a 128-bit accumulated numerator.
inline std::int64_t ceil_div_i128(__int128 n, std::int64_t d) {
    return static_cast<std::int64_t>((n + d - 1) / d);
}

// round-half-even of a/d, a >= 0, d > 0.
inline std::int64_t div_half_even(__int128 a, std::int64_t d) {
    __int128 q = a / d;
    __int128 r = a % d;
    __int128 twice = r * 2;
    if (twice > d || (twice == d && (q & 1) != 0)) ++q;
    return static_cast<std::int64_t>(q);
}

}  // namespace pmx
