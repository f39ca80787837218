#include "pmx/types.hpp"

namespace pmx {

const char* to_string(Err code) {
    switch (code) {
        case Err::InvalidSpec: return "InvalidSpec";
        case Err::DuplicateMarketId: return "DuplicateMarketId";
        case Err::UnknownMarket: return "UnknownMarket";
        case Err::UnknownLabel: return "UnknownLabel";
        case Err::UnknownOutcome: return "UnknownOutcome";
        case Err::InsufficientFunds: return "InsufficientFunds";
        case Err::InsufficientShares: return "InsufficientShares";
        case Err::UnknownAccount: return "UnknownAccount";
        case Err::BundleRequired: return "BundleRequired";
        case Err::UnknownBundle: return "UnknownBundle";
        case Err::IncompleteSet: return "IncompleteSet";
        case Err::NotNegRisk: return "NotNegRisk";
        case Err::UnsupportedKind: return "UnsupportedKind";
        case Err::PriceOutOfRange: return "PriceOutOfRange";
        case Err::MarketResolved: return "MarketResolved";
        case Err::UnknownOrder: return "UnknownOrder";
        case Err::NotOwner: return "NotOwner";
        case Err::PriceMismatch: return "PriceMismatch";
        case Err::InsufficientMargin: return "InsufficientMargin";
        case Err::PricesDoNotCover: return "PricesDoNotCover";
        case Err::ZeroReserve: return "ZeroReserve";
        case Err::PoolDrained: return "PoolDrained";
        case Err::RatioMismatch: return "RatioMismatch";
        case Err::UnknownPool: return "UnknownPool";
        case Err::PriorsDoNotSum: return "PriorsDoNotSum";
        case Err::BondExhausted: return "BondExhausted";
        case Err::UnknownBookmaker: return "UnknownBookmaker";
        case Err::AlreadyResolved: return "AlreadyResolved";
        case Err::NotResolved: return "NotResolved";
        case Err::WrongStage: return "WrongStage";
        case Err::InsufficientBond: return "InsufficientBond";
        case Err::WindowClosed: return "WindowClosed";
        case Err::NotArbiter: return "NotArbiter";
        case Err::NotEnrolled: return "NotEnrolled";
        case Err::DeadlinePassed: return "DeadlinePassed";
        case Err::DigestMismatch: return "DigestMismatch";
        case Err::RevealOpen: return "RevealOpen";
        case Err::UnknownPolicy: return "UnknownPolicy";
        case Err::DuplicatePolicyId: return "DuplicatePolicyId";
        case Err::ParseError: return "ParseError";
        case Err::CommandError: return "CommandError";
        case Err::AssertionFailed: return "AssertionFailed";
        case Err::LogCorrupt: return "LogCorrupt";
        case Err::InvariantViolation: return "InvariantViolation";
    }
    return "UnknownError";
}

}  // namespace pmx
