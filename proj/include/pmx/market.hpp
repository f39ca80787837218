// Market definitions: outcome spaces, share labels, payoff tables and the
// structural validation rules for each share-structure kind.
#pragma once

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmx/types.hpp"

namespace pmx {

enum class MarketKind {
    Wta,         // one unit-payout label per outcome, exclusive and complete
    Ynb,         // complementary YES/NO pair per bundle; bundles may overlap
    YnbNegRisk,  // YNB whose YES labels are jointly a WTA market
    Scalar,      // single LONG/SHORT pair paying a normalized quantity
    General,     // arbitrary nonnegative payoff table, distinguishability only
};

const char* to_string(MarketKind kind);
MarketKind market_kind_from_string(const std::string& s);

struct ScalarSpec {
    Micro lower = 0;  // a, micro quantity-units
    Micro upper = 0;  // b, micro quantity-units
    std::string quantity;
    int precision = 3;  // decimal places of the normalized payout
};

// One YES/NO pair. `outcome` names the bundle; for table-driven YNB markets
// it is the bundle key, not necessarily a member of the outcome space.
struct Bundle {
    std::string outcome;
    std::string yes_label;
    std::string no_label;
};

struct MarketSpec {
    std::string id;
    std::string event;
    MarketKind kind = MarketKind::Wta;
    std::vector<std::string> outcomes;
    std::vector<std::string> labels;
    // label -> outcome -> payout per whole share, micro-units.
    std::map<std::string, std::map<std::string, Micro>> payoffs;
    std::vector<Bundle> bundles;  // YNB kinds only
    ScalarSpec scalar;            // Scalar kind only
    std::string resolution_policy;
    Tick created_at = 0;

    bool has_label(const std::string& label) const;
    bool has_outcome(const std::string& outcome) const;
    bool is_ynb() const { return kind == MarketKind::Ynb || kind == MarketKind::YnbNegRisk; }
    const Bundle* find_bundle(const std::string& outcome) const;
    const Bundle* bundle_of_label(const std::string& label) const;

    // R_j(omega) for table kinds; throws UnknownLabel/UnknownOutcome.
    Micro payoff(const std::string& label, const std::string& outcome) const;
    // Scalar payoff for an observed quantity x (micro quantity-units).
    Micro payoff_scalar(const std::string& label, Micro x) const;
};

// Exactly-once outcome register. `outcome` for categorical kinds, `x` for
// scalar markets (which also record the canonical clamped LONG payout).
struct Register {
    bool resolved = false;
    std::string outcome;
    Micro x = 0;
    Tick finalized_at = 0;
};

struct Violation {
    std::string rule;
    std::string detail;
};

// Pure structural validation; empty result means valid.
std::vector<Violation> validate_market(const MarketSpec& spec);

// Canonical builders used by scenarios and tests.
MarketSpec make_wta(std::string id, std::string event, std::vector<std::string> outcomes,
                    std::string policy = {});
MarketSpec make_ynb(std::string id, std::string event, std::vector<std::string> outcomes,
                    bool neg_risk, std::string policy = {});
MarketSpec make_scalar(std::string id, std::string event, Micro lower, Micro upper,
                       int precision, std::string quantity, std::string policy = {});

// Canonical JSON (sorted keys, micro-unit integers only).
nlohmann::json market_to_json(const MarketSpec& spec);
MarketSpec market_from_json(const nlohmann::json& j);

inline std::string yes_label(const std::string& outcome) { return outcome + ":YES"; }
inline std::string no_label(const std::string& outcome) { return outcome + ":NO"; }

inline constexpr const char* kScalarLong = "LONG";
inline constexpr const char* kScalarShort = "SHORT";

}  // namespace pmx
