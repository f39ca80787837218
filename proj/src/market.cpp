#include "pmx/market.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace pmx {

using nlohmann::json;

const char* to_string(MarketKind kind) {
    switch (kind) {
        case MarketKind::Wta: return "WTA";
        case MarketKind::Ynb: return "YNB";
        case MarketKind::YnbNegRisk: return "YNB_NR";
        case MarketKind::Scalar: return "SCALAR";
        case MarketKind::General: return "GENERAL";
    }
    return "?";
}

MarketKind market_kind_from_string(const std::string& s) {
    if (s == "WTA") return MarketKind::Wta;
    if (s == "YNB") return MarketKind::Ynb;
    if (s == "YNB_NR") return MarketKind::YnbNegRisk;
    if (s == "SCALAR") return MarketKind::Scalar;
    if (s == "GENERAL") return MarketKind::General;
    fail(Err::InvalidSpec, "unknown market kind '" + s + "'");
}

bool MarketSpec::has_label(const std::string& label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

bool MarketSpec::has_outcome(const std::string& outcome) const {
    return std::find(outcomes.begin(), outcomes.end(), outcome) != outcomes.end();
}

const Bundle* MarketSpec::find_bundle(const std::string& outcome) const {
    for (const auto& b : bundles)
        if (b.outcome == outcome) return &b;
    return nullptr;
}

const Bundle* MarketSpec::bundle_of_label(const std::string& label) const {
    for (const auto& b : bundles)
        if (b.yes_label == label || b.no_label == label) return &b;
    return nullptr;
}

Micro MarketSpec::payoff(const std::string& label, const std::string& outcome) const {
    require(kind != MarketKind::Scalar, Err::UnknownOutcome,
            "scalar market resolves to a quantity, not a categorical outcome");
    auto row = payoffs.find(label);
    require(row != payoffs.end(), Err::UnknownLabel, id + ": no label '" + label + "'");
    auto cell = row->second.find(outcome);
    require(cell != row->second.end(), Err::UnknownOutcome, id + ": no outcome '" + outcome + "'");
    return cell->second;
}

Micro MarketSpec::payoff_scalar(const std::string& label, Micro x) const {
    require(kind == MarketKind::Scalar, Err::UnknownLabel, id + " is not a scalar market");
    require(label == kScalarLong || label == kScalarShort, Err::UnknownLabel,
            id + ": no label '" + label + "'");
    Micro normalized;  // LONG payout in micro-units, clamped to [0, 1]
    if (x <= scalar.lower) {
        normalized = 0;
    } else if (x >= scalar.upper) {
        normalized = kUnit;
    } else {
        // Round to `precision` decimal places of the normalized payout,
        // half-even, then scale to micro-units.
        std::int64_t pow10 = 1;
        for (int i = 0; i < scalar.precision; ++i) pow10 *= 10;
        __int128 num = static_cast<__int128>(x - scalar.lower) * pow10;
        std::int64_t rounded = div_half_even(num, scalar.upper - scalar.lower);
        normalized = rounded * (kUnit / pow10);
    }
    return label == kScalarLong ? normalized : kUnit - normalized;
}

namespace {

void check_distinguishability(const MarketSpec& spec, std::vector<Violation>& out) {
    // Row signature per outcome; duplicate signatures mean two outcomes no
    // label can tell apart.
    std::map<std::vector<Micro>, std::string> seen;
    for (const auto& outcome : spec.outcomes) {
        std::vector<Micro> row;
        row.reserve(spec.labels.size());
        for (const auto& label : spec.labels) {
            auto it = spec.payoffs.find(label);
            Micro v = 0;
            if (it != spec.payoffs.end()) {
                auto cell = it->second.find(outcome);
                if (cell != it->second.end()) v = cell->second;
            }
            row.push_back(v);
        }
        auto [it, inserted] = seen.emplace(std::move(row), outcome);
        if (!inserted)
            out.push_back({"distinguishability",
                           "outcomes '" + it->second + "' and '" + outcome +
                               "' have identical payoff rows"});
    }
}

void check_wta_rows(const MarketSpec& spec, const std::vector<std::string>& labels,
                    const std::string& what, std::vector<Violation>& out) {
    for (const auto& label : labels) {
        for (const auto& outcome : spec.outcomes) {
            Micro v = spec.payoff(label, outcome);
            if (v != 0 && v != kUnit)
                out.push_back({what + "-unit-payout",
                               "label '" + label + "' pays " + std::to_string(v) + " at '" +
                                   outcome + "', expected 0 or 1 unit"});
        }
    }
    for (const auto& outcome : spec.outcomes) {
        int winners = 0;
        __int128 total = 0;
        for (const auto& label : labels) {
            Micro v = spec.payoff(label, outcome);
            total += v;
            if (v != 0) ++winners;
        }
        if (winners > 1)
            out.push_back({what + "-exclusivity",
                           "outcome '" + outcome + "' pays " + std::to_string(winners) +
                               " labels, expected at most one"});
        if (total != kUnit)
            out.push_back({what + "-completeness",
                           "payouts at outcome '" + outcome + "' sum to " +
                               std::to_string(static_cast<long long>(total)) +
                               " micro, expected exactly 1 unit"});
    }
}

}  // namespace

std::vector<Violation> validate_market(const MarketSpec& spec) {
    std::vector<Violation> out;
    if (spec.id.empty()) out.push_back({"id", "market id is empty"});

    if (spec.kind == MarketKind::Scalar) {
        if (spec.scalar.lower >= spec.scalar.upper)
            out.push_back({"scalar-bounds", "require lower < upper"});
        if (spec.scalar.precision < 0 || spec.scalar.precision > 6)
            out.push_back({"scalar-precision", "precision must be in [0, 6]"});
        if (spec.labels != std::vector<std::string>{kScalarLong, kScalarShort})
            out.push_back({"scalar-labels", "scalar markets carry exactly LONG and SHORT"});
        return out;
    }

    if (spec.outcomes.empty()) out.push_back({"outcomes", "outcome space is empty"});
    if (spec.labels.empty()) out.push_back({"labels", "label set is empty"});
    {
        std::set<std::string> seen;
        for (const auto& o : spec.outcomes)
            if (!seen.insert(o).second) out.push_back({"outcomes", "duplicate outcome '" + o + "'"});
        seen.clear();
        for (const auto& l : spec.labels)
            if (!seen.insert(l).second) out.push_back({"labels", "duplicate label '" + l + "'"});
    }
    for (const auto& label : spec.labels) {
        auto row = spec.payoffs.find(label);
        if (row == spec.payoffs.end()) {
            out.push_back({"payoffs", "label '" + label + "' has no payoff row"});
            continue;
        }
        for (const auto& outcome : spec.outcomes) {
            auto cell = row->second.find(outcome);
            if (cell == row->second.end())
                out.push_back({"payoffs", "label '" + label + "' missing payout at '" + outcome + "'"});
            else if (cell->second < 0)
                out.push_back({"nonnegative", "label '" + label + "' pays negative at '" + outcome + "'"});
        }
    }
    if (!out.empty()) return out;  // structural holes make the checks below meaningless

    check_distinguishability(spec, out);

    switch (spec.kind) {
        case MarketKind::Wta:
            check_wta_rows(spec, spec.labels, "wta", out);
            break;
        case MarketKind::Ynb:
        case MarketKind::YnbNegRisk: {
            std::set<std::string> paired;
            for (const auto& b : spec.bundles) {
                if (!spec.has_label(b.yes_label) || !spec.has_label(b.no_label)) {
                    out.push_back({"ynb-pairing", "bundle '" + b.outcome + "' names unknown labels"});
                    continue;
                }
                paired.insert(b.yes_label);
                paired.insert(b.no_label);
                for (const auto& outcome : spec.outcomes) {
                    Micro y = spec.payoff(b.yes_label, outcome);
                    Micro n = spec.payoff(b.no_label, outcome);
                    if ((y != 0 && y != kUnit) || (n != 0 && n != kUnit) || y + n != kUnit)
                        out.push_back({"ynb-pairing",
                                       "bundle '" + b.outcome + "' is not a two-outcome WTA pair at '" +
                                           outcome + "'"});
                }
            }
            for (const auto& l : spec.labels)
                if (!paired.count(l))
                    out.push_back({"ynb-pairing", "label '" + l + "' belongs to no bundle"});
            if (spec.kind == MarketKind::YnbNegRisk) {
                std::vector<std::string> yes_labels;
                for (const auto& b : spec.bundles) yes_labels.push_back(b.yes_label);
                check_wta_rows(spec, yes_labels, "negrisk-yes", out);
            }
            break;
        }
        case MarketKind::General:
            break;  // nonnegativity and distinguishability only
        case MarketKind::Scalar:
            break;  // handled above
    }
    return out;
}

MarketSpec make_wta(std::string id, std::string event, std::vector<std::string> outcomes,
                    std::string policy) {
    MarketSpec spec;
    spec.id = std::move(id);
    spec.event = std::move(event);
    spec.kind = MarketKind::Wta;
    spec.outcomes = std::move(outcomes);
    spec.resolution_policy = std::move(policy);
    for (const auto& o : spec.outcomes) {
        spec.labels.push_back(o);
        for (const auto& w : spec.outcomes) spec.payoffs[o][w] = (w == o) ? kUnit : 0;
    }
    return spec;
}

MarketSpec make_ynb(std::string id, std::string event, std::vector<std::string> outcomes,
                    bool neg_risk, std::string policy) {
    MarketSpec spec;
    spec.id = std::move(id);
    spec.event = std::move(event);
    spec.kind = neg_risk ? MarketKind::YnbNegRisk : MarketKind::Ynb;
    spec.outcomes = std::move(outcomes);
    spec.resolution_policy = std::move(policy);
    for (const auto& k : spec.outcomes) {
        Bundle b{k, yes_label(k), no_label(k)};
        spec.labels.push_back(b.yes_label);
        spec.labels.push_back(b.no_label);
        for (const auto& w : spec.outcomes) {
            spec.payoffs[b.yes_label][w] = (w == k) ? kUnit : 0;
            spec.payoffs[b.no_label][w] = (w == k) ? 0 : kUnit;
        }
        spec.bundles.push_back(std::move(b));
    }
    return spec;
}

MarketSpec make_scalar(std::string id, std::string event, Micro lower, Micro upper,
                       int precision, std::string quantity, std::string policy) {
    MarketSpec spec;
    spec.id = std::move(id);
    spec.event = std::move(event);
    spec.kind = MarketKind::Scalar;
    spec.scalar = {lower, upper, std::move(quantity), precision};
    spec.labels = {kScalarLong, kScalarShort};
    spec.resolution_policy = std::move(policy);
    return spec;
}

json market_to_json(const MarketSpec& spec) {
    json j;
    j["id"] = spec.id;
    j["event"] = spec.event;
    j["kind"] = to_string(spec.kind);
    j["outcomes"] = spec.outcomes;
    j["labels"] = spec.labels;
    j["resolution_policy"] = spec.resolution_policy;
    j["created_at"] = spec.created_at;
    if (spec.kind == MarketKind::Scalar) {
        j["scalar"] = {{"a", spec.scalar.lower},
                       {"b", spec.scalar.upper},
                       {"precision", spec.scalar.precision},
                       {"quantity", spec.scalar.quantity}};
    } else {
        json table = json::object();
        for (const auto& [label, row] : spec.payoffs) table[label] = row;
        j["payoffs"] = std::move(table);
    }
    if (spec.is_ynb()) {
        json bundles = json::array();
        for (const auto& b : spec.bundles)
            bundles.push_back({{"outcome", b.outcome}, {"yes", b.yes_label}, {"no", b.no_label}});
        j["bundles"] = std::move(bundles);
    }
    return j;
}

MarketSpec market_from_json(const json& j) {
    require(j.is_object(), Err::InvalidSpec, "market spec must be an object");
    require(j.contains("id") && j.at("id").is_string(), Err::InvalidSpec, "market id required");
    std::string id = j.at("id").get<std::string>();
    std::string event = j.value("event", std::string{});
    std::string policy = j.value("resolution_policy", j.value("policy", std::string{}));
    MarketKind kind = market_kind_from_string(j.value("kind", std::string("WTA")));

    if (kind == MarketKind::Scalar) {
        const auto& s = j.at("scalar");
        return make_scalar(id, event, s.at("a").get<Micro>(), s.at("b").get<Micro>(),
                           s.value("precision", 3), s.value("quantity", std::string{}), policy);
    }

    std::vector<std::string> outcomes = j.at("outcomes").get<std::vector<std::string>>();
    MarketSpec spec;
    if (kind == MarketKind::Wta && !j.contains("payoffs")) {
        spec = make_wta(id, event, std::move(outcomes), policy);
    } else if ((kind == MarketKind::Ynb || kind == MarketKind::YnbNegRisk) &&
               !j.contains("payoffs")) {
        spec = make_ynb(id, event, std::move(outcomes), kind == MarketKind::YnbNegRisk, policy);
    } else {
        // Explicit table: labels + payoffs (+ bundles for YNB kinds).
        spec.id = id;
        spec.event = event;
        spec.kind = kind;
        spec.outcomes = std::move(outcomes);
        spec.resolution_policy = policy;
        spec.labels = j.at("labels").get<std::vector<std::string>>();
        for (const auto& [label, row] : j.at("payoffs").items())
            for (const auto& [outcome, v] : row.items()) {
                require(v.is_number_integer(), Err::InvalidSpec,
                        "payoffs must be micro-unit integers");
                spec.payoffs[label][outcome] = v.get<Micro>();
            }
        if (j.contains("bundles"))
            for (const auto& b : j.at("bundles"))
                spec.bundles.push_back({b.at("outcome").get<std::string>(),
                                        b.at("yes").get<std::string>(),
                                        b.at("no").get<std::string>()});
    }
    return spec;
}

}  // namespace pmx
