#include "pmx/resolution.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "pmx/digest.hpp"

namespace pmx {

using nlohmann::json;

namespace {

std::string scalar_outcome_string(Micro x) { return std::to_string(x); }

bool same_outcome(const Resolved& a, const Proposal& p) {
    return p.is_scalar == a.is_scalar && (a.is_scalar ? a.x == p.x : a.outcome == p.outcome);
}

}  // namespace

std::vector<Violation> validate_policy(const ResolutionPolicy& policy) {
    std::vector<Violation> out;
    if (policy.id.empty()) out.push_back({"policy-id", "policy id is empty"});
    if (policy.stages.empty()) {
        out.push_back({"policy-chain", "stage chain is empty"});
        return out;
    }
    int arbiters = 0;
    for (std::size_t i = 0; i < policy.stages.size(); ++i) {
        if (std::holds_alternative<ArbiterStage>(policy.stages[i])) {
            ++arbiters;
            if (i + 1 != policy.stages.size())
                out.push_back({"policy-terminal", "arbiter stages are terminal; place it last"});
        }
        if (const auto* v = std::get_if<VoteStage>(&policy.stages[i])) {
            if (v->commit_window <= 0 || v->reveal_window <= 0)
                out.push_back({"policy-vote", "vote windows must be positive"});
            if (v->quorum <= 0 || v->quorum > kUnit)
                out.push_back({"policy-vote", "quorum must lie in (0, 1]"});
            if (v->slash < 0 || v->slash > kUnit)
                out.push_back({"policy-vote", "slash fraction must lie in [0, 1]"});
        }
        if (const auto* a = std::get_if<AutoResolveStage>(&policy.stages[i])) {
            if (a->tau <= kUnit / 2 || a->tau >= kUnit)
                out.push_back({"policy-auto", "threshold must lie in (0.5, 1)"});
            if (a->duration < 1) out.push_back({"policy-auto", "duration must be at least 1 tick"});
        }
    }
    if (arbiters != 1)
        out.push_back({"policy-terminal", "exactly one terminal arbiter stage is required"});
    return out;
}

void ResolutionEngine::register_policy(ResolutionPolicy policy) {
    auto violations = validate_policy(policy);
    if (!violations.empty())
        fail(Err::InvalidSpec, "policy '" + policy.id + "': " + violations.front().rule + ", " +
                                   violations.front().detail);
    require(!policies_.count(policy.id), Err::DuplicatePolicyId, "policy '" + policy.id + "'");
    policies_.emplace(policy.id, std::move(policy));
}

const ResolutionPolicy* ResolutionEngine::find_policy(const std::string& id) const {
    auto it = policies_.find(id);
    return it == policies_.end() ? nullptr : &it->second;
}

MarketResolutionState& ResolutionEngine::state(const std::string& market) {
    auto it = states_.find(market);
    require(it != states_.end(), Err::UnknownMarket, "no resolution state for " + market);
    return it->second;
}

const MarketResolutionState* ResolutionEngine::find_state(const std::string& market) const {
    auto it = states_.find(market);
    return it == states_.end() ? nullptr : &it->second;
}

const Stage& ResolutionEngine::current_stage(const MarketResolutionState& st) const {
    const ResolutionPolicy& policy = policies_.at(st.policy);
    return policy.stages.at(st.stage);
}

void ResolutionEngine::attach_market(const MarketSpec& spec, Tick now, std::mt19937_64& rng,
                                     Ledger& ledger) {
    require(policies_.count(spec.resolution_policy), Err::UnknownPolicy,
            "policy '" + spec.resolution_policy + "'");
    MarketResolutionState st;
    st.policy = spec.resolution_policy;
    st.stage_entered = now;
    states_[spec.id] = std::move(st);
    activate_stage(spec, states_[spec.id], now, rng, ledger);
}

void ResolutionEngine::enroll(Ledger& ledger, const std::string& account, Micro stake) {
    require(stake > 0, Err::InvalidSpec, "stake must be positive");
    ledger.debit_gov(account, stake);
    ledger.credit_gov(kGovVault, stake);
    enrolled_[account] += stake;
}

Micro ResolutionEngine::enrolled_stake(const std::string& account) const {
    auto it = enrolled_.find(account);
    return it == enrolled_.end() ? 0 : it->second;
}

void ResolutionEngine::activate_stage(const MarketSpec& spec, MarketResolutionState& st, Tick now,
                                      std::mt19937_64& rng, Ledger& ledger) {
    st.stage_entered = now;
    st.streak.clear();
    if (const auto* v = std::get_if<VoteStage>(&current_stage(st)))
        open_round(spec, st, *v, now, rng, ledger);
}

void ResolutionEngine::escalate(const MarketSpec& spec, MarketResolutionState& st, Tick now,
                                std::mt19937_64& rng, Ledger& ledger) {
    st.round.reset();
    ++st.stage;  // validated policies end in an arbiter stage, so this stays in range
    activate_stage(spec, st, now, rng, ledger);
}

void ResolutionEngine::open_round(const MarketSpec& spec, MarketResolutionState& st,
                                  const VoteStage& stage, Tick now, std::mt19937_64& rng,
                                  Ledger& ledger) {
    VoteRound round;
    round.stage = st.stage;
    round.commit_end = now + stage.commit_window;
    round.reveal_end = round.commit_end + stage.reveal_window;
    round.secret = stage.secret;
    round.slash = stage.slash;
    round.quorum = stage.quorum;
    if (stage.subset <= 0 || static_cast<std::size_t>(stage.subset) >= enrolled_.size()) {
        round.electorate = enrolled_;
    } else {
        // Seeded draw without replacement over the sorted voter ids.
        std::vector<std::string> ids;
        ids.reserve(enrolled_.size());
        for (const auto& [id, _] : enrolled_) ids.push_back(id);
        for (int picked = 0; picked < stage.subset; ++picked) {
            std::size_t i = picked + static_cast<std::size_t>(rng() % (ids.size() - picked));
            std::swap(ids[picked], ids[i]);
            round.electorate[ids[picked]] = enrolled_.at(ids[picked]);
        }
    }
    if (stage.pot > 0 && !stage.pot_account.empty()) {
        const Account* funder = ledger.find_account(stage.pot_account);
        Micro available = funder ? funder->gov : 0;
        Micro funded = std::min(stage.pot, available);
        if (funded > 0) {
            ledger.debit_gov(stage.pot_account, funded);
            ledger.credit_gov(kGovVault, funded);
            round.pot = funded;
        }
    }
    st.round = std::move(round);
}

std::size_t ResolutionEngine::propose(Ledger& ledger, const MarketSpec& spec,
                                      const std::string& proposer, const std::string& outcome,
                                      Micro x, bool is_scalar, Micro bond, Tick now) {
    MarketResolutionState& st = state(spec.id);
    require(!st.finalized, Err::AlreadyResolved, spec.id);
    const auto* stage = std::get_if<OptimisticStage>(&current_stage(st));
    require(stage != nullptr, Err::WrongStage, "current stage does not accept proposals");
    for (const auto& p : st.proposals)
        require(p.disputed || p.settled, Err::WrongStage, "a proposal is already pending");
    require(bond >= stage->bond, Err::InsufficientBond,
            "stage requires a bond of " + std::to_string(stage->bond) + " micro");
    if (is_scalar)
        require(spec.kind == MarketKind::Scalar, Err::UnknownOutcome,
                spec.id + " resolves to a categorical outcome");
    else
        require(spec.has_outcome(outcome), Err::UnknownOutcome,
                spec.id + ": no outcome '" + outcome + "'");

    if (bond > 0) {
        ledger.debit_cash(proposer, bond);
        ledger.credit_cash(kBondVault, bond);
    }
    Proposal p;
    p.proposer = proposer;
    p.outcome = outcome;
    p.x = x;
    p.is_scalar = is_scalar;
    p.bond = bond;
    p.window_end = now + stage->window;
    st.proposals.push_back(std::move(p));
    return st.proposals.size() - 1;
}

void ResolutionEngine::dispute(Ledger& ledger, const MarketSpec& spec, std::size_t proposal_index,
                               const std::string& disputer, Micro bond, Tick now,
                               std::mt19937_64& rng) {
    MarketResolutionState& st = state(spec.id);
    require(!st.finalized, Err::AlreadyResolved, spec.id);
    require(proposal_index < st.proposals.size(), Err::WrongStage, "no such proposal");
    Proposal& p = st.proposals[proposal_index];
    require(!p.disputed && !p.settled, Err::WrongStage, "proposal is not pending");
    require(now < p.window_end, Err::WindowClosed,
            "dispute window closed at tick " + std::to_string(p.window_end));
    require(bond >= p.bond, Err::InsufficientBond,
            "dispute must match the proposal bond of " + std::to_string(p.bond) + " micro");

    if (bond > 0) {
        ledger.debit_cash(disputer, bond);
        ledger.credit_cash(kBondVault, bond);
    }
    p.disputed = true;
    p.disputer = disputer;
    p.dispute_bond = bond;
    escalate(spec, st, now, rng, ledger);
}

Resolved ResolutionEngine::arbiter_resolve(const MarketSpec& spec, const std::string& arbiter,
                                           const std::string& outcome, Micro x, bool is_scalar) {
    MarketResolutionState& st = state(spec.id);
    require(!st.finalized, Err::AlreadyResolved, spec.id);
    const auto* stage = std::get_if<ArbiterStage>(&current_stage(st));
    require(stage != nullptr, Err::WrongStage, "current stage is not arbitrated");
    if (!stage->allow.empty())
        require(std::find(stage->allow.begin(), stage->allow.end(), arbiter) != stage->allow.end(),
                Err::NotArbiter, arbiter + " is not on the allowlist");
    if (is_scalar)
        require(spec.kind == MarketKind::Scalar, Err::UnknownOutcome,
                spec.id + " resolves to a categorical outcome");
    else
        require(spec.has_outcome(outcome), Err::UnknownOutcome,
                spec.id + ": no outcome '" + outcome + "'");
    return Resolved{is_scalar, outcome, x};
}

void ResolutionEngine::commit_vote(const MarketSpec& spec, const std::string& voter,
                                   const std::string& digest, Tick now) {
    MarketResolutionState& st = state(spec.id);
    require(!st.finalized, Err::AlreadyResolved, spec.id);
    require(st.round.has_value(), Err::WrongStage, "no vote round is open");
    VoteRound& round = *st.round;
    require(round.electorate.count(voter), Err::NotEnrolled,
            voter + " is not in this round's electorate");
    require(now < round.commit_end, Err::DeadlinePassed,
            "commit phase closed at tick " + std::to_string(round.commit_end));
    round.ballots[voter].digest = digest;
}

void ResolutionEngine::reveal_vote(const MarketSpec& spec, const std::string& voter,
                                   const std::string& outcome, Micro x, bool is_scalar,
                                   const std::string& salt, Tick now) {
    MarketResolutionState& st = state(spec.id);
    require(!st.finalized, Err::AlreadyResolved, spec.id);
    require(st.round.has_value(), Err::WrongStage, "no vote round is open");
    VoteRound& round = *st.round;
    require(round.electorate.count(voter), Err::NotEnrolled,
            voter + " is not in this round's electorate");
    require(now < round.reveal_end, Err::DeadlinePassed,
            "reveal phase closed at tick " + std::to_string(round.reveal_end));
    if (is_scalar)
        require(spec.kind == MarketKind::Scalar, Err::UnknownOutcome,
                spec.id + " resolves to a categorical outcome");
    else
        require(spec.has_outcome(outcome), Err::UnknownOutcome,
                spec.id + ": no outcome '" + outcome + "'");

    std::string value = is_scalar ? scalar_outcome_string(x) : outcome;
    if (round.secret) {
        require(now >= round.commit_end, Err::WrongStage, "commit phase is still open");
        auto it = round.ballots.find(voter);
        require(it != round.ballots.end() && !it->second.digest.empty(), Err::DigestMismatch,
                voter + " has no commitment to open");
        require(commit_digest(voter, value, salt) == it->second.digest, Err::DigestMismatch,
                "reveal does not match the committed digest; ballot stays void");
        it->second.revealed = true;
        it->second.outcome = outcome;
        it->second.x = x;
    } else {
        Ballot& b = round.ballots[voter];
        b.revealed = true;
        b.outcome = outcome;
        b.x = x;
    }
}

TallyResult ResolutionEngine::tally(Ledger& ledger, const MarketSpec& spec, Tick now,
                                    std::mt19937_64& rng) {
    MarketResolutionState& st = state(spec.id);
    require(!st.finalized, Err::AlreadyResolved, spec.id);
    require(st.round.has_value(), Err::WrongStage, "no vote round is open");
    VoteRound& round = *st.round;
    require(now >= round.reveal_end, Err::RevealOpen,
            "reveal phase closes at tick " + std::to_string(round.reveal_end));

    TallyResult result;
    for (const auto& [_, stake] : round.electorate) result.total_stake += stake;
    for (const auto& [voter, ballot] : round.ballots)
        if (ballot.revealed) result.revealed_stake += round.electorate.at(voter);

    bool quorum = result.total_stake > 0 &&
                  static_cast<__int128>(result.revealed_stake) * kUnit >=
                      static_cast<__int128>(result.total_stake) * round.quorum;
    result.quorum_met = quorum;

    if (quorum) {
        if (spec.kind == MarketKind::Scalar) {
            // Stake-weighted (lower) median of revealed values.
            std::vector<std::pair<Micro, Micro>> values;  // (x, stake)
            for (const auto& [voter, ballot] : round.ballots)
                if (ballot.revealed) values.emplace_back(ballot.x, round.electorate.at(voter));
            std::sort(values.begin(), values.end());
            Micro cumulative = 0;
            Micro median = values.front().first;
            for (const auto& [x, stake] : values) {
                cumulative += stake;
                if (2 * cumulative >= result.revealed_stake) {
                    median = x;
                    break;
                }
            }
            result.outcome = Resolved{true, "", median};
        } else {
            std::map<std::string, Micro> weight;
            for (const auto& [voter, ballot] : round.ballots)
                if (ballot.revealed) weight[ballot.outcome] += round.electorate.at(voter);
            Micro best = 0;
            std::string winner;
            bool tie = false;
            for (const auto& [outcome, w] : weight) {
                if (w > best) {
                    best = w;
                    winner = outcome;
                    tie = false;
                } else if (w == best && w > 0) {
                    tie = true;
                }
            }
            if (tie || winner.empty()) {
                result.tie = true;
            } else {
                result.outcome = Resolved{false, winner, 0};
            }
        }
    }

    if (result.outcome.has_value()) {
        // Incentives: revealed-wrong voters are slashed sigma of their round
        // stake into the pot; revealed-right voters share the pot pro rata.
        // Unrevealed ballots only forgo rewards. Scalar medians skip slashing.
        Micro pot = round.pot;
        Micro winner_stake = 0;
        std::vector<std::pair<std::string, Micro>> winners;
        for (const auto& [voter, ballot] : round.ballots) {
            if (!ballot.revealed) continue;
            Micro stake = round.electorate.at(voter);
            bool correct = spec.kind == MarketKind::Scalar ? ballot.x == result.outcome->x
                                                           : ballot.outcome == result.outcome->outcome;
            if (correct) {
                winners.emplace_back(voter, stake);
                winner_stake += stake;
            } else if (spec.kind != MarketKind::Scalar && round.slash > 0) {
                Micro cut = muldiv_floor(stake, round.slash, kUnit);
                if (cut > 0) {
                    enrolled_[voter] -= cut;
                    if (enrolled_[voter] == 0) enrolled_.erase(voter);
                    pot += cut;
                    result.slashes[voter] = cut;
                }
            }
        }
        if (winner_stake > 0 && pot > 0) {
            for (const auto& [voter, stake] : winners) {
                Micro reward = muldiv_floor(pot, stake, winner_stake);
                if (reward > 0) {
                    ledger.debit_gov(kGovVault, reward);
                    ledger.credit_gov(voter, reward);
                    result.rewards[voter] = reward;
                    result.pot_paid += reward;
                }
            }
        }
        round.done = true;
    } else {
        // Quorum failure or a plurality tie escalates down the chain.
        escalate(spec, st, now, rng, ledger);
    }
    return result;
}

void ResolutionEngine::note_trade_price(const std::string& market, const std::string& label,
                                        Micro price) {
    last_price_[{market, label}] = price;
}

std::optional<std::string> ResolutionEngine::auto_resolve_check(const MarketSpec& spec) const {
    const MarketResolutionState* st = find_state(spec.id);
    if (!st || st->finalized) return std::nullopt;
    const auto* stage = std::get_if<AutoResolveStage>(&policies_.at(st->policy).stages[st->stage]);
    if (!stage) return std::nullopt;
    for (const auto& [label, ticks] : st->streak)
        if (ticks >= stage->duration) {
            if (spec.kind == MarketKind::Wta) {
                for (const auto& outcome : spec.outcomes)
                    if (spec.payoff(label, outcome) == kUnit) return outcome;
            } else if (spec.is_ynb()) {
                const Bundle* b = spec.bundle_of_label(label);
                if (b && b->yes_label == label) return b->outcome;
            }
        }
    return std::nullopt;
}

std::vector<std::pair<std::string, Resolved>> ResolutionEngine::on_tick(
    const std::map<std::string, MarketSpec>& markets, Tick now, std::mt19937_64& rng,
    Ledger& ledger) {
    std::vector<std::pair<std::string, Resolved>> finalized;
    for (const auto& [market_id, spec] : markets) {
        auto sit = states_.find(market_id);
        if (sit == states_.end() || sit->second.finalized) continue;
        MarketResolutionState& st = sit->second;

        // Expire undisputed proposal windows first: the outcome stands. The
        // window is open through window_end - 1; the finalization lands on
        // the first tick past the edge.
        bool concluded = false;
        for (auto& p : st.proposals) {
            if (p.disputed || p.settled || now <= p.window_end) continue;
            finalized.emplace_back(market_id, Resolved{p.is_scalar, p.outcome, p.x});
            concluded = true;
            break;
        }
        if (concluded) continue;

        if (const auto* stage = std::get_if<AutoResolveStage>(&current_stage(st))) {
            bool pending = false;
            for (const auto& p : st.proposals)
                if (!p.disputed && !p.settled) pending = true;
            if (!pending) {
                // Advance per-label streaks from the last executed prices.
                for (const auto& label : spec.labels) {
                    auto price = last_price_.find({market_id, label});
                    if (price == last_price_.end()) continue;
                    if (price->second >= stage->tau)
                        ++st.streak[label];
                    else
                        st.streak[label] = 0;
                }
                if (auto outcome = auto_resolve_check(spec)) {
                    Proposal p;
                    p.outcome = *outcome;
                    p.window_end = now + stage->window;
                    st.proposals.push_back(std::move(p));
                } else if (now - st.stage_entered >= stage->timeout) {
                    escalate(spec, st, now, rng, ledger);
                }
            }
        }
    }
    return finalized;
}

void ResolutionEngine::settle_bonds(Ledger& ledger, const std::string& market,
                                    const Resolved& final_outcome) {
    MarketResolutionState& st = state(market);
    for (auto& p : st.proposals) {
        if (p.settled) continue;
        p.settled = true;
        if (!p.disputed) {
            if (p.bond > 0 && !p.proposer.empty()) {
                ledger.debit_cash(kBondVault, p.bond);
                ledger.credit_cash(p.proposer, p.bond);
            }
            continue;
        }
        Micro total = p.bond + p.dispute_bond;
        if (total == 0) continue;
        // Losing side's bond goes to the winning side.
        const std::string& winner = same_outcome(final_outcome, p) ? p.proposer : p.disputer;
        if (winner.empty()) continue;
        ledger.debit_cash(kBondVault, total);
        ledger.credit_cash(winner, total);
    }
    st.round.reset();
    st.finalized = true;
}

json ResolutionEngine::to_json() const {
    json out;
    json policies = json::object();
    for (const auto& [id, policy] : policies_) policies[id] = policy_to_json(policy);
    out["policies"] = std::move(policies);
    json enrolled = json::object();
    for (const auto& [acct, stake] : enrolled_) enrolled[acct] = stake;
    out["enrolled"] = std::move(enrolled);

    json markets = json::object();
    for (const auto& [id, st] : states_) {
        json proposals = json::array();
        for (const auto& p : st.proposals) {
            json pj = {{"proposer", p.proposer}, {"bond", p.bond},
                       {"window_end", p.window_end}, {"disputed", p.disputed},
                       {"settled", p.settled}};
            if (p.is_scalar)
                pj["x"] = p.x;
            else
                pj["outcome"] = p.outcome;
            if (p.disputed) {
                pj["disputer"] = p.disputer;
                pj["dispute_bond"] = p.dispute_bond;
            }
            proposals.push_back(std::move(pj));
        }
        json mj = {{"policy", st.policy},
                   {"stage", st.stage},
                   {"finalized", st.finalized},
                   {"proposals", std::move(proposals)}};
        if (st.round) {
            json ballots = json::object();
            for (const auto& [voter, b] : st.round->ballots) {
                // Committed outcomes stay hidden until revealed.
                json bj = {{"revealed", b.revealed}};
                if (!b.digest.empty()) bj["digest"] = b.digest;
                if (b.revealed) {
                    bj["outcome"] = b.outcome;
                    bj["x"] = b.x;
                }
                ballots[voter] = std::move(bj);
            }
            json electorate = json::object();
            for (const auto& [voter, stake] : st.round->electorate) electorate[voter] = stake;
            mj["round"] = {{"commit_end", st.round->commit_end},
                           {"reveal_end", st.round->reveal_end},
                           {"secret", st.round->secret},
                           {"pot", st.round->pot},
                           {"done", st.round->done},
                           {"electorate", std::move(electorate)},
                           {"ballots", std::move(ballots)}};
        }
        markets[id] = std::move(mj);
    }
    out["markets"] = std::move(markets);
    return out;
}

json policy_to_json(const ResolutionPolicy& policy) {
    json stages = json::array();
    for (const auto& stage : policy.stages) {
        if (const auto* a = std::get_if<AutoResolveStage>(&stage)) {
            stages.push_back({{"kind", "auto"},
                              {"tau", a->tau},
                              {"duration", a->duration},
                              {"source", a->source},
                              {"window", a->window},
                              {"timeout", a->timeout}});
        } else if (const auto* o = std::get_if<OptimisticStage>(&stage)) {
            stages.push_back({{"kind", "optimistic"}, {"bond", o->bond}, {"window", o->window}});
        } else if (const auto* ar = std::get_if<ArbiterStage>(&stage)) {
            stages.push_back({{"kind", "arbiter"}, {"allow", ar->allow}});
        } else if (const auto* v = std::get_if<VoteStage>(&stage)) {
            stages.push_back({{"kind", "vote"},
                              {"commit_window", v->commit_window},
                              {"reveal_window", v->reveal_window},
                              {"quorum", v->quorum},
                              {"slash", v->slash},
                              {"subset", v->subset},
                              {"secret", v->secret},
                              {"pot", v->pot},
                              {"pot_account", v->pot_account}});
        }
    }
    return {{"id", policy.id}, {"stages", std::move(stages)}};
}

ResolutionPolicy policy_from_json(const json& j) {
    ResolutionPolicy policy;
    policy.id = j.at("id").get<std::string>();
    for (const auto& s : j.at("stages")) {
        std::string kind = s.at("kind").get<std::string>();
        if (kind == "auto") {
            AutoResolveStage a;
            a.tau = s.value("tau", a.tau);
            a.duration = s.value("duration", a.duration);
            a.source = s.value("source", a.source);
            a.window = s.value("window", a.window);
            a.timeout = s.value("timeout", a.timeout);
            policy.stages.emplace_back(a);
        } else if (kind == "optimistic") {
            OptimisticStage o;
            o.bond = s.value("bond", o.bond);
            o.window = s.value("window", o.window);
            policy.stages.emplace_back(o);
        } else if (kind == "arbiter") {
            ArbiterStage a;
            if (s.contains("allow")) a.allow = s.at("allow").get<std::vector<std::string>>();
            policy.stages.emplace_back(a);
        } else if (kind == "vote") {
            VoteStage v;
            v.commit_window = s.value("commit_window", v.commit_window);
            v.reveal_window = s.value("reveal_window", v.reveal_window);
            v.quorum = s.value("quorum", v.quorum);
            v.slash = s.value("slash", v.slash);
            v.subset = s.value("subset", v.subset);
            v.secret = s.value("secret", v.secret);
            v.pot = s.value("pot", v.pot);
            v.pot_account = s.value("pot_account", v.pot_account);
            policy.stages.emplace_back(v);
        } else {
            fail(Err::InvalidSpec, "unknown stage kind '" + kind + "'");
        }
    }
    return policy;
}

}  // namespace pmx
