// Resolution pipeline: a per-market chain of stages driving the register
// from unresolved to a final outcome — auto-resolve rules, bonded optimistic
// proposals with dispute windows, commit-reveal stake-weighted votes with
// slashing, and a terminal designated arbiter.
#pragma once

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "pmx/ledger.hpp"
#include "pmx/market.hpp"

namespace pmx {

struct AutoResolveStage {
    Micro tau = 990'000;      // price threshold, micro
    Tick duration = 10;       // consecutive ticks at or above tau
    std::string source = "book";
    Tick window = 20;         // dispute window of the emitted proposal
    Tick timeout = 100;       // ticks before the stage lapses to the next one
};

struct OptimisticStage {
    Micro bond = 0;
    Tick window = 20;
};

struct ArbiterStage {
    std::vector<std::string> allow;  // empty allowlist admits any account
};

struct VoteStage {
    Tick commit_window = 10;
    Tick reveal_window = 10;
    Micro quorum = 330'000;   // fraction of electorate stake, micro
    Micro slash = 200'000;    // sigma, fraction of a wrong voter's stake, micro
    int subset = 0;           // 0 = full electorate, else random panel size
    bool secret = true;       // commit-reveal; false = open ballots
    Micro pot = 0;            // optional reward pot, governance tokens
    std::string pot_account;
};

using Stage = std::variant<AutoResolveStage, OptimisticStage, ArbiterStage, VoteStage>;

struct ResolutionPolicy {
    std::string id;
    std::vector<Stage> stages;
};

// Invalid policies are rejected at registration: nonempty chain, exactly one
// arbiter stage, placed last (the terminal stage that always concludes).
std::vector<Violation> validate_policy(const ResolutionPolicy& policy);

struct Proposal {
    std::string proposer;  // empty for auto-resolve emissions
    std::string outcome;
    Micro x = 0;
    bool is_scalar = false;
    Micro bond = 0;
    Tick window_end = 0;
    bool disputed = false;
    std::string disputer;
    Micro dispute_bond = 0;
    bool settled = false;
};

struct Ballot {
    std::string digest;
    bool revealed = false;
    std::string outcome;
    Micro x = 0;
};

struct VoteRound {
    std::size_t stage = 0;
    Tick commit_end = 0;
    Tick reveal_end = 0;
    bool secret = true;
    Micro slash = 0;
    Micro quorum = 0;
    Micro pot = 0;
    std::map<std::string, Micro> electorate;  // stake snapshot
    std::map<std::string, Ballot> ballots;
    bool done = false;
};

struct MarketResolutionState {
    std::string policy;
    std::size_t stage = 0;
    Tick stage_entered = 0;
    std::vector<Proposal> proposals;
    std::optional<VoteRound> round;
    std::map<std::string, Tick> streak;  // auto-resolve price persistence
    bool finalized = false;
};

// A concluded outcome handed back to the engine for register transition.
struct Resolved {
    bool is_scalar = false;
    std::string outcome;
    Micro x = 0;
};

struct TallyResult {
    bool quorum_met = false;
    bool tie = false;
    std::optional<Resolved> outcome;
    Micro revealed_stake = 0;
    Micro total_stake = 0;
    Micro pot_paid = 0;
    std::map<std::string, Micro> slashes;
    std::map<std::string, Micro> rewards;
};

class ResolutionEngine {
  public:
    void register_policy(ResolutionPolicy policy);
    const ResolutionPolicy* find_policy(const std::string& id) const;

    void attach_market(const MarketSpec& spec, Tick now, std::mt19937_64& rng, Ledger& ledger);

    void enroll(Ledger& ledger, const std::string& account, Micro stake);
    Micro enrolled_stake(const std::string& account) const;

    // Optimistic stage ops.
    std::size_t propose(Ledger& ledger, const MarketSpec& spec, const std::string& proposer,
                        const std::string& outcome, Micro x, bool is_scalar, Micro bond, Tick now);
    void dispute(Ledger& ledger, const MarketSpec& spec, std::size_t proposal_index,
                 const std::string& disputer, Micro bond, Tick now, std::mt19937_64& rng);

    // Terminal arbiter.
    Resolved arbiter_resolve(const MarketSpec& spec, const std::string& arbiter,
                             const std::string& outcome, Micro x, bool is_scalar);

    // Vote ops.
    void commit_vote(const MarketSpec& spec, const std::string& voter, const std::string& digest,
                     Tick now);
    void reveal_vote(const MarketSpec& spec, const std::string& voter, const std::string& outcome,
                     Micro x, bool is_scalar, const std::string& salt, Tick now);
    TallyResult tally(Ledger& ledger, const MarketSpec& spec, Tick now, std::mt19937_64& rng);

    // Auto-resolve: engine reports executed trade prices each tick; expired
    // windows and fired rules surface as Resolved outcomes or new proposals.
    void note_trade_price(const std::string& market, const std::string& label, Micro price);
    std::vector<std::pair<std::string, Resolved>> on_tick(
        const std::map<std::string, MarketSpec>& markets, Tick now, std::mt19937_64& rng,
        Ledger& ledger);

    // Pure form of the auto-resolve check for one market.
    std::optional<std::string> auto_resolve_check(const MarketSpec& spec) const;

    // Bond settlement once the final outcome is known; marks the market done.
    void settle_bonds(Ledger& ledger, const std::string& market, const Resolved& final_outcome);

    const MarketResolutionState* find_state(const std::string& market) const;
    const std::map<std::string, Micro>& enrolled() const { return enrolled_; }

    nlohmann::json to_json() const;

  private:
    MarketResolutionState& state(const std::string& market);
    const Stage& current_stage(const MarketResolutionState& st) const;
    void activate_stage(const MarketSpec& spec, MarketResolutionState& st, Tick now,
                        std::mt19937_64& rng, Ledger& ledger);
    void escalate(const MarketSpec& spec, MarketResolutionState& st, Tick now,
                  std::mt19937_64& rng, Ledger& ledger);
    void open_round(const MarketSpec& spec, MarketResolutionState& st, const VoteStage& stage,
                    Tick now, std::mt19937_64& rng, Ledger& ledger);

    std::map<std::string, ResolutionPolicy> policies_;
    std::map<std::string, MarketResolutionState> states_;
    std::map<std::string, Micro> enrolled_;
    std::map<std::pair<std::string, std::string>, Micro> last_price_;
};

nlohmann::json policy_to_json(const ResolutionPolicy& policy);
ResolutionPolicy policy_from_json(const nlohmann::json& j);

}  // namespace pmx
