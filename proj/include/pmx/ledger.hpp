// Account balances, per-market supplies/treasuries and the solvency axiom.
#pragma once

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pmx/market.hpp"
#include "pmx/types.hpp"

namespace pmx {

// Venue-owned escrow accounts, ordinary accounts so conservation checks need
// no special cases.
inline constexpr const char* kClobVault = "vault:clob";
inline constexpr const char* kBondVault = "vault:bonds";
inline constexpr const char* kGovVault = "vault:gov";
inline constexpr const char* kFeeAccount = "vault:fees";
inline const std::string kPoolVaultPrefix = "vault:pool:";

using ShareKey = std::pair<std::string, std::string>;  // (market, label)

struct Account {
    Micro cash = 0;
    Micro gov = 0;
    std::map<ShareKey, Qty> shares;

    Qty holding(const std::string& market, const std::string& label) const {
        auto it = shares.find({market, label});
        return it == shares.end() ? 0 : it->second;
    }
};

// Supplies and treasury slices for one market. Single-treasury kinds use the
// "" slice; YNB kinds keep one slice per bundle plus the negRisk reserve.
struct MarketBook {
    std::map<std::string, Qty> supplies;
    std::map<std::string, Micro> treasuries;
    Micro reserve = 0;
    Micro redeemed = 0;  // cumulative numeraire paid out at settlement

    Micro aggregate_treasury() const {
        Micro total = reserve;
        for (const auto& [_, t] : treasuries) total += t;
        return total;
    }
};

struct BundleSolvency {
    std::string bundle;
    Micro liability = 0;
    Micro treasury = 0;
    bool ok = true;
};

struct SolvencyReport {
    bool ok = false;
    Micro worst_case_liability = 0;
    Micro treasury = 0;
    std::vector<BundleSolvency> bundles;  // YNB kinds
    bool per_bundle_ok = true;
};

class Ledger {
  public:
    Account& account(const std::string& id) { return accounts_[id]; }
    const Account* find_account(const std::string& id) const;
    const std::map<std::string, Account>& accounts() const { return accounts_; }

    Micro cash(const std::string& id) const;
    Micro gov(const std::string& id) const;
    Qty holding(const std::string& id, const std::string& market, const std::string& label) const;

    void credit_cash(const std::string& id, Micro amount);
    void debit_cash(const std::string& id, Micro amount);
    void credit_gov(const std::string& id, Micro amount);
    void debit_gov(const std::string& id, Micro amount);
    void credit_shares(const std::string& id, const std::string& market,
                       const std::string& label, Qty qty);
    void debit_shares(const std::string& id, const std::string& market,
                      const std::string& label, Qty qty);

    MarketBook& book(const std::string& market) { return books_[market]; }
    const MarketBook* find_book(const std::string& market) const;
    const std::map<std::string, MarketBook>& books() const { return books_; }

    // Σ account cash + Σ treasuries; constant after genesis faucets.
    Micro total_cash() const;
    Micro total_gov() const;

    nlohmann::json accounts_to_json() const;

  private:
    std::map<std::string, Account> accounts_;
    std::map<std::string, MarketBook> books_;
};

// transfer_shares / transfer_numeraire receipts are plain effect summaries.
struct TransferReceipt {
    std::string from;
    std::string to;
    Micro amount = 0;  // numeraire transfers
    Qty qty = 0;       // share transfers
};

TransferReceipt transfer_numeraire(Ledger& ledger, const std::string& from,
                                   const std::string& to, Micro amount);
TransferReceipt transfer_shares(Ledger& ledger, const MarketSpec& spec, const std::string& from,
                                const std::string& to, const std::string& label, Qty qty);

// Worst-case-liability enumeration for the solvency axiom: over every outcome for table
// kinds, over both bounds (and the registered X, if any) for scalar markets.
SolvencyReport check_solvency(const MarketSpec& spec, const MarketBook& book,
                              const Register* reg = nullptr);

// Throws InvariantViolation when the solvency inequality fails; called after
// every mutating operation so violations abort rather than propagate.
void audit_solvency(const MarketSpec& spec, const MarketBook& book, const Register* reg = nullptr);

}  // namespace pmx
