// ledger: transfers, conservation, worst-case-liability solvency enumeration.
#include <doctest.h>

#include "pmx/gadgets.hpp"
#include "pmx/ledger.hpp"

using namespace pmx;

TEST_CASE("share transfers conserve supply and move balances") {
    Ledger ledger;
    auto spec = make_wta("m", "e", {"Y", "N"});
    ledger.credit_cash("alice", 5 * kUnit);
    split(ledger, spec, "alice", std::nullopt, 5 * kUnit);

    transfer_shares(ledger, spec, "alice", "bob", "Y", 3 * kUnit);
    CHECK(ledger.account("alice").holding("m", "Y") == 2 * kUnit);
    CHECK(ledger.account("bob").holding("m", "Y") == 3 * kUnit);
    CHECK(ledger.book("m").supplies["Y"] == 5 * kUnit);

    SUBCASE("zero-quantity transfer is a no-op") {
        auto receipt = transfer_shares(ledger, spec, "alice", "bob", "Y", 0);
        CHECK(receipt.qty == 0);
        CHECK(ledger.account("alice").holding("m", "Y") == 2 * kUnit);
    }
    SUBCASE("transferring more than held fails") {
        CHECK_THROWS_AS(transfer_shares(ledger, spec, "alice", "bob", "Y", 3 * kUnit), Error);
    }
}

TEST_CASE("numeraire transfers conserve the total") {
    Ledger ledger;
    ledger.credit_cash("alice", 100);
    transfer_numeraire(ledger, "alice", "bob", 100);
    CHECK(ledger.account("alice").cash == 0);
    CHECK(ledger.account("bob").cash == 100);
    CHECK(ledger.total_cash() == 100);
    transfer_numeraire(ledger, "bob", "alice", 0);
    CHECK(ledger.account("bob").cash == 100);
    CHECK_THROWS_AS(transfer_numeraire(ledger, "bob", "alice", 101), Error);
}

TEST_CASE("WTA solvency: liability is the max single-outcome payout") {
    Ledger ledger;
    auto spec = make_wta("m", "e", {"A", "B", "C"});
    auto& book = ledger.book("m");
    for (const auto& l : spec.labels) book.supplies[l] = 10 * kUnit;
    book.treasuries[""] = 10 * kUnit;

    auto report = check_solvency(spec, book);
    CHECK(report.ok);
    CHECK(report.worst_case_liability == 10 * kUnit);
    CHECK(report.treasury == 10 * kUnit);

    book.treasuries[""] = 10 * kUnit - 1;
    CHECK_FALSE(check_solvency(spec, book).ok);
}

TEST_CASE("YNB solvency: per-bundle slice covers the worse branch") {
    Ledger ledger;
    auto spec = make_ynb("m", "e", {"k", "z"}, false);
    auto& book = ledger.book("m");
    book.supplies[yes_label("k")] = 4 * kUnit;
    book.supplies[no_label("k")] = 7 * kUnit;
    book.treasuries["k"] = 7 * kUnit;
    book.treasuries["z"] = 0;

    auto report = check_solvency(spec, book);
    REQUIRE(report.bundles.size() == 2);
    CHECK(report.bundles[0].bundle == "k");
    CHECK(report.bundles[0].liability == 7 * kUnit);  // max(4, 7) by branch enumeration
    CHECK(report.bundles[0].ok);
    CHECK(report.per_bundle_ok);
    CHECK(report.ok);
}

TEST_CASE("empty market is trivially solvent") {
    Ledger ledger;
    auto spec = make_wta("m", "e", {"A", "B"});
    auto report = check_solvency(spec, ledger.book("m"));
    CHECK(report.ok);
    CHECK(report.worst_case_liability == 0);
}

TEST_CASE("scalar solvency enumerates the bounds") {
    Ledger ledger;
    auto spec = make_scalar("s", "qty", 0, 100 * kUnit, 3, "pct");
    auto& book = ledger.book("s");
    book.supplies[kScalarLong] = 10 * kUnit;
    book.supplies[kScalarShort] = 4 * kUnit;
    book.treasuries[""] = 10 * kUnit;
    // liability is linear in the LONG payout: max(S_long, S_short) at a bound
    auto report = check_solvency(spec, book);
    CHECK(report.worst_case_liability == 10 * kUnit);
    CHECK(report.ok);
}

TEST_CASE("audit_solvency throws on a broken book") {
    Ledger ledger;
    auto spec = make_wta("m", "e", {"A", "B"});
    auto& book = ledger.book("m");
    book.supplies["A"] = kUnit;
    book.treasuries[""] = kUnit - 1;
    CHECK_THROWS_AS(audit_solvency(spec, book), Error);
}
