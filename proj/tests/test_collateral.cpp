#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "colcva/collateral.hpp"

using namespace colcva;

namespace {

MarginingRule zero_rule() {
    MarginingRule r;
    r.mode = MarginMode::margined;
    r.update_interval = 0.25;
    return r;
}

}  // namespace

TEST_CASE("margin update: direct substitutions") {
    MarginingRule r = zero_rule();
    r.threshold_c = 20.0;
    r.min_transfer = 10.0;
    CHECK(margin_update(100.0, 0.0, r) == Catch::Approx(80.0));

    r.min_transfer = 90.0;
    r.threshold_i = 90.0;
    r.threshold_c = 90.0;
    CHECK(margin_update(100.0, 0.0, r) == Catch::Approx(0.0)); // gated by the MTA

    // both legs active: investor tops up to -50, counterparty withdraws its 30
    MarginingRule both = zero_rule();
    CHECK(margin_update(-50.0, 30.0, both) == Catch::Approx(-50.0));

    // zero thresholds and MTA: the account tracks the exposure exactly
    for (double eps : {-75.0, -1.0, 0.0, 2.5, 60.0}) {
        for (double pre : {-20.0, 0.0, 15.0}) {
            CHECK(margin_update(eps, pre, both) == Catch::Approx(eps).margin(1e-12));
        }
    }
}

TEST_CASE("rule validation enforces H >= M unless waived") {
    MarginingRule r = zero_rule();
    r.min_transfer = 5.0;
    r.threshold_i = 1.0;
    r.threshold_c = 10.0;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r.allow_h_below_m = true;
    CHECK_NOTHROW(r.validate());
    r.threshold_i = -1.0;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("accrual uses the path's own discount factors") {
    // zero rates: no growth
    CHECK(accrue(40.0, 1.0, 1.0) == 40.0);
    // deterministic 3%: quarter accrual factor exp(0.0075)
    CHECK(accrue(40.0, std::exp(-0.03 * 1.0), std::exp(-0.03 * 1.25)) ==
          Catch::Approx(40.0 * std::exp(0.0075)));
}

TEST_CASE("account walk on a small hand-checked scenario") {
    // grid: 0, 0.25, 0.5, 0.75, 1.0 with updates at 0.25 and 0.75
    std::vector<double> eps{0.0, 10.0, 14.0, -4.0, 0.0};
    std::vector<double> disc(5);
    for (int k = 0; k < 5; ++k) disc[k] = std::exp(-0.04 * 0.25 * k);
    std::vector<std::uint8_t> flags{0, 1, 0, 1, 0};
    MarginingRule r = zero_rule();
    auto cp = run_collateral(eps, disc, flags, r);

    double g = std::exp(0.04 * 0.25); // one-step accrual factor
    CHECK(cp.post[1] == Catch::Approx(10.0));           // update to eps
    CHECK(cp.pre[2] == Catch::Approx(10.0 * g));        // accrued, no update
    CHECK(cp.post[2] == Catch::Approx(10.0 * g));
    CHECK(cp.pre[3] == Catch::Approx(10.0 * g * g));
    CHECK(cp.post[3] == Catch::Approx(-4.0)); // update to eps
    CHECK(cp.post[4] == 0.0);                 // closed at maturity
    CHECK(cp.beta[3] == 1);
    CHECK(cp.beta[4] == 3);

    // at-default convention: pending update at index 3 is neglected
    CHECK(collateral_at_default(cp, eps, 3, r) == Catch::Approx(10.0 * g * g));
    CHECK(collateral_at_default(cp, eps, 1, r) == Catch::Approx(0.0));
}

TEST_CASE("mode none and mode perfect") {
    std::vector<double> eps{0.0, 5.0, -3.0, 0.0};
    std::vector<double> disc{1.0, 0.99, 0.98, 0.97};
    std::vector<std::uint8_t> flags{0, 1, 1, 0};
    MarginingRule none;
    none.mode = MarginMode::none;
    auto cp0 = run_collateral(eps, disc, flags, none);
    for (double c : cp0.post) CHECK(c == 0.0);
    CHECK(collateral_at_default(cp0, eps, 2, none) == 0.0);

    MarginingRule perfect;
    perfect.mode = MarginMode::perfect;
    auto cpp = run_collateral(eps, disc, flags, perfect);
    CHECK(cpp.post[1] == Catch::Approx(5.0));
    CHECK(cpp.post[2] == Catch::Approx(-3.0));
    CHECK(collateral_at_default(cpp, eps, 2, perfect) == Catch::Approx(-3.0));
}

TEST_CASE("margin dates lie strictly inside the deal") {
    MarginingRule r = zero_rule();
    auto d = r.margin_dates(1.0);
    REQUIRE(d.size() == 3);
    CHECK(d.front() == Catch::Approx(0.25));
    CHECK(d.back() == Catch::Approx(0.75));
    MarginingRule none;
    none.mode = MarginMode::none;
    CHECK(none.margin_dates(10.0).empty());
}

TEST_CASE("raising the counterparty threshold never raises C+ when M = 0") {
    std::mt19937 gen(31);
    std::normal_distribution<double> nd(0.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 12;
        std::vector<double> eps(n), disc(n, 1.0);
        for (auto& e : eps) e = nd(gen);
        eps[0] = 0.0;
        std::vector<std::uint8_t> flags(n, 1);
        flags[0] = 0;
        MarginingRule lo = zero_rule();
        MarginingRule hi = zero_rule();
        hi.threshold_c = 8.0;
        auto c_lo = run_collateral(eps, disc, flags, lo);
        auto c_hi = run_collateral(eps, disc, flags, hi);
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(std::max(c_hi.post[k], 0.0) <= std::max(c_lo.post[k], 0.0) + 1e-12);
        }
    }
}

TEST_CASE("netting split identity for the collateral gap") {
    // (e - c)^+ = (e^+ - c^+)^+ + (e^- - c^-)^+ and the mirror with minus
    std::mt19937 gen(77);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto pos = [](double x) { return std::max(x, 0.0); };
    auto neg = [](double x) { return std::min(x, 0.0); };
    for (int i = 0; i < 2000; ++i) {
        double e = u(gen), c = u(gen);
        CHECK(pos(e - c) ==
              Catch::Approx(pos(pos(e) - pos(c)) + pos(neg(e) - neg(c))).margin(1e-14));
        CHECK(neg(e - c) ==
              Catch::Approx(neg(pos(e) - pos(c)) + neg(neg(e) - neg(c))).margin(1e-14));
    }
}
