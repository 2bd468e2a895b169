#include "doctest.h"

#include "nes/errors.hpp"
#include "nes/market.hpp"
#include "nes/measure.hpp"
#include "nes/params.hpp"
#include "nes/pricing.hpp"

#include <cmath>
#include <initializer_list>
#include <vector>

using namespace nes;

namespace {

MarketEnv ref_market() { return MarketEnv{100.0, 0.02, 0.005}; }

// mpmath references for the dividend-adjusted Black-Scholes formula
constexpr double kBsAtm = 8.629570114610862718908;    // S=K=100 T=1 vol=.2 r=.02 q=.005
constexpr double kBsOtm = 7.689502671852652365524;    // K=120 vol=.35, same market

// closed-form mixture calls cross-checked against an independent Python
// implementation (same market, T = 1), K in {80, 100, 120}
struct PriceRow {
    double mu, s1, s2, a, h;
    double calls[3];
};
constexpr PriceRow kRows[] = {
    {0.092, 0.09, 0.461, 0.505, 0.159,
     {24.149272915794121, 7.7702447607409262, 0.48880959173121363}},
    {0.191, 0.07, 0.263, 0.566, 0.162,
     {25.183232704171992, 11.764598620243669, 1.4990638444919575}},
    {0.225, 0.213, 1.120, 0.763, 0.632,
     {33.09738241746728, 21.233857114089723, 12.363133340001125}},
};
constexpr double kStrikes[3] = {80.0, 100.0, 120.0};

}  // namespace

TEST_SUITE_BEGIN("pricing");

TEST_CASE("black-scholes reference values and parity") {
    CHECK(bs_price(100, 100, 1, 0.2, 0.02, 0.005, OptionKind::call) ==
          doctest::Approx(kBsAtm).epsilon(1e-14));
    CHECK(bs_price(100, 120, 1, 0.35, 0.02, 0.005, OptionKind::call) ==
          doctest::Approx(kBsOtm).epsilon(1e-14));

    for (double K : {70.0, 100.0, 140.0}) {
        const double c = bs_price(100, K, 0.75, 0.3, 0.02, 0.005, OptionKind::call);
        const double pp = bs_price(100, K, 0.75, 0.3, 0.02, 0.005, OptionKind::put);
        const double fwd = 100 * std::exp(-0.005 * 0.75) - K * std::exp(-0.02 * 0.75);
        CHECK(c - pp == doctest::Approx(fwd).epsilon(1e-13));
    }

    // vega > 0 and the deterministic limit
    CHECK(bs_price(100, 100, 1, 0.4, 0.02, 0.005, OptionKind::call) >
          bs_price(100, 100, 1, 0.2, 0.02, 0.005, OptionKind::call));
    const double fwd = 100 * std::exp(-0.005) - 90 * std::exp(-0.02);
    CHECK(bs_price(100, 90, 1, 0.0, 0.02, 0.005, OptionKind::call) == doctest::Approx(fwd));
    CHECK(bs_price(100, 90, 1, 0.0, 0.02, 0.005, OptionKind::put) == 0.0);

    CHECK_THROWS_AS(bs_price(-1, 100, 1, 0.2, 0, 0, OptionKind::call), std::invalid_argument);
    CHECK_THROWS_AS(bs_price(100, 0, 1, 0.2, 0, 0, OptionKind::call), std::invalid_argument);
    CHECK_THROWS_AS(bs_price(100, 100, 0, 0.2, 0, 0, OptionKind::call), std::invalid_argument);
    CHECK_THROWS_AS(bs_price(100, 100, 1, -0.1, 0, 0, OptionKind::call), std::invalid_argument);
}

TEST_CASE("implied vol round trip") {
    for (double vol : {0.05, 0.2, 0.8, 2.0}) {
        for (OptionKind kind : {OptionKind::call, OptionKind::put}) {
            const double px = bs_price(100, 115, 0.5, vol, 0.02, 0.005, kind);
            CHECK(bs_implied_vol(px, 100, 115, 0.5, 0.02, 0.005, kind) ==
                  doctest::Approx(vol).epsilon(1e-10));
        }
    }
}

TEST_CASE("implied vol bound diagnostics") {
    using doctest::Contains;
    // put quoted below intrinsic
    CHECK_THROWS_WITH_AS(bs_implied_vol(40.0, 100, 150, 1, 0.02, 0.005, OptionKind::put),
                         Contains("below intrinsic"), std::invalid_argument);
    // call above the discounted-spot bound, put above the discounted strike
    CHECK_THROWS_WITH_AS(bs_implied_vol(100.0, 100, 100, 1, 0.02, 0.005, OptionKind::call),
                         Contains("spot*e^{-qT}"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(bs_implied_vol(148.0, 100, 150, 1, 0.02, 0.005, OptionKind::put),
                         Contains("strike*e^{-rT}"), std::invalid_argument);

    // price exactly at intrinsic clamps to the smallest bracketed vol
    const double lower = 100 * std::exp(-0.005) - 50 * std::exp(-0.02);
    CHECK(bs_implied_vol(lower, 100, 50, 1, 0.02, 0.005, OptionKind::call) == 1e-4);

    // nearly cash-equal call needs vol beyond the bracket
    CHECK_THROWS_AS(bs_implied_vol(99.0, 100, 100, 1, 0.02, 0.005, OptionKind::call),
                    NumericalError);
}

TEST_CASE("delta from quotes") {
    const MarketEnv mkt = ref_market();
    OptionQuote q{110.0, 1.0, OptionKind::call, 0.0, 0.25};
    const double sT = 0.25;
    const double d1 = (std::log(100.0 / 110.0) + (0.02 - 0.005 + 0.5 * 0.0625)) / sT;
    const double want = std::exp(-0.005) * 0.5 * std::erfc(-d1 / std::sqrt(2.0));
    CHECK(bs_delta_from_implied(q, mkt) == doctest::Approx(want).epsilon(1e-13));

    // when implied_vol is absent the mid is inverted first
    OptionQuote q2 = q;
    q2.implied_vol.reset();
    q2.mid = bs_price(100, 110, 1, 0.25, 0.02, 0.005, OptionKind::call);
    CHECK(bs_delta_from_implied(q2, mkt) == doctest::Approx(want).epsilon(1e-9));

    // puts report |Delta|
    OptionQuote qp{110.0, 1.0, OptionKind::put, 0.0, 0.25};
    CHECK(bs_delta_from_implied(qp, mkt) > 0.0);
    CHECK(bs_delta_from_implied(qp, mkt) ==
          doctest::Approx(std::exp(-0.005) - want).epsilon(1e-12));
}

TEST_CASE("mixture prices match the independent references") {
    for (const auto& r : kRows) {
        const NesParams p = symmetric_mu_params(r.mu, r.s1, r.s2, r.a, r.h);
        for (int i = 0; i < 3; ++i)
            CHECK(nes_option_price(p, ref_market(), kStrikes[i], 1.0, OptionKind::call) ==
                  doctest::Approx(r.calls[i]).epsilon(1e-9));
    }
}

TEST_CASE("mixture put-call parity") {
    const MarketEnv mkt = ref_market();
    for (const auto& r : kRows) {
        const NesParams p = symmetric_mu_params(r.mu, r.s1, r.s2, r.a, r.h);
        const MeasureDensity q = risk_neutral_density(p, mkt);
        const NesDividends div = nes_dividends(p, mkt, q.tilt);
        double spot_leg = 0.0;
        for (size_t k = 0; k < 3; ++k)
            spot_leg += q.mixture.weights[k] * mkt.spot * std::exp(-div.q_k[k]);
        for (double K : kStrikes) {
            const double c = nes_option_price(q, mkt, K, OptionKind::call);
            const double pp = nes_option_price(q, mkt, K, OptionKind::put);
            CHECK(c - pp ==
                  doctest::Approx(spot_leg - K * std::exp(-mkt.r_f)).epsilon(1e-12));
        }
    }
}

TEST_CASE("closed form agrees with payoff quadrature") {
    const NesParams p = symmetric_mu_params(0.092, 0.09, 0.461, 0.505, 0.159);
    const MarketEnv mkt = ref_market();
    for (double T : {0.5, 1.0}) {
        for (double K : kStrikes) {
            for (OptionKind kind : {OptionKind::call, OptionKind::put}) {
                const double cf = nes_option_price(p, mkt, K, T, kind);
                const double qd = price_by_quadrature(p, mkt, K, T, kind);
                CHECK(cf == doctest::Approx(qd).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("a = 0 collapses to a single Black-Scholes price") {
    const NesParams p = symmetric_mu_params(0.25, 0.2, 0.5, 0.0, 0.3);
    const MarketEnv mkt = ref_market();
    const double xi = solve_xi_prime(p, mkt);
    // single surviving component: closed-form tilt
    const double sh2 = 0.5 * 0.2 * 0.2;
    const double target = mkt.r_f - mkt.q_div - 0.5 * p.h * p.h;
    CHECK(xi == doctest::Approx((target - 0.25) / sh2).epsilon(1e-12));

    const NesDividends div = nes_dividends(p, mkt, xi);
    for (double K : {85.0, 100.0, 115.0}) {
        const double nes_px = nes_option_price(p, mkt, K, 1.0, OptionKind::put);
        const double bs = bs_price(mkt.spot, K, 1.0, std::sqrt(sh2), mkt.r_f, div.q_k[0],
                                   OptionKind::put);
        CHECK(nes_px == doctest::Approx(bs).epsilon(1e-14));
    }
}

TEST_CASE("strike monotonicity and convexity") {
    const NesParams p = symmetric_mu_params(0.092, 0.09, 0.461, 0.505, 0.159);
    const MarketEnv mkt = ref_market();
    const MeasureDensity q = risk_neutral_density(p, mkt);
    double prev_c = 1e300, prev_p = -1.0;
    std::vector<double> cs;
    for (double K = 60; K <= 140; K += 5) {
        const double c = nes_option_price(q, mkt, K, OptionKind::call);
        const double pp = nes_option_price(q, mkt, K, OptionKind::put);
        CHECK(c > 0.0);
        CHECK(pp > 0.0);
        CHECK(c < prev_c);
        CHECK(pp > prev_p);
        prev_c = c;
        prev_p = pp;
        cs.push_back(c);
    }
    for (size_t i = 1; i + 1 < cs.size(); ++i)
        CHECK(cs[i - 1] + cs[i + 1] - 2 * cs[i] >= -1e-12);  // convex in strike
}

TEST_SUITE_END();
