#pragma once

// European option pricing: dividend-adjusted Black-Scholes, the NES
// closed-form mixture price with per-component effective dividends, and the
// quadrature oracle integrating the discounted payoff against the
// risk-neutral density.

#include "nes/market.hpp"
#include "nes/measure.hpp"
#include "nes/params.hpp"

#include <array>
#include <optional>

namespace nes {

enum class OptionKind { call, put };

struct OptionQuote {
    double strike = 0.0;
    double expiry_T = 0.0;
    OptionKind kind = OptionKind::call;
    double mid = 0.0;
    std::optional<double> implied_vol;
};

// effective dividend rates q_k = r_f - mu_k - (xi' + 1/2) sigma_hat_k^2
struct NesDividends {
    std::array<double, 3> q_k{};
};

double bs_price(double spot, double strike, double T, double vol, double r, double q_div,
                OptionKind kind);

// inversion of bs_price on the mid (bisection-safeguarded on [1e-4, 5]);
// throws std::invalid_argument naming the violated no-arbitrage bound
double bs_implied_vol(double price, double spot, double strike, double T, double r,
                      double q_div, OptionKind kind);

// |Delta| from the quote's implied vol, inverting the mid when absent
double bs_delta_from_implied(const OptionQuote& quote, const MarketEnv& market);

NesDividends nes_dividends(const NesParams& p, const MarketEnv& market, double xi_prime);

// closed-form mixture-of-Black-Scholes price; the expiry overrides params.T
double nes_option_price(const NesParams& p, const MarketEnv& market, double strike, double T,
                        OptionKind kind);
// hot-path overload reusing an already solved risk-neutral density
double nes_option_price(const MeasureDensity& q, const MarketEnv& market, double strike,
                        OptionKind kind);

// oracle: adaptive quadrature of the discounted payoff against the
// risk-neutral density over +-12 mixture stdevs, split at the payoff kink
double price_by_quadrature(const NesParams& p, const MarketEnv& market, double strike,
                           double T, OptionKind kind);

}  // namespace nes
