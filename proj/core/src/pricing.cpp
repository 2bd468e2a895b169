#include "nes/pricing.hpp"

#include "nes/errors.hpp"
#include "nes/potential.hpp"
#include "nes/quadrature.hpp"
#include "nes/rootfind.hpp"
#include "nes/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nes {

namespace {

void check_option_args(double spot, double strike, double T) {
    if (!(spot > 0.0) || !std::isfinite(spot))
        throw std::invalid_argument("option: spot must be positive");
    if (!(strike > 0.0) || !std::isfinite(strike))
        throw std::invalid_argument("option: strike must be positive");
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("option: expiry must be positive");
}

}  // namespace

double bs_price(double spot, double strike, double T, double vol, double r, double q_div,
                OptionKind kind) {
    check_option_args(spot, strike, T);
    if (!(vol >= 0.0) || !std::isfinite(vol))
        throw std::invalid_argument("bs_price: vol must be >= 0");
    const double df_r = std::exp(-r * T);
    const double df_q = std::exp(-q_div * T);
    const double sT = vol * std::sqrt(T);
    if (sT < 1e-14) {  // deterministic limit
        const double fwd = spot * df_q - strike * df_r;
        return kind == OptionKind::call ? std::fmax(fwd, 0.0) : std::fmax(-fwd, 0.0);
    }
    const double d1 = (std::log(spot / strike) + (r - q_div + 0.5 * vol * vol) * T) / sT;
    const double d2 = d1 - sT;
    if (kind == OptionKind::call)
        return spot * df_q * norm_cdf(d1) - strike * df_r * norm_cdf(d2);
    return strike * df_r * norm_cdf(-d2) - spot * df_q * norm_cdf(-d1);
}

double bs_implied_vol(double price, double spot, double strike, double T, double r,
                      double q_div, OptionKind kind) {
    check_option_args(spot, strike, T);
    const double df_r = std::exp(-r * T);
    const double df_q = std::exp(-q_div * T);
    const double lower = kind == OptionKind::call
                             ? std::fmax(spot * df_q - strike * df_r, 0.0)
                             : std::fmax(strike * df_r - spot * df_q, 0.0);
    const double upper = kind == OptionKind::call ? spot * df_q : strike * df_r;
    const double slack = 1e-12 * std::fmax(1.0, upper);
    if (price < lower - slack)
        throw std::invalid_argument("bs_implied_vol: price below intrinsic bound");
    if (price > upper + slack)
        throw std::invalid_argument(kind == OptionKind::call
                                        ? "bs_implied_vol: price above spot*e^{-qT} bound"
                                        : "bs_implied_vol: price above strike*e^{-rT} bound");
    auto f = [&](double v) { return bs_price(spot, strike, T, v, r, q_div, kind) - price; };
    const double flo = f(1e-4), fhi = f(5.0);
    if (flo >= 0.0) return 1e-4;  // at or below the smallest representable vol
    if (fhi <= 0.0) throw NumericalError("bs_implied_vol: implied vol above 5");
    return brent(f, 1e-4, 5.0, 1e-12);
}

double bs_delta_from_implied(const OptionQuote& quote, const MarketEnv& market) {
    validate_market(market);
    const double T = quote.expiry_T;
    const double vol = quote.implied_vol
                           ? *quote.implied_vol
                           : bs_implied_vol(quote.mid, market.spot, quote.strike, T,
                                            market.r_f, market.q_div, quote.kind);
    check_option_args(market.spot, quote.strike, T);
    if (!(vol > 0.0)) throw std::invalid_argument("bs_delta_from_implied: vol must be > 0");
    const double sT = vol * std::sqrt(T);
    const double d1 = (std::log(market.spot / quote.strike) +
                       (market.r_f - market.q_div + 0.5 * vol * vol) * T) / sT;
    const double dfq = std::exp(-market.q_div * T);
    return quote.kind == OptionKind::call ? dfq * norm_cdf(d1) : dfq * norm_cdf(-d1);
}

NesDividends nes_dividends(const NesParams& p, const MarketEnv& market, double xi_prime) {
    const GaussianMixture mix = ground_state(p).density.mixture;
    NesDividends out;
    for (size_t k = 0; k < 3; ++k) {
        const double mu_k = mix.means[k] / p.T;
        const double sh2 = mix.stdevs[k] * mix.stdevs[k] / p.T;  // sigma_k^2 / 2
        out.q_k[k] = market.r_f - mu_k - (xi_prime + 0.5) * sh2;
    }
    return out;
}

double nes_option_price(const MeasureDensity& q, const MarketEnv& market, double strike,
                        OptionKind kind) {
    const double T = q.base.T;
    check_option_args(market.spot, strike, T);
    double price = 0.0;
    for (size_t k = 0; k < q.mixture.weights.size(); ++k) {
        const double w = q.mixture.weights[k];
        if (w == 0.0) continue;
        const double sh2 = q.mixture.stdevs[k] * q.mixture.stdevs[k] / T;
        // q_k via the tilted mean: r - mu_k^{(q)} - sigma_hat_k^2/2
        const double q_k = market.r_f - q.mixture.means[k] / T - 0.5 * sh2;
        price += w * bs_price(market.spot, strike, T, std::sqrt(sh2), market.r_f, q_k, kind);
    }
    return price;
}

double nes_option_price(const NesParams& p, const MarketEnv& market, double strike, double T,
                        OptionKind kind) {
    const MeasureDensity q = risk_neutral_density(with_horizon(p, T), market);
    return nes_option_price(q, market, strike, kind);
}

double price_by_quadrature(const NesParams& p, const MarketEnv& market, double strike,
                           double T, OptionKind kind) {
    check_option_args(market.spot, strike, T);
    const MeasureDensity q = risk_neutral_density(with_horizon(p, T), market);
    const auto [wlo, whi] = support_window(q.mixture, 12.0);
    double smax = 0.0;
    for (double s : q.mixture.stdevs) smax = std::fmax(smax, s);
    const double yk = std::log(strike / market.spot);

    auto integrand = [&](double y) {
        const double payoff = kind == OptionKind::call ? market.spot * std::exp(y) - strike
                                                       : strike - market.spot * std::exp(y);
        return payoff * pdf(q.mixture, y);
    };
    double a, b;
    if (kind == OptionKind::call) {
        a = yk;
        b = std::fmax(whi, yk + 12.0 * smax);
    } else {
        b = yk;
        a = std::fmin(wlo, yk - 12.0 * smax);
    }
    const double integral = integrate_gk(integrand, a, b, 1e-11, 1e-16);
    return std::exp(-market.r_f * T) * std::fmax(integral, 0.0);
}

}  // namespace nes
