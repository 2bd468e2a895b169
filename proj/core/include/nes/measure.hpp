#pragma once

// Practical NES densities: exponential tilt b_t of the stationary mixture
// (real measure), the Esscher-style risk-neutral mixture with its xi' drift
// constraint, and first-order time-dependent moments.

#include "nes/market.hpp"
#include "nes/mixture.hpp"
#include "nes/params.hpp"

#include <vector>

namespace nes {

enum class MeasureKind { real, risk_neutral };

struct MeasureDensity {
    MeasureKind kind = MeasureKind::real;
    GaussianMixture mixture;  // 3 components in y_T, stdevs sigma_k sqrt(T/2)
    double tilt = 0.0;        // b_T (real) or xi' (risk-neutral)
    NesParams base;
};

// b_t = ((y0 - ybar)/sigma_M^2) e^{-lambda t}; lambda from the escape rate.
// The default overload requires a double-well potential; for single wells
// supply the threshold y_star explicitly.
double tilt_b(const NesParams& p, double y0, double t);
double tilt_b(const NesParams& p, double y0, double t, double y_star);

// exponential tilt of the stationary mixture by b_t; the mixture horizon is
// params.T, t only controls the tilt decay
MeasureDensity real_density(const NesParams& p, double y0, double t);
MeasureDensity real_density(const NesParams& p, double y0, double t, double y_star);

struct XiPrimeInfo {
    double xi_prime = 0.0;
    double residual = 0.0;  // constraint residual in drift units
    int iterations = 0;
    bool used_fallback = false;  // Newton failed, fixed-point produced the root
};

// xi' solving sum_k w_k^{(q)} mu_k^{(q)} = r_f - q - h^2/2 (safeguarded
// Newton; the objective is convex so the gradient has a unique zero)
double solve_xi_prime(const NesParams& p, const MarketEnv& market, XiPrimeInfo* info = nullptr);

// damped fixed-point iteration on xi' = (target - E_w[mu]) / E_w[sigma_hat^2];
// retained as an independent cross-check of the Newton root
double solve_xi_prime_fixed_point(const NesParams& p, const MarketEnv& market,
                                  double tol = 1e-13, int max_iter = 20000);

MeasureDensity risk_neutral_density(const NesParams& p, const MarketEnv& market);

// E_q[e^{y_T}] - e^{(r_f - q)T}: the drift constraint holds for y_T, not for
// the exponential, so the forward picks up a small convexity mismatch
double forward_diagnostic(const MeasureDensity& q, const MarketEnv& market);

struct Moments3 {
    double mean = 0.0;
    // second and third moments are taken about the stationary mean, first
    // order in b_t
    double variance = 0.0;
    double third_central = 0.0;
    bool perturbative_warning = false;
};

Moments3 time_dependent_moments(const NesParams& p, double y0, double t);
Moments3 time_dependent_moments(const NesParams& p, double y0, double t, double y_star);

}  // namespace nes
