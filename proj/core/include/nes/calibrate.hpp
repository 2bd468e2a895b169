#pragma once

// Calibration of NesParams to option quotes: delta-weighted regularized
// quadratic loss, seeded multi-start Nelder-Mead refinement under box
// bounds, and the implied-potential diagnostic report.

#include "nes/params.hpp"
#include "nes/potential.hpp"
#include "nes/pricing.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nes {

// box bounds on the calibration vector (mu, sigma1, sigma2, a, h); mu1 = mu,
// mu2 = -mu
struct ParamBounds {
    std::array<double, 5> lo{0.0, 0.01, 0.01, 0.0, 0.01};
    std::array<double, 5> hi{1.0, 2.0, 2.0, 1.0, 2.0};
};

struct CalibConfig {
    // default (unset): 1e3 * (mean quote mid)^2
    std::optional<double> reg_lambda;
    double atm_weight_boost = 2.0;
    ParamBounds bounds;
    int n_starts = 24;
    std::uint64_t seed = 20240901;
    double tol = 1e-10;
    int max_iter = 4000;  // per local search
    int threads = 1;
    double horizon_T = 1.0;  // model horizon used when building params
    // replaces the first Latin-hypercube start (warm start / idempotence)
    std::optional<NesParams> init_params;
};

struct CalibrationResult {
    NesParams params;
    double xi_prime = 0.0;
    double loss = 0.0;
    double mape = 0.0;      // mean |C_model - C_market| in price units
    double mape_rel = 0.0;  // relative variant over quotes with positive mid
    std::vector<double> per_quote_errors;  // signed, price units
    bool converged = false;
    std::vector<double> starts_summary;  // final loss per start, start order
    std::vector<std::string> warnings;
};

// (1/N) sum w_n (C_NES - C_mkt)^2 + lambda_reg (drift constraint residual)^2;
// w_n = 1/|Delta_BS|, ATM strikes boosted, unit weight when implied-vol
// inversion fails
double loss(const NesParams& p, const std::vector<OptionQuote>& quotes, const MarketEnv& market,
            const CalibConfig& cfg);

CalibrationResult calibrate(const std::vector<OptionQuote>& quotes, const MarketEnv& market,
                            const CalibConfig& cfg);

enum class RegimeClass { equilibrium, unstable, metastable };

struct PotentialReport {
    RegimeClass regime = RegimeClass::equilibrium;
    bool double_well = false;
    double y0 = 0.0;
    double y_global_min = 0.0;
    double sigma_eq = 0.0;         // h / sqrt(2 V'' (global min))
    double barrier_height = 0.0;   // 0 for single wells
    std::vector<CriticalPoint> critical_points;
    std::vector<double> grid_y, grid_V;
};

PotentialReport implied_potential_report(const CalibrationResult& result, const MarketEnv& market,
                                         double y0);

const char* regime_name(RegimeClass r);

}  // namespace nes
