#pragma once

// Mean first-passage times and Kramers escape rates: exact double-quadrature
// form (inner integral closed-form, outer adaptive in log space) and the
// saddle-point approximation for metastable double wells.

#include "nes/potential.hpp"

namespace nes {

enum class PassageMethod { quadrature, saddle_point };

struct EscapeResult {
    double mean_passage_time = 0.0;  // years
    double lambda = 0.0;             // 1/mean_passage_time
    PassageMethod method = PassageMethod::quadrature;
    double y0 = 0.0;      // starting log-return (saddle: the metastable minimum)
    double barrier = 0.0; // Delta V in energy units; saddle-point only (NaN otherwise)
    // Kramers limit with the mixture weight sum replaced by 1; saddle only
    double classical_mean_passage_time = 0.0;
};

// log of the upper tail mass P(y) = integral_y^inf Psi0^2, via the closed
// form sum over the stationary mixture components; log_lower_mass is the
// complementary integral from -inf
double log_upper_mass(const StationaryDensity& sd, double y);
double log_lower_mass(const StationaryDensity& sd, double y);

// T(y0) = (2/h^2) int_{y_star}^{y0} dy Psi0^{-2}(y) P(y); requires y0 > y_star
EscapeResult passage_time_quadrature(const NesParams& p, double y0, double y_star);

// closed-form approximation around the barrier top; requires a double well
EscapeResult passage_time_saddle(const NesParams& p);

// quadrature rate toward the absorbing threshold; the default overload
// absorbs at the global minimum (double wells only; single-well callers
// must supply their own threshold).  Thresholds above y0 use the mirrored
// upward-passage integral; y0 at the threshold gives an infinite rate.
double escape_rate(const NesParams& p, double y0);
double escape_rate(const NesParams& p, double y0, double y_star);

}  // namespace nes
