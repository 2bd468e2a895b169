#pragma once

#include <stdexcept>

namespace nes {

// Model parameters.  Drifts are annualized, vols are per sqrt(year), T is
// the return horizon in years.  Convention: mu2 <= mu1 (component 1 is the
// right/upside component).
struct NesParams {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double a = 0.0;  // asymmetry weight of component 2, in [0,1]
    double h = 0.0;  // noise volatility
    double T = 1.0;
};

void validate_params(const NesParams& p);

// calibration convention: single mu with mu1 = mu, mu2 = -mu
inline NesParams symmetric_mu_params(double mu, double sigma1, double sigma2, double a,
                                     double h, double T = 1.0) {
    return NesParams{mu, -mu, sigma1, sigma2, a, h, T};
}

inline NesParams with_horizon(NesParams p, double T) {
    p.T = T;
    return p;
}

}  // namespace nes
