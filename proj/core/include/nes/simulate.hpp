#pragma once

// Validation harness: Euler-Maruyama integration of the return SDE,
// empirical first-passage times, and the cubic-potential instanton (closed
// form and ODE oracle).

#include "nes/params.hpp"
#include "nes/potential.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace nes {

struct SimConfig {
    double dt = 1e-3;
    long n_paths = 1;
    double horizon = 1.0;
    std::uint64_t seed = 1;
    double y0 = 0.0;
    int threads = 1;
};

void validate_sim(const SimConfig& cfg);

// terminal values of n_paths Euler-Maruyama paths; per-path seed streams
// derived from cfg.seed, so results do not depend on the thread count
std::vector<double> simulate_paths(const NesParams& p, const SimConfig& cfg);
// warm-start overload: path i starts at y_init[i] (cfg.y0 ignored)
std::vector<double> simulate_paths(const NesParams& p, const SimConfig& cfg,
                                   const std::vector<double>& y_init);

struct FirstPassageEstimate {
    double mean_time = 0.0;
    double cap_fraction = 0.0;  // fraction of paths still alive at 20/lambda
    bool biased_low = false;    // cap_fraction > 5%
    double cap_time = 0.0;
};

// mean first hitting time of absorbing_y (< y0) over cfg.n_paths paths;
// unabsorbed paths are extended batch-wise up to a 20/lambda cap
FirstPassageEstimate empirical_first_passage(const NesParams& p, const SimConfig& cfg,
                                             double absorbing_y);

// Appendix-style cubic: V = -theta y + (kappa/2) y^2 + (g/3) y^3
struct CubicPotential {
    double theta = 0.0, kappa = 0.0, g = 0.0;
};

double cubic_value(const CubicPotential& cp, double y);
double cubic_vprime(const CubicPotential& cp, double y);

// the two roots of V' (y_star > y_hat) and the logistic rate g(y_star-y_hat)
struct InstantonPoints {
    double y_star = 0.0, y_hat = 0.0, rate = 0.0;
};
InstantonPoints instanton_points(const CubicPotential& cp);

// y_t = y_star + (y_hat - y_star)/(1 + e^{-g(y_star-y_hat)(t-t_c)})
double instanton_closed_form(const CubicPotential& cp, double t, double t_c);

// equipotential reflection point: the non-minimum solution of
// V(y) = V(y_star); diagnostic only, the logistic runs between roots of V'
double cubic_reflection_point(const CubicPotential& cp);

struct Trajectory {
    std::vector<double> t, y;
};

// dy/dt = +V'(y) sampled on a uniform grid (adaptive RK between samples)
Trajectory instanton_ode(const CubicPotential& cp, double y_init,
                         std::pair<double, double> t_span, int n_samples = 201);
Trajectory instanton_ode(const PotentialFn& pot, double y_init,
                         std::pair<double, double> t_span, int n_samples = 201);

}  // namespace nes
