#include "nes/passage.hpp"

#include "nes/quadrature.hpp"
#include "nes/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nes {

namespace {
const double qnan = std::numeric_limits<double>::quiet_NaN();
}

double log_upper_mass(const StationaryDensity& sd, double y) {
    double acc = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        const double w = sd.mixture.weights[static_cast<size_t>(k)];
        if (w == 0.0) continue;
        const double z = (sd.mixture.means[static_cast<size_t>(k)] - y) /
                         sd.mixture.stdevs[static_cast<size_t>(k)];
        acc = log_add_exp(acc, std::log(w) + log_norm_cdf(z));
    }
    return acc;
}

double log_lower_mass(const StationaryDensity& sd, double y) {
    double acc = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        const double w = sd.mixture.weights[static_cast<size_t>(k)];
        if (w == 0.0) continue;
        const double z = (y - sd.mixture.means[static_cast<size_t>(k)]) /
                         sd.mixture.stdevs[static_cast<size_t>(k)];
        acc = log_add_exp(acc, std::log(w) + log_norm_cdf(z));
    }
    return acc;
}

EscapeResult passage_time_quadrature(const NesParams& p, double y0, double y_star) {
    validate_params(p);
    if (!(y0 > y_star))
        throw std::invalid_argument("passage_time_quadrature: requires y0 > y_star");

    const GroundState gs = ground_state(p);
    auto glog = [&](double y) { return log_upper_mass(gs.density, y) - 2.0 * gs.psi.log_value(y); };

    // factor out the largest exponent so the outer integrand stays O(1);
    // candidates: endpoints and any interior critical points (the barrier
    // top dominates in the metastable case)
    double m = std::fmax(glog(y_star), glog(y0));
    {
        const PotentialFn pot(p);
        for (const auto& c : pot.critical_points())
            if (c.y > y_star && c.y < y0) m = std::fmax(m, glog(c.y));
    }

    const double integral = integrate_gk(
        [&](double y) { return std::exp(glog(y) - m); }, y_star, y0, 1e-8, 0.0);

    const double h2 = p.h * p.h;
    const double log_T = std::log(2.0 / h2) + m + std::log(integral);
    const double T = std::exp(log_T);
    if (!std::isfinite(T) || !(T > 0.0))
        throw NumericalError("passage_time_quadrature: mean passage time not representable, log T = " +
                             std::to_string(log_T));
    return {T, 1.0 / T, PassageMethod::quadrature, y0, qnan, qnan};
}

EscapeResult passage_time_saddle(const NesParams& p) {
    validate_params(p);
    const PotentialFn pot(p);
    if (!is_double_well(pot))
        throw std::invalid_argument("passage_time_saddle: saddle-point inapplicable, potential has a single well");

    const auto& crit = pot.critical_points();
    const CriticalPoint y_glob = global_minimum(pot);
    const CriticalPoint& y_max = crit[1];
    const CriticalPoint& y_loc = (crit[0].y == y_glob.y) ? crit[2] : crit[0];

    const double V2_min = potential_derivs(pot, y_glob.y).V2;
    const double V2_max = potential_derivs(pot, y_max.y).V2;  // negative at the top
    const double dV = potential_value(pot, y_max.y) - potential_value(pot, y_glob.y);

    const double h2 = p.h * p.h;
    const double sm2 = h2 / (2.0 * std::fabs(V2_max));  // squared barrier width

    // mixture weight sum, each component widened by the barrier Gaussian
    const GroundState gs = ground_state(p);
    double S = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double w = gs.density.mixture.weights[static_cast<size_t>(k)];
        if (w == 0.0) continue;
        const double sk = gs.density.mixture.stdevs[static_cast<size_t>(k)];
        S += w * norm_cdf((gs.density.mixture.means[static_cast<size_t>(k)] - y_max.y) /
                          std::sqrt(sk * sk + sm2));
    }

    const double prefactor = 2.0 * pi / std::sqrt(V2_min * std::fabs(V2_max));
    const double T_classical = prefactor * std::exp(2.0 * dV / h2);
    const double T = T_classical * S;
    if (!std::isfinite(T) || !(T > 0.0))
        throw NumericalError("passage_time_saddle: mean passage time not representable");
    return {T, 1.0 / T, PassageMethod::saddle_point, y_loc.y, dV, T_classical};
}

namespace {

// mirrored form for a threshold above the start: reflecting at -inf,
// absorbing at y_star, so the inner mass is the lower tail
double passage_time_up(const NesParams& p, double y0, double y_star) {
    const GroundState gs = ground_state(p);
    auto glog = [&](double y) { return log_lower_mass(gs.density, y) - 2.0 * gs.psi.log_value(y); };
    double m = std::fmax(glog(y0), glog(y_star));
    {
        const PotentialFn pot(p);
        for (const auto& c : pot.critical_points())
            if (c.y > y0 && c.y < y_star) m = std::fmax(m, glog(c.y));
    }
    const double integral = integrate_gk(
        [&](double y) { return std::exp(glog(y) - m); }, y0, y_star, 1e-8, 0.0);
    const double log_T = std::log(2.0 / (p.h * p.h)) + m + std::log(integral);
    const double T = std::exp(log_T);
    if (!std::isfinite(T) || !(T > 0.0))
        throw NumericalError("passage time (upward) not representable, log T = " +
                             std::to_string(log_T));
    return T;
}

}  // namespace

double escape_rate(const NesParams& p, double y0, double y_star) {
    if (y0 == y_star) return std::numeric_limits<double>::infinity();
    if (y0 > y_star) return passage_time_quadrature(p, y0, y_star).lambda;
    validate_params(p);
    return 1.0 / passage_time_up(p, y0, y_star);
}

double escape_rate(const NesParams& p, double y0) {
    const PotentialFn pot(p);
    if (!is_double_well(pot))
        throw std::invalid_argument(
            "escape_rate: single-well potential; supply an explicit absorbing threshold y_star");
    return escape_rate(p, y0, global_minimum(pot).y);
}

}  // namespace nes
