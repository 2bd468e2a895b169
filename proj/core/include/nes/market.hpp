#pragma once

#include <stdexcept>

#include <cmath>

namespace nes {

// market environment shared by the measure change and the pricer
struct MarketEnv {
    double spot = 100.0;
    double r_f = 0.0;    // continuously compounded risk-free rate
    double q_div = 0.0;  // market dividend yield
};

inline void validate_market(const MarketEnv& m) {
    if (!(m.spot > 0.0) || !std::isfinite(m.spot))
        throw std::invalid_argument("market: spot must be positive and finite");
    if (!std::isfinite(m.r_f) || !std::isfinite(m.q_div))
        throw std::invalid_argument("market: r_f and q_div must be finite");
}

}  // namespace nes
