#include "nes/potential.hpp"

#include "nes/rootfind.hpp"
#include "nes/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nes {

namespace {
const double log_sqrt_2pi = 0.918938533204672741780329736406;
const double neg_inf = -std::numeric_limits<double>::infinity();
}

void validate_params(const NesParams& p) {
    if (!(p.sigma1 > 0.0) || !(p.sigma2 > 0.0))
        throw std::invalid_argument("params: sigma1 and sigma2 must be > 0");
    if (!(p.h > 0.0)) throw std::invalid_argument("params: h must be > 0");
    if (!(p.T > 0.0)) throw std::invalid_argument("params: T must be > 0");
    if (!(p.a >= 0.0 && p.a <= 1.0)) throw std::invalid_argument("params: a must be in [0,1]");
    if (!(p.mu2 <= p.mu1))
        throw std::invalid_argument("params: convention requires mu2 <= mu1");
    if (!std::isfinite(p.mu1) || !std::isfinite(p.mu2))
        throw std::invalid_argument("params: drifts must be finite");
}

Psi0::Psi0(const NesParams& p) {
    validate_params(p);
    m1_ = p.mu1 * p.T;
    m2_ = p.mu2 * p.T;
    v1_ = p.sigma1 * p.sigma1 * p.T;
    v2_ = p.sigma2 * p.sigma2 * p.T;

    const double a = p.a;
    const double ssum = p.sigma1 * p.sigma1 + p.sigma2 * p.sigma2;
    const double cross = std::exp(-(p.mu1 - p.mu2) * (p.mu1 - p.mu2) * p.T / (2.0 * ssum));
    Omega_ = (1.0 - a) * (1.0 - a) / p.sigma1 + a * a / p.sigma2 +
             2.0 * a * (1.0 - a) * cross / std::sqrt(0.5 * ssum);
    C2_ = 2.0 * std::sqrt(pi * p.T) / Omega_;

    const double logC = 0.5 * std::log(C2_);
    lw1_ = (a < 1.0) ? logC + std::log1p(-a) - 0.5 * std::log(v1_) - log_sqrt_2pi : neg_inf;
    lw2_ = (a > 0.0) ? logC + std::log(a) - 0.5 * std::log(v2_) - log_sqrt_2pi : neg_inf;
}

double Psi0::log_value(double y) const {
    const double z1 = y - m1_, z2 = y - m2_;
    const double l1 = lw1_ - 0.5 * z1 * z1 / v1_;
    const double l2 = lw2_ - 0.5 * z2 * z2 / v2_;
    return log_add_exp(l1, l2);
}

void Psi0::log_derivs(double y, double* d1, double* d2) const {
    const double z1 = y - m1_, z2 = y - m2_;
    // component responsibilities r1 = 1/(1 + e^{L2-L1})
    double r1;
    if (lw2_ == neg_inf) {
        r1 = 1.0;
    } else if (lw1_ == neg_inf) {
        r1 = 0.0;
    } else {
        const double l1 = lw1_ - 0.5 * z1 * z1 / v1_;
        const double l2 = lw2_ - 0.5 * z2 * z2 / v2_;
        r1 = 1.0 / (1.0 + std::exp(l2 - l1));
    }
    const double r2 = 1.0 - r1;
    const double g1 = z1 / v1_, g2 = z2 / v2_;
    if (d1) *d1 = -(r1 * g1 + r2 * g2);
    if (d2) {
        const double gd = g1 - g2;
        *d2 = -(r1 / v1_ + r2 / v2_ - r1 * r2 * gd * gd);
    }
}

GroundState ground_state(const NesParams& p) {
    Psi0 psi(p);
    const double a = p.a;
    const double s1 = p.sigma1, s2 = p.sigma2;
    const double ssum = s1 * s1 + s2 * s2;
    const double cross = std::exp(-(p.mu1 - p.mu2) * (p.mu1 - p.mu2) * p.T / (2.0 * ssum));

    const double Omega = psi.Omega();
    std::array<double, 3> omega = {
        (1.0 - a) * (1.0 - a) / (s1 * Omega),
        a * a / (s2 * Omega),
        2.0 * a * (1.0 - a) * cross / (Omega * std::sqrt(0.5 * ssum))};

    const double mu3 = (p.mu1 * s2 * s2 + p.mu2 * s1 * s1) / ssum;
    const double sigma3 = std::sqrt(2.0) * s1 * s2 / std::sqrt(ssum);
    const double half_t = std::sqrt(0.5 * p.T);

    StationaryDensity sd{
        make_mixture({omega[0], omega[1], omega[2]},
                     {p.mu1 * p.T, p.mu2 * p.T, mu3 * p.T},
                     {s1 * half_t, s2 * half_t, sigma3 * half_t}),
        omega, Omega, psi.C2(), mu3, sigma3};
    return GroundState{p, psi, std::move(sd)};
}

PotentialFn::PotentialFn(const NesParams& p) : params_(p), psi_(p), V0_(0.0) {
    const double lo = p.mu2 * p.T - 10.0 * p.sigma2 * std::sqrt(p.T);
    const double hi = p.mu1 * p.T + 10.0 * p.sigma1 * std::sqrt(p.T);
    const int n = 2001;
    const double dy = (hi - lo) / (n - 1);

    auto vprime_sign_fn = [this](double y) {
        double d1;
        psi_.log_derivs(y, &d1, nullptr);
        return -d1;  // V' up to the positive factor h^2
    };

    std::vector<double> roots;
    double prev = vprime_sign_fn(lo);
    for (int i = 1; i < n; ++i) {
        const double y = lo + i * dy;
        const double cur = vprime_sign_fn(y);
        if (prev == 0.0) {
            roots.push_back(y - dy);
        } else if ((prev < 0.0) != (cur < 0.0) && cur != 0.0) {
            roots.push_back(brent(vprime_sign_fn, y - dy, y, 1e-12, 200));
        }
        prev = cur;
    }
    if (prev == 0.0) roots.push_back(hi);

    if (roots.size() != 1 && roots.size() != 3)
        throw NumericalError("potential: expected 1 or 3 critical points, sign scan on a " +
                             std::to_string(n) + "-point grid (spacing " + std::to_string(dy) +
                             ") found " + std::to_string(roots.size()));

    double vmin_raw = std::numeric_limits<double>::infinity();
    const double h2 = p.h * p.h;
    for (double r : roots) {
        double d2;
        psi_.log_derivs(r, nullptr, &d2);
        critical_points_.push_back({r, d2 < 0.0 ? CritKind::minimum : CritKind::maximum});
        vmin_raw = std::fmin(vmin_raw, -h2 * psi_.log_value(r));
    }
    std::sort(critical_points_.begin(), critical_points_.end(),
              [](const CriticalPoint& x, const CriticalPoint& y) { return x.y < y.y; });
    V0_ = -vmin_raw;
}

double potential_value(const PotentialFn& p, double y) {
    if (!std::isfinite(y)) throw std::invalid_argument("potential_value: y not finite");
    const double h2 = p.params().h * p.params().h;
    return -h2 * p.psi().log_value(y) + p.V0();
}

PotentialDerivs potential_derivs(const PotentialFn& p, double y) {
    if (!std::isfinite(y)) throw std::invalid_argument("potential_derivs: y not finite");
    double d1, d2;
    p.psi().log_derivs(y, &d1, &d2);
    const double h2 = p.params().h * p.params().h;
    const double v1 = -h2 * d1;
    return {v1, -h2 * d2, v1 / std::sqrt(2.0)};
}

const std::vector<CriticalPoint>& find_critical_points(const PotentialFn& p) {
    return p.critical_points();
}

bool is_double_well(const PotentialFn& p) { return p.critical_points().size() == 3; }

CriticalPoint global_minimum(const PotentialFn& p) {
    const CriticalPoint* best = nullptr;
    double vbest = std::numeric_limits<double>::infinity();
    // points are ascending in y and only strictly lower V replaces, so exact
    // ties (symmetric wells) resolve to the left minimum
    for (const auto& c : p.critical_points()) {
        if (c.kind != CritKind::minimum) continue;
        const double v = potential_value(p, c.y);
        if (!best || v < vbest) {
            vbest = v;
            best = &c;
        }
    }
    if (!best) throw NumericalError("global_minimum: no minimum among critical points");
    return *best;
}

}  // namespace nes
