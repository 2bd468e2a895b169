#include "nes/measure.hpp"

#include "nes/errors.hpp"
#include "nes/passage.hpp"
#include "nes/potential.hpp"
#include "nes/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace nes {

namespace {

const double neg_inf = -std::numeric_limits<double>::infinity();

// exponential tilt e^{c y} of a Gaussian mixture: each component keeps its
// stdev, gains c s_k^2 in mean, and its weight picks up e^{c m_k + c^2 s_k^2/2}
GaussianMixture tilt_mixture(const GaussianMixture& m, double c) {
    const size_t K = m.weights.size();
    std::vector<double> lw(K, neg_inf);
    double lse = neg_inf;
    for (size_t k = 0; k < K; ++k) {
        if (m.weights[k] <= 0.0) continue;
        const double s2 = m.stdevs[k] * m.stdevs[k];
        lw[k] = std::log(m.weights[k]) + c * m.means[k] + 0.5 * c * c * s2;
        lse = log_add_exp(lse, lw[k]);
    }
    GaussianMixture out = m;
    for (size_t k = 0; k < K; ++k) {
        out.weights[k] = lw[k] == neg_inf ? 0.0 : std::exp(lw[k] - lse);
        out.means[k] = m.means[k] + c * m.stdevs[k] * m.stdevs[k];
    }
    return out;
}

double tilt_b_impl(const NesParams& p, double y0, double t, const double* y_star) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument("tilt_b: t must be finite and >= 0");
    const GroundState gs = ground_state(p);
    const CentralStats st = central_stats(gs.density.mixture);
    const double b0 = (y0 - st.mean) / st.variance;
    if (b0 == 0.0 || t == 0.0) return b0;
    const double lam = y_star ? escape_rate(p, y0, *y_star) : escape_rate(p, y0);
    return b0 * std::exp(-lam * t);
}

// constraint residual R(xi) = E_w[mu + xi sigma_hat^2] - target and its
// derivative; weights tilted in log space
void xi_residual(const GaussianMixture& mix, double T, double xi, double target,
                 double* R, double* Rp) {
    const size_t K = mix.weights.size();
    std::vector<double> lw(K, neg_inf);
    double lse = neg_inf;
    for (size_t k = 0; k < K; ++k) {
        if (mix.weights[k] <= 0.0) continue;
        const double s2 = mix.stdevs[k] * mix.stdevs[k];
        lw[k] = std::log(mix.weights[k]) + xi * mix.means[k] + 0.5 * xi * xi * s2;
        lse = log_add_exp(lse, lw[k]);
    }
    double M = 0.0, Es2 = 0.0;
    for (size_t k = 0; k < K; ++k) {
        if (lw[k] == neg_inf) continue;
        const double w = std::exp(lw[k] - lse);
        const double s2 = mix.stdevs[k] * mix.stdevs[k];
        M += w * (mix.means[k] + xi * s2);
        Es2 += w * s2;
    }
    double Vphi = 0.0;
    for (size_t k = 0; k < K; ++k) {
        if (lw[k] == neg_inf) continue;
        const double w = std::exp(lw[k] - lse);
        const double phi = mix.means[k] + xi * mix.stdevs[k] * mix.stdevs[k];
        Vphi += w * (phi - M) * (phi - M);
    }
    *R = M / T - target;
    if (Rp) *Rp = (Es2 + Vphi) / T;
}

double xi_start(const GaussianMixture& mix, double T, double target) {
    // T -> 0 limit under the untilted weights; a good start at any T
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < mix.weights.size(); ++k) {
        num += mix.weights[k] * (target - mix.means[k] / T);
        den += mix.weights[k] * mix.stdevs[k] * mix.stdevs[k] / T;
    }
    return num / den;
}

}  // namespace

double tilt_b(const NesParams& p, double y0, double t) { return tilt_b_impl(p, y0, t, nullptr); }
double tilt_b(const NesParams& p, double y0, double t, double y_star) {
    return tilt_b_impl(p, y0, t, &y_star);
}

MeasureDensity real_density(const NesParams& p, double y0, double t) {
    const double b = tilt_b(p, y0, t);
    return MeasureDensity{MeasureKind::real, tilt_mixture(ground_state(p).density.mixture, b), b, p};
}

MeasureDensity real_density(const NesParams& p, double y0, double t, double y_star) {
    const double b = tilt_b(p, y0, t, y_star);
    return MeasureDensity{MeasureKind::real, tilt_mixture(ground_state(p).density.mixture, b), b, p};
}

double solve_xi_prime(const NesParams& p, const MarketEnv& market, XiPrimeInfo* info) {
    validate_market(market);
    const GaussianMixture mix = ground_state(p).density.mixture;
    const double target = market.r_f - market.q_div - 0.5 * p.h * p.h;

    double x = xi_start(mix, p.T, target);
    double R, Rp;
    xi_residual(mix, p.T, x, target, &R, &Rp);

    // R is strictly increasing in xi (derivative is a variance plus a mean of
    // squares), so bracket by doubling steps in the needed direction
    double lo = x, hi = x, Rlo = R, Rhi = R;
    double step = std::fmax(1.0, std::fabs(x));
    for (int i = 0; i < 200 && Rlo > 0.0; ++i) {
        lo -= step;
        step *= 2.0;
        xi_residual(mix, p.T, lo, target, &Rlo, nullptr);
    }
    step = std::fmax(1.0, std::fabs(x));
    for (int i = 0; i < 200 && Rhi < 0.0; ++i) {
        hi += step;
        step *= 2.0;
        xi_residual(mix, p.T, hi, target, &Rhi, nullptr);
    }

    bool ok = false;
    int it = 0;
    if (Rlo <= 0.0 && Rhi >= 0.0) {
        for (; it < 200; ++it) {
            if (std::fabs(R) < 1e-15 * std::fmax(1.0, std::fabs(target))) { ok = true; break; }
            double xn = x - R / Rp;
            if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);  // bisection safeguard
            if (xn == x) { ok = std::fabs(R) < 1e-12; break; }
            x = xn;
            xi_residual(mix, p.T, x, target, &R, &Rp);
            (R < 0.0 ? lo : hi) = x;
        }
        if (!ok && std::fabs(R) < 1e-12) ok = true;
    }

    bool fallback = false;
    if (!ok) {
        // fixed-point fallback
        try {
            x = solve_xi_prime_fixed_point(p, market);
            xi_residual(mix, p.T, x, target, &R, &Rp);
            ok = std::fabs(R) < 1e-12;
            fallback = true;
        } catch (const NumericalError&) {
            ok = false;
        }
    }
    if (!ok) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "solve_xi_prime: no convergence; last xi'=%.17g gradient=%.17g residual=%.17g",
                      x, Rp, R);
        throw NumericalError(buf);
    }
    if (info) *info = XiPrimeInfo{x, R, it, fallback};
    return x;
}

double solve_xi_prime_fixed_point(const NesParams& p, const MarketEnv& market,
                                  double tol, int max_iter) {
    validate_market(market);
    const GaussianMixture mix = ground_state(p).density.mixture;
    const double target = market.r_f - market.q_div - 0.5 * p.h * p.h;
    double x = xi_start(mix, p.T, target);
    double R, prevR = std::numeric_limits<double>::infinity();
    double damp = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        const GaussianMixture w = tilt_mixture(mix, x);
        double Emu = 0.0, Es2 = 0.0;
        for (size_t k = 0; k < w.weights.size(); ++k) {
            Emu += w.weights[k] * mix.means[k] / p.T;  // means of the base mixture
            Es2 += w.weights[k] * mix.stdevs[k] * mix.stdevs[k] / p.T;
        }
        const double xn = (target - Emu) / Es2;
        xi_residual(mix, p.T, x, target, &R, nullptr);
        if (std::fabs(R) < tol) return x;
        if (std::fabs(R) > std::fabs(prevR)) damp = std::fmax(0.25 * damp, 1.0 / 64.0);
        prevR = R;
        x += damp * (xn - x);
    }
    xi_residual(mix, p.T, x, target, &R, nullptr);
    if (std::fabs(R) < 1e-12) return x;
    throw NumericalError("solve_xi_prime_fixed_point: no convergence");
}

MeasureDensity risk_neutral_density(const NesParams& p, const MarketEnv& market) {
    const double xi = solve_xi_prime(p, market);
    return MeasureDensity{MeasureKind::risk_neutral,
                          tilt_mixture(ground_state(p).density.mixture, xi), xi, p};
}

double forward_diagnostic(const MeasureDensity& q, const MarketEnv& market) {
    double Eexp = 0.0;
    for (size_t k = 0; k < q.mixture.weights.size(); ++k)
        Eexp += q.mixture.weights[k] *
                std::exp(q.mixture.means[k] + 0.5 * q.mixture.stdevs[k] * q.mixture.stdevs[k]);
    return Eexp - std::exp((market.r_f - market.q_div) * q.base.T);
}

namespace {

Moments3 moments_impl(const NesParams& p, double y0, double t, const double* y_star) {
    const double b = y_star ? tilt_b(p, y0, t, *y_star) : tilt_b(p, y0, t);
    const GaussianMixture mix = ground_state(p).density.mixture;
    const CentralStats st = central_stats(mix);
    const double M3 = central_moment(mix, 3);
    const double M4 = central_moment(mix, 4);
    Moments3 out;
    out.mean = st.mean + b * st.variance;
    out.variance = st.variance + b * M3;
    out.third_central = M3 + b * M4;
    out.perturbative_warning = std::fabs(b) * std::sqrt(st.variance) >= 0.5;
    return out;
}

}  // namespace

Moments3 time_dependent_moments(const NesParams& p, double y0, double t) {
    return moments_impl(p, y0, t, nullptr);
}

Moments3 time_dependent_moments(const NesParams& p, double y0, double t, double y_star) {
    return moments_impl(p, y0, t, &y_star);
}

}  // namespace nes
