#include "nes/simulate.hpp"

#include "nes/errors.hpp"
#include "nes/ode.hpp"
#include "nes/passage.hpp"
#include "nes/rng.hpp"
#include "nes/threads.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nes {

void validate_sim(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
        throw std::invalid_argument("sim: dt must be positive");
    if (!(cfg.dt <= cfg.horizon)) throw std::invalid_argument("sim: dt must not exceed horizon");
    if (cfg.n_paths < 1) throw std::invalid_argument("sim: n_paths must be >= 1");
    if (!std::isfinite(cfg.y0) || !std::isfinite(cfg.horizon))
        throw std::invalid_argument("sim: y0 and horizon must be finite");
}

namespace {

std::vector<double> run_paths(const NesParams& p, const SimConfig& cfg,
                              const std::vector<double>* y_init) {
    validate_sim(cfg);
    validate_params(p);
    if (y_init && y_init->size() != static_cast<size_t>(cfg.n_paths))
        throw std::invalid_argument("sim: y_init size must equal n_paths");
    const Psi0 psi(p);
    const double h2 = p.h * p.h;
    const long n_steps = std::lround(std::ceil(cfg.horizon / cfg.dt - 1e-9));
    std::vector<double> out(static_cast<size_t>(cfg.n_paths));
    parallel_for(static_cast<size_t>(cfg.n_paths), cfg.threads, [&](size_t i) {
        Rng rng = derive_stream(cfg.seed, i);
        double y = y_init ? (*y_init)[i] : cfg.y0;
        double t = 0.0;
        for (long s = 0; s < n_steps; ++s) {
            // last step may be clipped so paths end exactly at the horizon
            const double step = std::fmin(cfg.dt, cfg.horizon - t);
            double l1;
            psi.log_derivs(y, &l1, nullptr);
            // drift -V' = h^2 (log Psi0)'
            y += h2 * l1 * step + p.h * std::sqrt(step) * rng.normal();
            t += step;
        }
        out[i] = y;
    });
    return out;
}

}  // namespace

std::vector<double> simulate_paths(const NesParams& p, const SimConfig& cfg) {
    return run_paths(p, cfg, nullptr);
}

std::vector<double> simulate_paths(const NesParams& p, const SimConfig& cfg,
                                   const std::vector<double>& y_init) {
    return run_paths(p, cfg, &y_init);
}

FirstPassageEstimate empirical_first_passage(const NesParams& p, const SimConfig& cfg,
                                             double absorbing_y) {
    validate_sim(cfg);
    validate_params(p);
    if (absorbing_y > cfg.y0)
        throw std::invalid_argument("empirical_first_passage: absorbing_y must be <= y0");
    FirstPassageEstimate est;
    if (absorbing_y == cfg.y0) return est;  // absorbed immediately

    const double lam = escape_rate(p, cfg.y0, absorbing_y);
    est.cap_time = 20.0 / lam;
    const Psi0 psi(p);
    const double h2 = p.h * p.h;
    const double sdt = p.h * std::sqrt(cfg.dt);
    // batch-extend unabsorbed paths; the batch is just a progress granule
    const long batch_steps = std::lround(std::ceil(cfg.horizon / cfg.dt));
    const long cap_steps = std::lround(std::ceil(est.cap_time / cfg.dt));

    std::vector<double> times(static_cast<size_t>(cfg.n_paths));
    std::vector<char> capped(static_cast<size_t>(cfg.n_paths), 0);
    parallel_for(static_cast<size_t>(cfg.n_paths), cfg.threads, [&](size_t i) {
        Rng rng = derive_stream(cfg.seed, i);
        double y = cfg.y0;
        long s = 0;
        while (s < cap_steps) {
            const long stop = std::min(cap_steps, s + batch_steps);
            for (; s < stop; ++s) {
                double l1;
                psi.log_derivs(y, &l1, nullptr);
                y += h2 * l1 * cfg.dt + sdt * rng.normal();
                if (y <= absorbing_y) {
                    times[i] = (s + 1) * cfg.dt;
                    return;
                }
            }
        }
        times[i] = cap_steps * cfg.dt;
        capped[i] = 1;
    });

    double acc = 0.0;
    long ncap = 0;
    for (size_t i = 0; i < times.size(); ++i) {
        acc += times[i];
        ncap += capped[i];
    }
    est.mean_time = acc / static_cast<double>(cfg.n_paths);
    est.cap_fraction = static_cast<double>(ncap) / static_cast<double>(cfg.n_paths);
    est.biased_low = est.cap_fraction > 0.05;
    return est;
}

double cubic_value(const CubicPotential& cp, double y) {
    return -cp.theta * y + 0.5 * cp.kappa * y * y + cp.g / 3.0 * y * y * y;
}

double cubic_vprime(const CubicPotential& cp, double y) {
    return -cp.theta + cp.kappa * y + cp.g * y * y;
}

InstantonPoints instanton_points(const CubicPotential& cp) {
    const double disc = cp.kappa * cp.kappa + 4.0 * cp.g * cp.theta;
    if (!(disc > 0.0) || cp.g == 0.0)
        throw std::invalid_argument("instanton: V' needs two distinct real roots "
                                    "(kappa^2 + 4 g theta > 0, g != 0)");
    const double sq = std::sqrt(disc);
    InstantonPoints out;
    out.y_star = (-cp.kappa + sq) / (2.0 * cp.g);
    out.y_hat = (-cp.kappa - sq) / (2.0 * cp.g);
    if (out.y_star < out.y_hat) std::swap(out.y_star, out.y_hat);
    out.rate = cp.g * (out.y_star - out.y_hat);
    return out;
}

double instanton_closed_form(const CubicPotential& cp, double t, double t_c) {
    const InstantonPoints ip = instanton_points(cp);
    const double e = std::exp(-ip.rate * (t - t_c));
    return ip.y_star + (ip.y_hat - ip.y_star) / (1.0 + e);
}

double cubic_reflection_point(const CubicPotential& cp) {
    // V - V(y_star) has a double root at y_star; the third root is read off
    // the coefficient sum
    const InstantonPoints ip = instanton_points(cp);
    return -1.5 * cp.kappa / cp.g - 2.0 * ip.y_star;
}

Trajectory instanton_ode(const CubicPotential& cp, double y_init,
                         std::pair<double, double> t_span, int n_samples) {
    auto f = [&cp](double, double y) { return cubic_vprime(cp, y); };
    Trajectory tr;
    tr.y = rk45_sample(f, t_span.first, y_init, t_span.second, n_samples, 1e-12, 1e-14);
    tr.t.resize(tr.y.size());
    for (size_t i = 0; i < tr.t.size(); ++i)
        tr.t[i] = t_span.first +
                  (t_span.second - t_span.first) * static_cast<double>(i) /
                      static_cast<double>(tr.t.size() - 1);
    return tr;
}

Trajectory instanton_ode(const PotentialFn& pot, double y_init,
                         std::pair<double, double> t_span, int n_samples) {
    auto f = [&pot](double, double y) { return potential_derivs(pot, y).V1; };
    Trajectory tr;
    tr.y = rk45_sample(f, t_span.first, y_init, t_span.second, n_samples, 1e-12, 1e-14);
    tr.t.resize(tr.y.size());
    for (size_t i = 0; i < tr.t.size(); ++i)
        tr.t[i] = t_span.first +
                  (t_span.second - t_span.first) * static_cast<double>(i) /
                      static_cast<double>(tr.t.size() - 1);
    return tr;
}

}  // namespace nes
