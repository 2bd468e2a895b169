#include "nes/calibrate.hpp"

#include "nes/errors.hpp"
#include "nes/measure.hpp"
#include "nes/rng.hpp"
#include "nes/threads.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace nes {

namespace {

constexpr size_t kDim = 5;  // (mu, sigma1, sigma2, a, h)
using Vec = std::array<double, kDim>;

struct Prep {
    std::vector<double> weights;
    std::vector<double> expiries;       // distinct, ascending
    std::vector<size_t> expiry_of;      // per quote
    double reg_lambda = 0.0;
    std::vector<std::string> warnings;
};

void validate_quotes(const std::vector<OptionQuote>& quotes) {
    if (quotes.empty()) throw std::invalid_argument("calibrate: need at least one quote");
    for (const auto& q : quotes) {
        if (!(q.strike > 0.0) || !(q.expiry_T > 0.0) || !(q.mid >= 0.0) ||
            !std::isfinite(q.strike) || !std::isfinite(q.expiry_T) || !std::isfinite(q.mid))
            throw std::invalid_argument("calibrate: quote fields out of range");
        if (q.kind != quotes.front().kind)
            throw std::invalid_argument("calibrate: quotes must all be the same kind; "
                                        "calls and puts are calibrated separately");
    }
}

Prep prepare(const std::vector<OptionQuote>& quotes, const MarketEnv& market,
             const CalibConfig& cfg) {
    validate_quotes(quotes);
    validate_market(market);
    if (cfg.reg_lambda && !(*cfg.reg_lambda >= 0.0))
        throw std::invalid_argument("calibrate: reg_lambda must be >= 0");
    if (cfg.n_starts < 1) throw std::invalid_argument("calibrate: n_starts must be >= 1");
    for (size_t j = 0; j < kDim; ++j)
        if (!(cfg.bounds.lo[j] < cfg.bounds.hi[j]))
            throw std::invalid_argument("calibrate: bounds must satisfy lower < upper");

    Prep prep;
    prep.weights.resize(quotes.size(), 1.0);
    for (size_t n = 0; n < quotes.size(); ++n) {
        try {
            prep.weights[n] = 1.0 / bs_delta_from_implied(quotes[n], market);
        } catch (const std::exception& e) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "quote %zu: implied-vol inversion failed (%s); unit weight",
                          n, e.what());
            prep.warnings.emplace_back(buf);
            prep.weights[n] = 1.0;
        }
    }
    // ATM = strikes closest to spot, ties included
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& q : quotes) dmin = std::fmin(dmin, std::fabs(q.strike - market.spot));
    for (size_t n = 0; n < quotes.size(); ++n)
        if (std::fabs(quotes[n].strike - market.spot) <= dmin * (1.0 + 1e-12))
            prep.weights[n] *= cfg.atm_weight_boost;

    prep.expiry_of.resize(quotes.size());
    for (const auto& q : quotes) prep.expiries.push_back(q.expiry_T);
    std::sort(prep.expiries.begin(), prep.expiries.end());
    prep.expiries.erase(std::unique(prep.expiries.begin(), prep.expiries.end()),
                        prep.expiries.end());
    for (size_t n = 0; n < quotes.size(); ++n)
        prep.expiry_of[n] = static_cast<size_t>(
            std::lower_bound(prep.expiries.begin(), prep.expiries.end(), quotes[n].expiry_T) -
            prep.expiries.begin());

    if (cfg.reg_lambda) {
        prep.reg_lambda = *cfg.reg_lambda;
    } else {
        double mean_mid = 0.0;
        for (const auto& q : quotes) mean_mid += q.mid;
        mean_mid /= static_cast<double>(quotes.size());
        prep.reg_lambda = 1e3 * mean_mid * mean_mid;
    }
    return prep;
}

// fit term plus the drift-constraint penalty (the inner xi' solve drives the
// residual to machine level, so the penalty only bites if that solve degrades)
double loss_prepared(const NesParams& p, const std::vector<OptionQuote>& quotes,
                     const MarketEnv& market, const Prep& prep,
                     std::vector<double>* errors_out, double* xi_out) {
    double sq = 0.0;
    double worst_residual = 0.0;
    if (errors_out) errors_out->assign(quotes.size(), 0.0);
    for (size_t e = 0; e < prep.expiries.size(); ++e) {
        const double T = prep.expiries[e];
        const MeasureDensity q = risk_neutral_density(with_horizon(p, T), market);
        if (xi_out && e == 0) *xi_out = q.tilt;
        const double target = market.r_f - market.q_div - 0.5 * p.h * p.h;
        double drift = 0.0;
        for (size_t k = 0; k < q.mixture.weights.size(); ++k)
            drift += q.mixture.weights[k] * q.mixture.means[k] / T;
        worst_residual = std::fmax(worst_residual, std::fabs(drift - target));
        for (size_t n = 0; n < quotes.size(); ++n) {
            if (prep.expiry_of[n] != e) continue;
            const double c = nes_option_price(q, market, quotes[n].strike, quotes[n].kind);
            const double err = c - quotes[n].mid;
            if (errors_out) (*errors_out)[n] = err;
            sq += prep.weights[n] * err * err;
        }
    }
    return sq / static_cast<double>(quotes.size()) +
           prep.reg_lambda * worst_residual * worst_residual;
}

NesParams params_from(const Vec& v, double T) {
    return symmetric_mu_params(v[0], v[1], v[2], v[3], v[4], T);
}

Vec clamp_vec(const Vec& v, const ParamBounds& b, double* excess2) {
    Vec c{};
    double acc = 0.0;
    for (size_t j = 0; j < kDim; ++j) {
        c[j] = std::clamp(v[j], b.lo[j], b.hi[j]);
        const double d = v[j] - c[j];
        acc += d * d;
    }
    if (excess2) *excess2 = acc;
    return c;
}

struct NmOut {
    Vec x{};
    double f = std::numeric_limits<double>::infinity();
};

// standard Nelder-Mead with reflection 1, expansion 2, contraction 1/2,
// shrink 1/2; objective must be total (returns a large value on failure)
template <class F>
NmOut nelder_mead(F&& f, const Vec& x0, const Vec& step, double tol, int max_iter) {
    constexpr int N = static_cast<int>(kDim);
    std::array<Vec, N + 1> xs;
    std::array<double, N + 1> fs;
    xs[0] = x0;
    fs[0] = f(x0);
    for (int j = 0; j < N; ++j) {
        xs[static_cast<size_t>(j) + 1] = x0;
        xs[static_cast<size_t>(j) + 1][static_cast<size_t>(j)] += step[static_cast<size_t>(j)];
        fs[static_cast<size_t>(j) + 1] = f(xs[static_cast<size_t>(j) + 1]);
    }
    std::array<int, N + 1> order;
    for (int it = 0; it < max_iter; ++it) {
        for (int k = 0; k <= N; ++k) order[static_cast<size_t>(k)] = k;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return fs[static_cast<size_t>(a)] < fs[static_cast<size_t>(b)]; });
        const int ib = order[0], iw = order[N], is = order[N - 1];
        if (fs[static_cast<size_t>(iw)] - fs[static_cast<size_t>(ib)] <=
            tol * (1.0 + std::fabs(fs[static_cast<size_t>(ib)])))
            break;
        Vec cen{};
        for (int k = 0; k <= N; ++k) {
            if (k == iw) continue;
            for (size_t j = 0; j < kDim; ++j) cen[j] += xs[static_cast<size_t>(k)][j] / N;
        }
        auto blend = [&](double t) {
            Vec x{};
            for (size_t j = 0; j < kDim; ++j)
                x[j] = cen[j] + t * (xs[static_cast<size_t>(iw)][j] - cen[j]);
            return x;
        };
        const Vec xr = blend(-1.0);
        const double fr = f(xr);
        if (fr < fs[static_cast<size_t>(ib)]) {
            const Vec xe = blend(-2.0);
            const double fe = f(xe);
            if (fe < fr) { xs[static_cast<size_t>(iw)] = xe; fs[static_cast<size_t>(iw)] = fe; }
            else         { xs[static_cast<size_t>(iw)] = xr; fs[static_cast<size_t>(iw)] = fr; }
            continue;
        }
        if (fr < fs[static_cast<size_t>(is)]) {
            xs[static_cast<size_t>(iw)] = xr;
            fs[static_cast<size_t>(iw)] = fr;
            continue;
        }
        const bool outside = fr < fs[static_cast<size_t>(iw)];
        const Vec xc = blend(outside ? -0.5 : 0.5);
        const double fc = f(xc);
        if (fc < std::fmin(fr, fs[static_cast<size_t>(iw)])) {
            xs[static_cast<size_t>(iw)] = xc;
            fs[static_cast<size_t>(iw)] = fc;
            continue;
        }
        for (int k = 0; k <= N; ++k) {  // shrink toward the best vertex
            if (k == ib) continue;
            for (size_t j = 0; j < kDim; ++j)
                xs[static_cast<size_t>(k)][j] =
                    0.5 * (xs[static_cast<size_t>(k)][j] + xs[static_cast<size_t>(ib)][j]);
            fs[static_cast<size_t>(k)] = f(xs[static_cast<size_t>(k)]);
        }
    }
    NmOut out;
    for (int k = 0; k <= N; ++k)
        if (fs[static_cast<size_t>(k)] < out.f) { out.f = fs[static_cast<size_t>(k)]; out.x = xs[static_cast<size_t>(k)]; }
    return out;
}

}  // namespace

double loss(const NesParams& p, const std::vector<OptionQuote>& quotes, const MarketEnv& market,
            const CalibConfig& cfg) {
    const Prep prep = prepare(quotes, market, cfg);
    return loss_prepared(p, quotes, market, prep, nullptr, nullptr);
}

CalibrationResult calibrate(const std::vector<OptionQuote>& quotes, const MarketEnv& market,
                            const CalibConfig& cfg) {
    const Prep prep = prepare(quotes, market, cfg);
    const int n = cfg.n_starts;

    // Latin hypercube starts: one stratum per start and dimension, jittered,
    // order shuffled per dimension
    std::vector<Vec> starts(static_cast<size_t>(n));
    Rng rng = derive_stream(cfg.seed, 0);
    for (size_t j = 0; j < kDim; ++j) {
        std::vector<int> perm(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
        for (int i = n - 1; i > 0; --i) {
            const int k = static_cast<int>(rng.uniform() * (i + 1));
            std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(std::min(k, i))]);
        }
        for (int i = 0; i < n; ++i) {
            const double u = (perm[static_cast<size_t>(i)] + rng.uniform()) / n;
            starts[static_cast<size_t>(i)][j] =
                cfg.bounds.lo[j] + u * (cfg.bounds.hi[j] - cfg.bounds.lo[j]);
        }
    }
    if (cfg.init_params) {
        const NesParams& ip = *cfg.init_params;
        starts[0] = Vec{ip.mu1, ip.sigma1, ip.sigma2, ip.a, ip.h};
    }

    auto objective = [&](const Vec& raw) -> double {
        double excess2 = 0.0;
        const Vec c = clamp_vec(raw, cfg.bounds, &excess2);
        try {
            return loss_prepared(params_from(c, cfg.horizon_T), quotes, market, prep, nullptr,
                                 nullptr) +
                   1e6 * excess2;
        } catch (const std::exception&) {
            return 1e100;
        }
    };

    struct StartOut {
        Vec x{};
        double f0 = 0.0, f = std::numeric_limits<double>::infinity();
    };
    std::vector<StartOut> outs(static_cast<size_t>(n));
    parallel_for(static_cast<size_t>(n), cfg.threads, [&](size_t i) {
        Vec step{};
        for (size_t j = 0; j < kDim; ++j) step[j] = 0.05 * (cfg.bounds.hi[j] - cfg.bounds.lo[j]);
        outs[i].f0 = objective(starts[i]);
        NmOut nm = nelder_mead(objective, starts[i], step, cfg.tol, cfg.max_iter);
        // one tighter restart around the found point; cheap and shakes off
        // simplex collapse
        Vec step2{};
        for (size_t j = 0; j < kDim; ++j) step2[j] = 0.1 * step[j];
        nm = nelder_mead(objective, nm.x, step2, cfg.tol, cfg.max_iter);
        outs[i].x = nm.x;
        outs[i].f = nm.f;
    });

    size_t best = 0;
    for (size_t i = 1; i < outs.size(); ++i)
        if (outs[i].f < outs[best].f) best = i;

    CalibrationResult res;
    res.starts_summary.reserve(outs.size());
    for (const auto& o : outs) res.starts_summary.push_back(o.f);
    res.warnings = prep.warnings;

    const Vec xbest = clamp_vec(outs[best].x, cfg.bounds, nullptr);
    res.params = params_from(xbest, cfg.horizon_T);
    res.loss = loss_prepared(res.params, quotes, market, prep, &res.per_quote_errors,
                             &res.xi_prime);

    double mabs = 0.0, mrel = 0.0;
    size_t npos = 0;
    for (size_t k = 0; k < quotes.size(); ++k) {
        mabs += std::fabs(res.per_quote_errors[k]);
        if (quotes[k].mid > 0.0) {
            mrel += std::fabs(res.per_quote_errors[k]) / quotes[k].mid;
            ++npos;
        }
    }
    res.mape = mabs / static_cast<double>(quotes.size());
    res.mape_rel = npos ? mrel / static_cast<double>(npos) : 0.0;

    bool improved = false;
    for (const auto& o : outs) improved = improved || o.f < o.f0;
    res.converged = std::isfinite(res.loss) && (improved || res.loss <= cfg.tol);
    if (!res.converged)
        res.warnings.emplace_back("no start improved on its initial loss");
    return res;
}

const char* regime_name(RegimeClass r) {
    switch (r) {
        case RegimeClass::equilibrium: return "equilibrium";
        case RegimeClass::unstable: return "unstable";
        case RegimeClass::metastable: return "metastable";
    }
    return "unknown";
}

PotentialReport implied_potential_report(const CalibrationResult& result, const MarketEnv& market,
                                         double y0) {
    validate_market(market);
    const PotentialFn pot = make_potential(result.params);
    PotentialReport rep;
    rep.y0 = y0;
    rep.critical_points = pot.critical_points();
    rep.double_well = is_double_well(pot);
    const CriticalPoint g = global_minimum(pot);
    rep.y_global_min = g.y;
    const double V2g = potential_derivs(pot, g.y).V2;
    rep.sigma_eq = result.params.h / std::sqrt(2.0 * V2g);

    if (rep.double_well) {
        const double ym = pot.critical_points()[1].y;
        rep.barrier_height = potential_value(pot, ym);
        const bool beyond_barrier = (y0 - ym) * (g.y - ym) < 0.0;
        if (beyond_barrier)
            rep.regime = RegimeClass::metastable;
        else
            rep.regime = std::fabs(y0 - g.y) > 2.0 * rep.sigma_eq ? RegimeClass::unstable
                                                                  : RegimeClass::equilibrium;
    } else {
        rep.regime = std::fabs(y0 - g.y) > 2.0 * rep.sigma_eq ? RegimeClass::unstable
                                                              : RegimeClass::equilibrium;
    }

    const GaussianMixture mix = ground_state(result.params).density.mixture;
    auto [lo, hi] = support_window(mix, 6.0);
    lo = std::fmin(lo, y0 - 0.1);
    hi = std::fmax(hi, y0 + 0.1);
    const int npts = 401;
    rep.grid_y.resize(npts);
    rep.grid_V.resize(npts);
    for (int i = 0; i < npts; ++i) {
        const double y = lo + (hi - lo) * i / (npts - 1);
        rep.grid_y[static_cast<size_t>(i)] = y;
        rep.grid_V[static_cast<size_t>(i)] = potential_value(pot, y);
    }
    return rep;
}

}  // namespace nes
