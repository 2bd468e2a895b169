#include "nes/mixture.hpp"

#include "nes/errors.hpp"
#include "nes/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nes {

void validate_mixture(const GaussianMixture& m) {
    const size_t k = m.weights.size();
    if (k == 0 || m.means.size() != k || m.stdevs.size() != k)
        throw std::invalid_argument("mixture: weight/mean/stdev lengths must match and be >= 1");
    double sum = 0.0;
    for (size_t i = 0; i < k; ++i) {
        if (!(m.weights[i] >= 0.0 && m.weights[i] <= 1.0))
            throw std::invalid_argument("mixture: weight " + std::to_string(i) + " outside [0,1]");
        if (!(m.stdevs[i] > 0.0))
            throw std::invalid_argument("mixture: stdev " + std::to_string(i) + " must be > 0");
        if (!std::isfinite(m.means[i]))
            throw std::invalid_argument("mixture: mean " + std::to_string(i) + " not finite");
        sum += m.weights[i];
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("mixture: weights sum to " + std::to_string(sum) +
                                    ", expected 1 within 1e-12");
}

GaussianMixture make_mixture(std::vector<double> weights, std::vector<double> means,
                             std::vector<double> stdevs) {
    GaussianMixture m{std::move(weights), std::move(means), std::move(stdevs)};
    validate_mixture(m);
    return m;
}

double pdf(const GaussianMixture& m, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("mixture pdf: x not finite");
    double v = 0.0;
    for (size_t i = 0; i < m.weights.size(); ++i) {
        const double z = (x - m.means[i]) / m.stdevs[i];
        v += m.weights[i] / m.stdevs[i] * norm_pdf(z);
    }
    return v;
}

double log_pdf(const GaussianMixture& m, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("mixture log_pdf: x not finite");
    double acc = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < m.weights.size(); ++i) {
        if (m.weights[i] == 0.0) continue;
        const double z = (x - m.means[i]) / m.stdevs[i];
        const double li = std::log(m.weights[i]) - std::log(m.stdevs[i]) -
                          0.5 * z * z - 0.918938533204672741780329736406;  // log sqrt(2 pi)
        acc = log_add_exp(acc, li);
    }
    return acc;
}

double cdf(const GaussianMixture& m, double x) {
    double v = 0.0;
    for (size_t i = 0; i < m.weights.size(); ++i)
        v += m.weights[i] * norm_cdf((x - m.means[i]) / m.stdevs[i]);
    return v;
}

std::vector<double> raw_moments(const GaussianMixture& m, int order) {
    if (order < 1 || order > 4)
        throw std::invalid_argument("raw_moments: order must be in {1,..,4}");
    std::vector<double> out(static_cast<size_t>(order), 0.0);
    for (size_t i = 0; i < m.weights.size(); ++i) {
        const double w = m.weights[i], mu = m.means[i], s2 = m.stdevs[i] * m.stdevs[i];
        out[0] += w * mu;
        if (order >= 2) out[1] += w * (mu * mu + s2);
        if (order >= 3) out[2] += w * (mu * mu * mu + 3.0 * mu * s2);
        if (order >= 4) out[3] += w * (mu * mu * mu * mu + 6.0 * mu * mu * s2 + 3.0 * s2 * s2);
    }
    return out;
}

CentralStats central_stats(const GaussianMixture& m) {
    const auto M = raw_moments(m, 4);
    const double mean = M[0];
    const double var = M[1] - mean * mean;
    if (!(var > 0.0))
        throw NumericalError("central_stats: non-positive variance " + std::to_string(var));
    const double sd = std::sqrt(var);
    const double m3 = M[2] - 3.0 * mean * M[1] + 2.0 * mean * mean * mean;
    const double m4 = M[3] - 4.0 * mean * M[2] + 6.0 * mean * mean * M[1] -
                      3.0 * mean * mean * mean * mean;
    return {mean, var, m3 / (sd * sd * sd), m4 / (var * var)};
}

double central_moment(const GaussianMixture& m, int k) {
    if (k < 1 || k > 4) throw std::invalid_argument("central_moment: k must be in {1,..,4}");
    const auto M = raw_moments(m, k);
    const double mu = M[0];
    switch (k) {
        case 1: return 0.0;
        case 2: return M[1] - mu * mu;
        case 3: return M[2] - 3.0 * mu * M[1] + 2.0 * mu * mu * mu;
        default:
            return M[3] - 4.0 * mu * M[2] + 6.0 * mu * mu * M[1] - 3.0 * mu * mu * mu * mu;
    }
}

std::pair<double, double> support_window(const GaussianMixture& m, double nsd) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, smax = 0.0;
    for (size_t i = 0; i < m.means.size(); ++i) {
        lo = std::fmin(lo, m.means[i]);
        hi = std::fmax(hi, m.means[i]);
        smax = std::fmax(smax, m.stdevs[i]);
    }
    return {lo - nsd * smax, hi + nsd * smax};
}

double sample(const GaussianMixture& m, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    size_t pick = m.weights.size() - 1;
    for (size_t i = 0; i < m.weights.size(); ++i) {
        acc += m.weights[i];
        if (u <= acc) {
            pick = i;
            break;
        }
    }
    return m.means[pick] + m.stdevs[pick] * rng.normal();
}

}  // namespace nes
