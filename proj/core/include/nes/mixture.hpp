#pragma once

// Generic finite Gaussian mixture with closed-form pdf/cdf, raw moments up
// to order 4 and the derived central statistics.  Means and stdevs are
// stored in absolute units; model-specific scalings (horizon T and friends)
// are applied by the callers that build the mixtures.

#include "nes/rng.hpp"

#include <vector>

namespace nes {

struct GaussianMixture {
    std::vector<double> weights;  // probabilities, sum to 1
    std::vector<double> means;
    std::vector<double> stdevs;   // strictly positive
};

// Validates the invariants (weight sum within 1e-12 of 1, weights in [0,1],
// stdevs > 0, equal lengths >= 1); throws std::invalid_argument.
GaussianMixture make_mixture(std::vector<double> weights, std::vector<double> means,
                             std::vector<double> stdevs);
void validate_mixture(const GaussianMixture& m);

double pdf(const GaussianMixture& m, double x);
double log_pdf(const GaussianMixture& m, double x);
double cdf(const GaussianMixture& m, double x);

// M_1..M_order as closed forms of the component parameters; order in {1,..,4}
std::vector<double> raw_moments(const GaussianMixture& m, int order);

struct CentralStats {
    double mean;
    double variance;
    double skewness;
    double kurtosis;  // not excess: a single Gaussian gives 3
};
CentralStats central_stats(const GaussianMixture& m);

// k-th central moment, k in {1,..,4}
double central_moment(const GaussianMixture& m, int k);

// integration window covering all components out to `nsd` stdevs
std::pair<double, double> support_window(const GaussianMixture& m, double nsd = 12.0);

// one draw (component by weight, then normal); deterministic given the Rng state
double sample(const GaussianMixture& m, Rng& rng);

}  // namespace nes
