#include "doctest.h"

#include "nes/mixture.hpp"
#include "nes/params.hpp"
#include "nes/potential.hpp"
#include "nes/quadrature.hpp"
#include "nes/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace nes;

namespace {

// a = 0.3, mu = +-0.4, sigma1 = 0.2, sigma2 = 0.3, h = 0.05, T = 1
NesParams ref_params() { return symmetric_mu_params(0.4, 0.2, 0.3, 0.3, 0.05); }

// reference values for the stationary mixture of ref_params, computed with
// scipy quadrature at tolerance 1e-15
constexpr double kW[3] = {0.84759627810683058, 0.10378729936002007, 0.048616422533149357};
constexpr double kMeans[3] = {0.4, -0.4, 0.1538461538461538};
constexpr double kSds[3] = {0.14142135623730953, 0.21213203435596426, 0.16641005886756877};
constexpr double kOmega = 2.8905270861644854;
constexpr double kMean = 0.30500304111920873;
constexpr double kVar = 0.083313856824752744;
constexpr double kM3 = -0.041466443602483569;
constexpr double kM4 = 0.042523788502121282;

}  // namespace

TEST_SUITE_BEGIN("mixture");

TEST_CASE("make_mixture validation") {
    CHECK_THROWS_AS(make_mixture({0.5, 0.6}, {0.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_mixture({0.5, 0.5}, {0.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_mixture({0.5, 0.5}, {0.0, 1.0}, {1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_mixture({-0.1, 1.1}, {0.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_NOTHROW(make_mixture({1.0}, {0.3}, {0.2}));
}

TEST_CASE("stationary mixture structure matches references") {
    const StationaryDensity sd = ground_state(ref_params()).density;
    for (int k = 0; k < 3; ++k) {
        CHECK(sd.mixture.weights[static_cast<size_t>(k)] ==
              doctest::Approx(kW[k]).epsilon(1e-14));
        CHECK(sd.mixture.means[static_cast<size_t>(k)] ==
              doctest::Approx(kMeans[k]).epsilon(1e-14));
        CHECK(sd.mixture.stdevs[static_cast<size_t>(k)] ==
              doctest::Approx(kSds[k]).epsilon(1e-14));
    }
    CHECK(sd.Omega == doctest::Approx(kOmega).epsilon(1e-14));
    CHECK(sd.C2 == doctest::Approx(1.2263879895050078).epsilon(1e-14));
    CHECK(sd.mu3 == doctest::Approx(0.1538461538461538).epsilon(1e-14));
}

TEST_CASE("pdf integrates to one and matches point reference") {
    const GaussianMixture m = ground_state(ref_params()).density.mixture;
    const auto [lo, hi] = support_window(m, 12.0);
    CHECK(integrate_gk([&](double y) { return pdf(m, y); }, lo, hi, 1e-13) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pdf(m, 0.25) == doctest::Approx(1.4627814844022919).epsilon(1e-14));
    CHECK(log_pdf(m, 0.25) == doctest::Approx(std::log(pdf(m, 0.25))).epsilon(1e-14));
    // log_pdf stays finite far outside the bulk of the mass
    CHECK(std::isfinite(log_pdf(m, 40.0)));
}

TEST_CASE("cdf limits, monotonicity, and quadrature consistency") {
    const GaussianMixture m = ground_state(ref_params()).density.mixture;
    CHECK(cdf(m, -30.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cdf(m, 30.0) == doctest::Approx(1.0).epsilon(1e-15));
    double prev = -1.0;
    for (double y = -1.5; y <= 1.5; y += 0.125) {
        const double c = cdf(m, y);
        CHECK(c >= prev);
        prev = c;
    }
    const double q = integrate_gk([&](double y) { return pdf(m, y); }, -10.0, 0.3, 1e-13);
    CHECK(cdf(m, 0.3) == doctest::Approx(q).epsilon(1e-11));
}

TEST_CASE("closed-form moments against quadrature references") {
    const GaussianMixture m = ground_state(ref_params()).density.mixture;
    const CentralStats st = central_stats(m);
    CHECK(st.mean == doctest::Approx(kMean).epsilon(1e-13));
    CHECK(st.variance == doctest::Approx(kVar).epsilon(1e-13));
    CHECK(st.skewness == doctest::Approx(kM3 / std::pow(kVar, 1.5)).epsilon(1e-12));
    CHECK(st.kurtosis == doctest::Approx(kM4 / (kVar * kVar)).epsilon(1e-12));
    CHECK(central_moment(m, 3) == doctest::Approx(kM3).epsilon(1e-13));
    CHECK(central_moment(m, 4) == doctest::Approx(kM4).epsilon(1e-13));

    const auto raw = raw_moments(m, 4);
    REQUIRE(raw.size() == 5);
    CHECK(raw[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(raw[1] == doctest::Approx(kMean).epsilon(1e-13));
    // recompose the second central moment from raws
    CHECK(raw[2] - raw[1] * raw[1] == doctest::Approx(kVar).epsilon(1e-12));
}

TEST_CASE("support_window captures essentially all mass") {
    const GaussianMixture m = ground_state(ref_params()).density.mixture;
    const auto [lo, hi] = support_window(m, 8.0);
    CHECK(cdf(m, lo) < 1e-10);
    CHECK(1.0 - cdf(m, hi) < 1e-10);
    CHECK(lo < hi);
}

TEST_CASE("sampling matches the distribution in low moments") {
    const GaussianMixture m = ground_state(ref_params()).density.mixture;
    Rng rng(7);
    const int n = 400000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample(m, rng);
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    // 5 sigma Monte Carlo bands
    CHECK(std::fabs(mean - kMean) < 5.0 * std::sqrt(kVar / n));
    CHECK(std::fabs(var - kVar) < 5.0 * std::sqrt((kM4 - kVar * kVar) / n));
}

TEST_CASE("horizon scaling of the stationary mixture") {
    const NesParams p4 = with_horizon(ref_params(), 4.0);
    const GaussianMixture m1 = ground_state(ref_params()).density.mixture;
    const GaussianMixture m4 = ground_state(p4).density.mixture;
    // component means scale with T, stdevs with sqrt(T)
    CHECK(m4.means[0] == doctest::Approx(4.0 * m1.means[0]).epsilon(1e-15));
    CHECK(m4.stdevs[0] == doctest::Approx(2.0 * m1.stdevs[0]).epsilon(1e-15));
    CHECK(m4.stdevs[1] == doctest::Approx(2.0 * m1.stdevs[1]).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(validate_params(ref_params()));
    NesParams bad = ref_params();
    bad.sigma1 = 0.0;
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
    bad = ref_params();
    bad.a = 1.5;
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
    bad = ref_params();
    bad.T = 0.0;
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
    bad = ref_params();
    bad.mu2 = 0.5;  // violates mu2 <= mu1
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
}

TEST_SUITE_END();
