#include "doctest.h"

#include "nes/params.hpp"
#include "nes/passage.hpp"
#include "nes/potential.hpp"
#include "nes/quadrature.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <stdexcept>

using namespace nes;

namespace {

NesParams ref_params() { return symmetric_mu_params(0.4, 0.2, 0.3, 0.3, 0.05); }

// scipy quadrature references (epsrel 1e-12) for ref_params with the
// absorbing threshold at the global minimum y_g = 0.39703138897771562:
//   T(y0) h^2 = 2 int_{y_g}^{y0} P(y) / Psi0^2(y) dy
constexpr double kYg = 0.39703138897771562;
constexpr double kTauH2Down055 = 0.038530867585753054;
constexpr double kTauH2Down065 = 0.053787586528161756;
// mirrored upward passage from y0 = -0.35 to the global minimum
constexpr double kTauH2UpM035 = 0.69427827780393336;

}  // namespace

TEST_SUITE_BEGIN("passage");

TEST_CASE("tail masses agree with mixture cdf") {
    const StationaryDensity sd = ground_state(ref_params()).density;
    for (double y : {-0.8, -0.2, 0.0, 0.3, 1.1}) {
        CHECK(std::exp(log_upper_mass(sd, y)) ==
              doctest::Approx(1.0 - cdf(sd.mixture, y)).epsilon(1e-12));
        CHECK(std::exp(log_lower_mass(sd, y)) ==
              doctest::Approx(cdf(sd.mixture, y)).epsilon(1e-12));
    }
    // complementarity holds in the far tail where cdf saturates
    const double lu = log_upper_mass(sd, 5.0);
    CHECK(std::isfinite(lu));
    CHECK(lu < -100.0);
}

TEST_CASE("downward passage time against quadrature references") {
    const NesParams p = ref_params();
    const double h2 = p.h * p.h;
    const EscapeResult r55 = passage_time_quadrature(p, 0.55, kYg);
    CHECK(r55.mean_passage_time * h2 == doctest::Approx(kTauH2Down055).epsilon(5e-8));
    CHECK(r55.lambda == doctest::Approx(1.0 / r55.mean_passage_time).epsilon(1e-15));
    CHECK(r55.method == PassageMethod::quadrature);
    const EscapeResult r65 = passage_time_quadrature(p, 0.65, kYg);
    CHECK(r65.mean_passage_time * h2 == doctest::Approx(kTauH2Down065).epsilon(5e-8));
    // the passage time grows with the starting distance
    CHECK(r65.mean_passage_time > r55.mean_passage_time);
}

TEST_CASE("upward passage via the mirrored integral") {
    const NesParams p = ref_params();
    const double h2 = p.h * p.h;
    const double lam = escape_rate(p, -0.35, kYg);
    CHECK(h2 / lam == doctest::Approx(kTauH2UpM035).epsilon(5e-8));
}

TEST_CASE("upward and downward rates agree under mirror symmetry") {
    // symmetric double well: escape from -y0 up to 0 equals escape from +y0
    // down to 0 by y -> -y symmetry
    const NesParams p = symmetric_mu_params(0.3, 0.1, 0.1, 0.5, 0.2);
    const double down = escape_rate(p, 0.25, 0.0);
    const double up = escape_rate(p, -0.25, 0.0);
    CHECK(down == doctest::Approx(up).epsilon(1e-9));
}

TEST_CASE("rate scaling: tau h^2 is h-independent") {
    const double base = [] {
        NesParams p = ref_params();
        p.h = 0.05;
        return passage_time_quadrature(p, 0.55, kYg).mean_passage_time * p.h * p.h;
    }();
    for (double h : {0.1, 0.2, 0.4}) {
        NesParams p = ref_params();
        p.h = h;
        const double v = passage_time_quadrature(p, 0.55, kYg).mean_passage_time * h * h;
        CHECK(v == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("escape_rate default overload absorbs at the global minimum") {
    const NesParams p = ref_params();
    const double lam = escape_rate(p, 0.55);
    CHECK(lam == doctest::Approx(escape_rate(p, 0.55, kYg)).epsilon(1e-10));
    // single wells have no default threshold
    CHECK_THROWS_AS(escape_rate(symmetric_mu_params(0.092, 0.09, 0.461, 0.505, 0.159), 0.3),
                    std::invalid_argument);
}

TEST_CASE("threshold edge cases") {
    const NesParams p = ref_params();
    CHECK(escape_rate(p, kYg, kYg) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(passage_time_quadrature(p, 0.3, 0.55), std::invalid_argument);
    CHECK_THROWS_AS(passage_time_quadrature(p, 0.55, 0.55), std::invalid_argument);
}

TEST_CASE("saddle-point approximation near the weak-mixture limit") {
    // nearly a pure double Gaussian: the weight factor S approaches 1 and
    // the saddle time matches the classical Kramers inverse rate
    const NesParams p = symmetric_mu_params(0.35, 0.05, 0.05, 3e-6, 0.2);
    const EscapeResult r = passage_time_saddle(p);
    CHECK(r.method == PassageMethod::saddle_point);
    CHECK(r.mean_passage_time / r.classical_mean_passage_time ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::isfinite(r.barrier));
    CHECK(r.barrier > 0.0);
    // saddle point requires a double well
    CHECK_THROWS_AS(passage_time_saddle(symmetric_mu_params(0.25, 0.2, 0.3, 0.0, 0.1)),
                    std::invalid_argument);
}

TEST_CASE("saddle vs quadrature on a high-barrier well") {
    // barrier ~10 h^2 units, scipy reference ratio 0.85761821503177449
    const NesParams p = symmetric_mu_params(0.35, 0.08, 0.08, 0.9, 0.3);
    const EscapeResult sad = passage_time_saddle(p);
    CHECK(sad.mean_passage_time == doctest::Approx(633236.04315603792).epsilon(1e-7));
    const EscapeResult quad = passage_time_quadrature(p, sad.y0, global_minimum(PotentialFn(p)).y);
    CHECK(quad.mean_passage_time == doctest::Approx(738365.89761864697).epsilon(1e-7));
    CHECK(sad.mean_passage_time / quad.mean_passage_time ==
          doctest::Approx(0.85761821503177449).epsilon(1e-6));
}

TEST_SUITE_END();
