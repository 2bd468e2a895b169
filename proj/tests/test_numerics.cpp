#include "doctest.h"

#include "nes/errors.hpp"
#include "nes/ode.hpp"
#include "nes/quadrature.hpp"
#include "nes/rng.hpp"
#include "nes/rootfind.hpp"
#include "nes/special.hpp"
#include "nes/threads.hpp"

#include <atomic>
#include <cmath>
#include <vector>

using namespace nes;

TEST_SUITE_BEGIN("numerics");

TEST_CASE("gk15 panel is exact for low-degree polynomials") {
    // a 15-point Kronrod rule integrates polynomials up to degree 22 exactly
    auto f = [](double x) { return ((3.0 * x + 1.0) * x - 2.0) * x * x + 0.5; };
    auto [v, err] = gk15(f, -1.0, 2.0);
    // int over [-1,2]: 3/5 x^5 + 1/4 x^4 - 2/3 x^3 + x/2 | = 99/5 + 15/4 - 6 + 3/2
    const double exact = 99.0 / 5.0 + 15.0 / 4.0 - 6.0 + 1.5;
    CHECK(v == doctest::Approx(exact).epsilon(1e-15));
    CHECK(err < 1e-12);
}

TEST_CASE("integrate_gk on known integrals") {
    CHECK(integrate_gk([](double x) { return std::exp(-x * x); }, -9.0, 9.0, 1e-13) ==
          doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
    CHECK(integrate_gk([](double x) { return std::sin(x); }, 0.0, pi, 1e-13) ==
          doctest::Approx(2.0).epsilon(1e-13));
    // oscillatory integrand forces recursive subdivision
    CHECK(integrate_gk([](double x) { return std::cos(20.0 * x) * std::exp(-x); }, 0.0, 5.0,
                       1e-12) ==
          doctest::Approx((20.0 * std::sin(100.0) - std::cos(100.0)) * std::exp(-5.0) / 401.0 +
                          1.0 / 401.0)
              .epsilon(1e-11));
    // orientation
    CHECK(integrate_gk([](double x) { return x; }, 1.0, 0.0, 1e-13) ==
          doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(integrate_gk([](double x) { return x; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("integrate_simpson agrees with integrate_gk") {
    auto f = [](double x) { return std::exp(-0.5 * x * x) * (1.0 + std::sin(3.0 * x)); };
    const double a = integrate_gk(f, -6.0, 6.0, 1e-12);
    const double b = integrate_simpson(f, -6.0, 6.0, 1e-12);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("brent finds bracketed roots") {
    CHECK(brent([](double x) { return std::cos(x); }, 0.0, 2.0) ==
          doctest::Approx(pi / 2.0).epsilon(1e-14));
    CHECK(brent([](double x) { return x * x * x - 2.0; }, 0.0, 2.0) ==
          doctest::Approx(std::cbrt(2.0)).epsilon(1e-14));
    // endpoint roots returned as-is
    CHECK(brent([](double x) { return x - 1.0; }, 1.0, 3.0) == 1.0);
    CHECK_THROWS_AS(brent([](double x) { return 1.0 + x * x; }, -1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("rk45 integrates exponential decay to tolerance") {
    // y' = -y, y(0) = 1
    const double y1 = rk45_advance([](double, double y) { return -y; }, 0.0, 1.0, 3.0,
                                   1e-12, 1e-14);
    CHECK(y1 == doctest::Approx(std::exp(-3.0)).epsilon(1e-10));
    // backward in time
    const double y0 = rk45_advance([](double, double y) { return -y; }, 3.0, y1, 0.0,
                                   1e-12, 1e-14);
    CHECK(y0 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rk45_sample endpoints and consistency with rk4_fixed") {
    auto f = [](double t, double y) { return y - t * t; };  // y' = y - t^2
    auto ys = rk45_sample(f, 0.0, 1.0, 2.0, 21, 1e-11, 1e-13);
    REQUIRE(ys.size() == 21);
    CHECK(ys[0] == 1.0);
    // exact: y = t^2 + 2t + 2 - e^t  for y(0)=1
    auto exact = [](double t) { return t * t + 2.0 * t + 2.0 - std::exp(t); };
    for (int i = 0; i < 21; ++i)
        CHECK(ys[static_cast<size_t>(i)] == doctest::Approx(exact(0.1 * i)).epsilon(1e-9));
    CHECK(rk4_fixed(f, 0.0, 1.0, 2.0, 4000) == doctest::Approx(exact(2.0)).epsilon(1e-10));
}

TEST_CASE("rng determinism and stream independence") {
    Rng a(12345), b(12345), c(999);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
    // different seeds diverge immediately with overwhelming probability
    CHECK(a.bits() != c.bits());

    Rng s0 = derive_stream(42, 0), s1 = derive_stream(42, 1), s0b = derive_stream(42, 0);
    CHECK(s0.bits() == s0b.bits());
    CHECK(s0.bits() != s1.bits());
}

TEST_CASE("rng normals have the right low moments") {
    Rng r(2024);
    const int n = 200000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s1 += z;
        s2 += z * z;
    }
    CHECK(std::fabs(s1 / n) < 0.01);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("parallel_for covers every index exactly once") {
    const std::size_t n = 1000;
    std::vector<std::atomic<int>> hits(n);
    for (auto& h : hits) h.store(0);
    parallel_for(n, 4, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (std::size_t i = 0; i < n; ++i) CHECK(hits[i].load() == 1);
    // single-threaded path
    std::vector<int> plain(n, 0);
    parallel_for(n, 1, [&](std::size_t i) { plain[i] += 1; });
    for (std::size_t i = 0; i < n; ++i) CHECK(plain[i] == 1);
}

TEST_CASE("parallel_for propagates worker exceptions") {
    CHECK_THROWS_AS(parallel_for(16, 4,
                                 [](std::size_t i) {
                                     if (i == 7) throw NumericalError("boom");
                                 }),
                    NumericalError);
}

TEST_SUITE_END();
