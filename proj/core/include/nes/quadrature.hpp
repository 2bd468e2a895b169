#pragma once

// Adaptive quadrature used throughout: 15-point Gauss-Kronrod panels with
// recursive bisection, plus a classic adaptive Simpson for independent
// cross-checks in tests.  Integrands are templated to keep the hot loops
// inlineable.

#include "nes/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace nes {

namespace detail {

// QUADPACK dqk15 abscissae/weights
inline constexpr double gk_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

}  // namespace detail

// One Gauss-Kronrod 15(7) panel; returns (integral, error estimate).
template <class F>
std::pair<double, double> gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    const double fc = f(c);
    double kron = detail::gk_wk[7] * fc;
    double gauss = detail::gk_wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = hw * detail::gk_x[j];
        const double fsum = f(c - dx) + f(c + dx);
        kron += detail::gk_wk[j] * fsum;
        if (j % 2 == 1)  // odd-index abscissae are the embedded Gauss nodes
            gauss += detail::gk_wg[j / 2] * fsum;
    }
    kron *= hw;
    gauss *= hw;
    double err = std::fabs(kron - gauss);
    // standard QUADPACK sharpening of the raw difference
    err = 200.0 * err * std::sqrt(err);
    if (err > std::fabs(kron - gauss)) err = std::fabs(kron - gauss);
    return {kron, err};
}

namespace detail {

template <class F>
double gk_refine(F& f, double a, double b, double tol, int depth, double* err_out) {
    auto [v, e] = gk15(f, a, b);
    if (e <= tol || b - a < 1e-15 * (std::fabs(a) + std::fabs(b) + 1.0)) {
        *err_out += e;
        return v;
    }
    if (depth <= 0)
        throw NumericalError(
            "adaptive quadrature did not converge: achieved error " +
            std::to_string(e) + " > tolerance " + std::to_string(tol) +
            " on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    const double m = 0.5 * (a + b);
    return gk_refine(f, a, m, 0.5 * tol, depth - 1, err_out) +
           gk_refine(f, m, b, 0.5 * tol, depth - 1, err_out);
}

}  // namespace detail

// Adaptive GK15: refines until the summed panel error estimate is below
// max(abs_tol, rel_tol * |I|) with I from a first whole-interval pass.
template <class F>
double integrate_gk(F&& f, double a, double b, double rel_tol = 1e-10,
                    double abs_tol = 0.0, double* err_est = nullptr) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    auto [v0, e0] = gk15(f, a, b);
    double tol = std::fmax(abs_tol, rel_tol * std::fabs(v0));
    if (tol <= 0.0) tol = abs_tol > 0.0 ? abs_tol : 1e-12;
    double err = 0.0;
    double v = (e0 <= tol) ? v0 : detail::gk_refine(f, a, b, tol, 48, &err);
    if (e0 <= tol) err = e0;
    if (err_est) *err_est = err;
    return sign * v;
}

namespace detail {

template <class F>
double simpson_refine(F& f, double a, double m, double b, double fa, double fm,
                      double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol || depth <= 0)
        return left + right + delta / 15.0;
    return simpson_refine(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_refine(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance; independent of the GK code path
// on purpose (used as a second opinion in oracles).
template <class F>
double integrate_simpson(F&& f, double a, double b, double abs_tol = 1e-12) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return sign * detail::simpson_refine(f, a, m, b, fa, fm, fb, whole, abs_tol, 52);
}

}  // namespace nes
