#pragma once

// Scalar ODE integrators: adaptive Dormand-Prince 5(4) and a fixed-step RK4
// used as an independent check.  Only autonomous/explicit scalar equations
// are needed here (instanton flows), so everything stays double-in/double-out.

#include "nes/errors.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace nes {

// Advance y' = f(t, y) from (t0, y0) to t1 with adaptive steps.
template <class F>
double rk45_advance(F&& f, double t0, double y0, double t1,
                    double rel_tol = 1e-10, double abs_tol = 1e-12) {
    if (t1 == t0) return y0;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0, y = y0;
    double h = dir * std::fmin(0.1, std::fabs(t1 - t0));
    double k1 = f(t, y);
    int rejected_in_row = 0;
    while (dir * (t1 - t) > 0.0) {
        if (dir * (t + h - t1) > 0.0) h = t1 - t;
        // remainder below double resolution: no representable step can move
        // the solution, so the endpoint is reached
        if (std::fabs(h) <
            4.0 * std::numeric_limits<double>::epsilon() * std::fmax(std::fabs(t), std::fabs(t1)))
            break;
        const double k2 = f(t + h / 5.0, y + h * (k1 / 5.0));
        const double k3 = f(t + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
        const double k4 = f(t + 4.0 * h / 5.0,
                            y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
        const double k5 = f(t + 8.0 * h / 9.0,
                            y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                     64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
        const double k6 = f(t + h,
                            y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                     46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                     5103.0 / 18656.0 * k5));
        const double y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 +
                                   125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 +
                                   11.0 / 84.0 * k6);
        const double k7 = f(t + h, y5);
        const double y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                                   393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                                   187.0 / 2100.0 * k6 + k7 / 40.0);
        const double sc = abs_tol + rel_tol * std::fmax(std::fabs(y), std::fabs(y5));
        const double err = std::fabs(y5 - y4) / sc;
        if (err <= 1.0) {
            t += h;
            y = y5;
            k1 = k7;  // FSAL
            rejected_in_row = 0;
        } else if (++rejected_in_row > 60) {
            throw NumericalError("rk45: step size underflow at t = " + std::to_string(t));
        }
        double fac = 0.9 * std::pow(err > 0.0 ? err : 1e-10, -0.2);
        fac = std::fmin(5.0, std::fmax(0.2, fac));
        h *= fac;
        // only a rejected step shrinking below resolution is a failure; after
        // an accepted step a tiny h just gets re-clamped to the remainder
        if (err > 1.0 && std::fabs(h) < 1e-14 * std::fmax(1.0, std::fabs(t)))
            throw NumericalError("rk45: step size underflow at t = " + std::to_string(t));
    }
    return y;
}

// Sample the solution at n_samples uniformly spaced times over [t0, t1]
// (endpoints included); result[i] is y(t0 + i*dt).
template <class F>
std::vector<double> rk45_sample(F&& f, double t0, double y0, double t1, int n_samples,
                                double rel_tol = 1e-10, double abs_tol = 1e-12) {
    if (n_samples < 2) throw std::invalid_argument("rk45_sample: need n_samples >= 2");
    std::vector<double> out(static_cast<size_t>(n_samples));
    out[0] = y0;
    const double dt = (t1 - t0) / (n_samples - 1);
    double y = y0;
    for (int i = 1; i < n_samples; ++i) {
        const double ta = t0 + (i - 1) * dt, tb = (i == n_samples - 1) ? t1 : t0 + i * dt;
        y = rk45_advance(f, ta, y, tb, rel_tol, abs_tol);
        out[static_cast<size_t>(i)] = y;
    }
    return out;
}

// Classic fixed-step RK4 over n_steps; returns terminal value.
template <class F>
double rk4_fixed(F&& f, double t0, double y0, double t1, int n_steps) {
    const double h = (t1 - t0) / n_steps;
    double t = t0, y = y0;
    for (int i = 0; i < n_steps; ++i) {
        const double k1 = f(t, y);
        const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        const double k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = t0 + (i + 1) * h;
    }
    return y;
}

}  // namespace nes
