#include "nes/special.hpp"

#include <cmath>
#include <limits>

namespace nes {

namespace {
const double inv_sqrt_pi = 0.564189583547756286948079451561;  // 1/sqrt(pi)
const double inv_sqrt_2pi = 0.398942280401432677939946059934;
const double sqrt2 = 1.41421356237309504880168872421;
}

// Continued fraction e^{x^2} erfc(x) = (1/sqrt(pi)) / (x + (1/2)/(x + (2/2)/(x + ...)))
// evaluated backward.  Converges rapidly for x >= 6, where the
// exp(x^2)*erfc(x) product would start losing accuracy.
static double erfcx_cf(double x) {
    double t = 0.0;
    for (int k = 36; k >= 1; --k)
        t = (0.5 * k) / (x + t);
    return inv_sqrt_pi / (x + t);
}

double erfcx(double x) {
    if (std::isnan(x)) return x;
    if (x >= 6.0) return erfcx_cf(x);
    if (x >= 0.0) return std::exp(x * x) * std::erfc(x);
    // reflection; overflows to +inf for x <~ -26.6 where the value
    // exceeds the double range (2 e^{x^2} dominates)
    double e = std::exp(x * x);
    if (std::isinf(e)) return e;
    return 2.0 * e - erfcx(-x);
}

double norm_pdf(double x) {
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / sqrt2);
}

double log_norm_cdf(double x) {
    if (x > -1.0)
        return std::log(norm_cdf(x));
    // Phi(x) = (1/2) e^{-x^2/2} erfcx(-x/sqrt2) for x < 0
    return -0.5 * x * x + std::log(0.5 * erfcx(-x / sqrt2));
}

double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = a > b ? a : b;
    double d = (a > b ? b : a) - m;
    return m + std::log1p(std::exp(d));
}

// AS 241 (Wichura), double-precision branch PPND16.
double norm_ppf(double p) {
    if (!(p > 0.0 && p < 1.0))
        return std::numeric_limits<double>::quiet_NaN();

    static const double a[8] = {
        3.3871328727963666080e0,  1.3314166789178437745e2,
        1.9715909503065514427e3,  1.3731693765509461125e4,
        4.5921953931549871457e4,  6.7265770927008700853e4,
        3.3430575583588128105e4,  2.5090809287301226727e3};
    static const double b[8] = {
        1.0,                      4.2313330701600911252e1,
        6.8718700749205790830e2,  5.3941960214247511077e3,
        2.1213794301586595867e4,  3.9307895800092710610e4,
        2.8729085735721942674e4,  5.2264952788528545610e3};
    static const double c[8] = {
        1.42343711074968357734e0,  4.63033784615654529590e0,
        5.76949722146069140550e0,  3.64784832476320460504e0,
        1.27045825245236838258e0,  2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static const double d[8] = {
        1.0,                       2.05319162663775882187e0,
        1.67638483018380384940e0,  6.89767334985100004550e-1,
        1.48103976427480074590e-1, 1.51986665636164571966e-2,
        5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static const double e[8] = {
        6.65790464350110377720e0,  5.46378491116411436990e0,
        1.78482653991729133580e0,  2.96560571828504891230e-1,
        2.65321895265761230930e-2, 1.24266094738807843860e-3,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static const double f[8] = {
        1.0,                       5.99832206555887937690e-1,
        1.36929880922735805310e-1, 1.48753612908506148525e-2,
        7.86869131145613259100e-4, 1.84631831751005468180e-5,
        1.42151175831644588870e-7, 2.04426310338993978564e-15};

    auto ratpoly = [](const double (&num)[8], const double (&den)[8], double r) {
        double n = num[7], dn = den[7];
        for (int i = 6; i >= 0; --i) {
            n = n * r + num[i];
            dn = dn * r + den[i];
        }
        return n / dn;
    };

    double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        return q * ratpoly(a, b, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0)
        v = ratpoly(c, d, r - 1.6);
    else
        v = ratpoly(e, f, r - 5.0);
    return q < 0.0 ? -v : v;
}

}
