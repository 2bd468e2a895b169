#pragma once

// Scalar special functions shared across the library: scaled complementary
// error function, normal pdf/cdf (plain and log form) and the normal quantile.
// All of these sit on hot paths, so they are plain free functions over double.

namespace nes {

inline constexpr double pi = 3.14159265358979323846264338327950288;

// e^{x^2} erfc(x).  Stable for large positive x where erfc underflows.
// For x <= ~-26.6 the true value exceeds DBL_MAX and +inf is returned.
double erfcx(double x);

double norm_pdf(double x);

// standard normal CDF, accurate in both tails
double norm_cdf(double x);

// log of the standard normal CDF; safe for x down to -1e7 and beyond
double log_norm_cdf(double x);

// inverse standard normal CDF (quantile), p in (0,1).
// Wichura's AS 241 rational approximations, |rel err| < 1e-15.
double norm_ppf(double p);

// log(e^a + e^b) without overflow; tolerates -inf arguments
double log_add_exp(double a, double b);

}
