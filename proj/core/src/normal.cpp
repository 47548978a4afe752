#include "rawls/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace rawls {

double normal_cdf(double t) {
    // Phi(t) = erfc(-t / sqrt(2)) / 2. erfc keeps full relative accuracy in
    // the lower tail, so the absolute error stays far below 1e-10 everywhere.
    return 0.5 * std::erfc(-t / std::sqrt(2.0));
}

namespace {

// Acklam-style rational initial guess for the probit function.
double quantile_guess(double q) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (q < plow) {
        double u = std::sqrt(-2.0 * std::log(q));
        return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
               ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    }
    if (q > 1.0 - plow) return -quantile_guess(1.0 - q);
    double u = q - 0.5, r = u * u;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0))
        throw std::domain_error("normal_quantile: q must be in (0,1)");
    // Newton refinement against normal_cdf itself, so the round trip is
    // self-consistent to well under 1e-9.
    double x = quantile_guess(q);
    for (int it = 0; it < 4; ++it) {
        double err = normal_cdf(x) - q;
        double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        if (pdf <= 0.0) break;
        double step = err / pdf;
        x -= step;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(x))) break;
    }
    return x;
}

}  // namespace rawls
