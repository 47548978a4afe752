#pragma once

namespace rawls {

// Standard normal CDF, absolute error <= 1e-10.
double normal_cdf(double t);

// Inverse of normal_cdf on (0,1); |normal_cdf(normal_quantile(q)) - q| <= 1e-9.
// Throws std::domain_error for q outside (0,1).
double normal_quantile(double q);

}  // namespace rawls
