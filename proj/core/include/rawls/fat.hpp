#pragma once

#include <map>
#include <vector>

#include "rawls/moments.hpp"
#include "rawls/types.hpp"

namespace rawls::fat {

enum class TailSide { above, below };

// Worst case of P(X >= b) (above) or P(X <= b) (below) over all
// distributions with the given mean and standard deviation: 1 when b is on
// the wrong side of the mean, else sigma^2 / (sigma^2 + (b - mu)^2).
double robust_tail(double mu, double sigma, double b, TailSide side);

struct TwoPointDistribution {
    double values[2];
    double probabilities[2];
};

// Two-point distribution with mean mu, std sigma, and P(X >= mu + a)
// exactly sigma^2 / (sigma^2 + a^2): the witness that the one-sided
// Chebyshev bound is tight.
TwoPointDistribution chebyshev_tight_distribution(double mu, double sigma, double a);

struct FatResult {
    double b_star = 0.0;
    double r_star = 0.0;
    int j_star = 1;
    double t_star = 0.0;  // (mu_1j* - mu_0j*) / (sigma_1j* + sigma_0j*)
    std::map<SubPopId, double> per_group_bound;
    bool high_error_warning = false;  // r_star >= 0.5
};

// Distribution-robust threshold on a 1-D score (d=1 moment table).
// Throws NonSeparableError naming the offending group when some group has
// mu_1j <= mu_0j with positive sigma sum.
FatResult fat_adapt(const MomentTable& moments);

struct FatGridResult {
    double b = 0.0;
    double worst_bound = 1.0;
};

// Independent oracle: minimizes the max of all 2p robust tail bounds over a
// uniform grid of thresholds in [min_j mu_0j, max_j mu_1j].
FatGridResult fat_grid_oracle(const MomentTable& moments, int grid_points);

}  // namespace rawls::fat
