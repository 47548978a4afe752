#include "rawls/fat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rawls::fat {

double robust_tail(double mu, double sigma, double b, TailSide side) {
    if (sigma < 0.0) throw std::invalid_argument("robust_tail: sigma must be >= 0");
    double a = (side == TailSide::above) ? b - mu : mu - b;
    if (a <= 0.0) return 1.0;
    return sigma * sigma / (sigma * sigma + a * a);
}

TwoPointDistribution chebyshev_tight_distribution(double mu, double sigma, double a) {
    if (sigma <= 0.0 || a <= 0.0)
        throw std::invalid_argument("chebyshev_tight_distribution: sigma and a must be > 0");
    double s2 = sigma * sigma, a2 = a * a;
    TwoPointDistribution d;
    d.values[0] = mu + a;
    d.probabilities[0] = s2 / (s2 + a2);
    d.values[1] = mu - s2 / a;
    d.probabilities[1] = a2 / (s2 + a2);
    return d;
}

namespace {

struct GroupScalars {
    double mu0, sigma0, mu1, sigma1;
};

std::vector<GroupScalars> scalarize(const MomentTable& moments) {
    require_valid(moments);
    if (moments.d != 1)
        throw std::invalid_argument("fat: moment table must have d = 1");
    std::vector<GroupScalars> g(moments.p);
    for (int j = 1; j <= moments.p; ++j) {
        const auto& e0 = moments.at({0, j});
        const auto& e1 = moments.at({1, j});
        g[j - 1] = {e0.mean(0), std::sqrt(std::max(0.0, e0.cov(0, 0))),
                    e1.mean(0), std::sqrt(std::max(0.0, e1.cov(0, 0)))};
    }
    return g;
}

}  // namespace

FatResult fat_adapt(const MomentTable& moments) {
    const auto groups = scalarize(moments);

    // t_j = (mu_1j - mu_0j) / (sigma_1j + sigma_0j); +inf for noiseless
    // separable groups.
    std::vector<double> t(groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k) {
        const auto& g = groups[k];
        double ssum = g.sigma1 + g.sigma0;
        if (ssum == 0.0) {
            if (g.mu1 <= g.mu0)
                throw NonSeparableError(static_cast<int>(k + 1),
                                        "group " + std::to_string(k + 1) +
                                            ": mu_1 <= mu_0 with zero variance");
            t[k] = std::numeric_limits<double>::infinity();
        } else {
            t[k] = (g.mu1 - g.mu0) / ssum;
            if (t[k] <= 0.0)
                throw NonSeparableError(static_cast<int>(k + 1),
                                        "group " + std::to_string(k + 1) +
                                            ": mu_1 <= mu_0, no robust threshold below "
                                            "error 1");
        }
    }

    FatResult res;
    res.j_star = 1;
    for (std::size_t k = 1; k < t.size(); ++k)
        if (t[k] < t[res.j_star - 1]) res.j_star = static_cast<int>(k + 1);
    res.t_star = t[res.j_star - 1];
    const auto& gs = groups[res.j_star - 1];

    if (std::isinf(res.t_star)) {
        // Every group is noiseless; split the worst gap at its midpoint.
        res.b_star = 0.5 * (gs.mu0 + gs.mu1);
        res.r_star = 0.0;
    } else {
        double b_from_0 = gs.mu0 + gs.sigma0 * res.t_star;
        double b_from_1 = gs.mu1 - gs.sigma1 * res.t_star;
        double scale = std::max({1.0, std::abs(b_from_0), std::abs(b_from_1)});
        if (std::abs(b_from_0 - b_from_1) > 1e-9 * scale)
            throw std::logic_error("fat_adapt: the two threshold expressions disagree");
        res.b_star = b_from_0;
        res.r_star = 1.0 / (1.0 + res.t_star * res.t_star);
    }

    for (int j = 1; j <= moments.p; ++j) {
        const auto& g = groups[j - 1];
        res.per_group_bound[{0, j}] = robust_tail(g.mu0, g.sigma0, res.b_star, TailSide::above);
        res.per_group_bound[{1, j}] = robust_tail(g.mu1, g.sigma1, res.b_star, TailSide::below);
    }
    res.high_error_warning = res.r_star >= 0.5;
    return res;
}

FatGridResult fat_grid_oracle(const MomentTable& moments, int grid_points) {
    const auto groups = scalarize(moments);
    if (grid_points < 2) throw std::invalid_argument("grid_points must be >= 2");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& g : groups) {
        lo = std::min(lo, g.mu0);
        hi = std::max(hi, g.mu1);
    }
    if (!(lo < hi)) throw std::invalid_argument("fat_grid_oracle: empty threshold bracket");

    FatGridResult best;
    for (int k = 0; k < grid_points; ++k) {
        double b = lo + (hi - lo) * k / (grid_points - 1);
        double worst = 0.0;
        for (const auto& g : groups) {
            worst = std::max(worst, robust_tail(g.mu0, g.sigma0, b, TailSide::above));
            worst = std::max(worst, robust_tail(g.mu1, g.sigma1, b, TailSide::below));
        }
        if (k == 0 || worst < best.worst_bound) {
            best.worst_bound = worst;
            best.b = b;
        }
    }
    return best;
}

}  // namespace rawls::fat
