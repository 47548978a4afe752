#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rawls/types.hpp"

namespace rawls::oracle {

// Explicit joint pmf over a finite feature domain x {0,1} x [p].
// mass is indexed by (point index, label, group); every sub-population
// must have positive marginal probability.
struct FiniteDistribution {
    std::vector<std::string> points;
    int p = 1;

    FiniteDistribution() = default;
    FiniteDistribution(std::vector<std::string> pts, int groups)
        : points(std::move(pts)), p(groups),
          mass_(points.size() * 2 * static_cast<std::size_t>(groups), 0.0) {}

    int n() const { return static_cast<int>(points.size()); }

    double mass(int x, int label, int group) const { return mass_[index(x, label, group)]; }
    void set_mass(int x, int label, int group, double m) { mass_[index(x, label, group)] = m; }

    double marginal(int x) const;          // P(X = x)
    double subpop_prob(const SubPopId& id) const;  // p_ij

    // Throws std::invalid_argument on negative mass, total != 1 (1e-12),
    // a zero-marginal point, or an unrepresented sub-population.
    void validate() const;

  private:
    std::size_t index(int x, int label, int group) const {
        return (static_cast<std::size_t>(x) * 2 + label) * p + (group - 1);
    }
    std::vector<double> mass_;
};

// eta_ij(x) = P(Y=i, Z=j | X=x); u_ij = eta_ij / p_ij has unit expectation.
struct UnveilTable {
    std::vector<std::string> points;
    int p = 1;
    std::vector<double> marginal_x;            // per point
    std::vector<double> eta_;                  // n x 2p
    std::vector<double> u_;                    // n x 2p

    double eta(int x, const SubPopId& id) const { return eta_[idx(x, id)]; }
    double u(int x, const SubPopId& id) const { return u_[idx(x, id)]; }

  private:
    std::size_t idx(int x, const SubPopId& id) const {
        return (static_cast<std::size_t>(x) * 2 + id.label) * p + (id.group - 1);
    }
    friend UnveilTable unveil(const FiniteDistribution&);
};

struct TabularClassifier {
    std::map<std::string, int> assignment;  // point -> label in {0,1}

    int at(const std::string& point) const;
};

struct DualWeights {
    std::map<SubPopId, double> c;

    double at(const SubPopId& id) const {
        auto it = c.find(id);
        return it == c.end() ? 0.0 : it->second;
    }
    // Throws on negative weights or sum above 1 + 1e-12.
    void validate() const;
};

UnveilTable unveil(const FiniteDistribution& dist);

// r_ij(f), computed both directly and through the unveil identity;
// the two routes must agree to 1e-12.
std::map<SubPopId, double> error_rates(const FiniteDistribution& dist,
                                       const TabularClassifier& f);

// E_X[f(X) sum_ij (-1)^i c_ij u_ij(X)] + sum_j c_1j.
double max_error_dual(const FiniteDistribution& dist, const TabularClassifier& f,
                      const DualWeights& c);

struct RawlsOptimum {
    std::vector<TabularClassifier> optima;         // canonical ascending order
    double r_star = 1.0;
    std::vector<std::set<SubPopId>> argmax_sets;   // per optimum
    bool truncated = false;                        // optimum list capped at 64
};

// Exact minimax over all 2^n deterministic classifiers; |domain| <= 24.
RawlsOptimum brute_force_rawls(const FiniteDistribution& dist);

// g(c) = E_X[min(0, sum_j c_0j u_0j(X) - c_1j u_1j(X))] + sum_j c_1j.
double dual_value(const FiniteDistribution& dist, const DualWeights& c);

struct DualGridResult {
    DualWeights c_star;
    double value = 0.0;
};

// Maximizes dual_value over the simplex grid {c >= 0, sum c = 1} with step
// 1/resolution; requires 2p <= 4. Ties resolve to the lexicographically
// smallest grid point in sub-population order.
DualGridResult dual_grid_maximize(const FiniteDistribution& dist, int resolution);

struct ThresholdP1 {
    double t = 0.0;
    TabularClassifier f;
};

// p=1 threshold form of the classifier induced by dual weights c:
// t = (c0/p01) / (c1/p11 + c0/p01), f(x) = 1{P(Y=1|X=x) >= t}.
ThresholdP1 rawls_threshold_p1(const FiniteDistribution& dist, const DualWeights& c);

}  // namespace rawls::oracle
