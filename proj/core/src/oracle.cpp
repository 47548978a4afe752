#include "rawls/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace rawls::oracle {

double FiniteDistribution::marginal(int x) const {
    double m = 0.0;
    for (int i = 0; i <= 1; ++i)
        for (int j = 1; j <= p; ++j) m += mass(x, i, j);
    return m;
}

double FiniteDistribution::subpop_prob(const SubPopId& id) const {
    double m = 0.0;
    for (int x = 0; x < n(); ++x) m += mass(x, id.label, id.group);
    return m;
}

void FiniteDistribution::validate() const {
    if (p < 1) throw std::invalid_argument("group count p must be >= 1");
    if (points.empty()) throw std::invalid_argument("empty domain");
    double total = 0.0;
    for (double m : mass_) {
        if (m < 0.0) throw std::invalid_argument("negative probability mass");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("masses sum to " + std::to_string(total) +
                                    ", expected 1");
    for (int x = 0; x < n(); ++x)
        if (marginal(x) <= 0.0)
            throw std::invalid_argument("point '" + points[x] +
                                        "' has zero marginal; exclude it from the domain");
    for (const auto& id : all_subpops(p))
        if (subpop_prob(id) <= 0.0)
            throw std::invalid_argument("sub-population " + to_string(id) +
                                        " has zero probability");
    std::set<std::string> uniq(points.begin(), points.end());
    if (uniq.size() != points.size())
        throw std::invalid_argument("domain points are not distinct");
}

int TabularClassifier::at(const std::string& point) const {
    auto it = assignment.find(point);
    if (it == assignment.end())
        throw std::invalid_argument("classifier undefined on point '" + point + "'");
    return it->second;
}

void DualWeights::validate() const {
    double sum = 0.0;
    for (const auto& [id, v] : c) {
        if (v < 0.0)
            throw std::invalid_argument("negative dual weight at " + to_string(id));
        sum += v;
    }
    if (sum > 1.0 + 1e-12)
        throw std::invalid_argument("dual weights sum to " + std::to_string(sum) +
                                    " > 1");
}

UnveilTable unveil(const FiniteDistribution& dist) {
    dist.validate();
    UnveilTable t;
    t.points = dist.points;
    t.p = dist.p;
    const int n = dist.n();
    t.marginal_x.resize(n);
    t.eta_.assign(static_cast<std::size_t>(n) * 2 * dist.p, 0.0);
    t.u_.assign(t.eta_.size(), 0.0);
    for (int x = 0; x < n; ++x) t.marginal_x[x] = dist.marginal(x);
    for (const auto& id : all_subpops(dist.p)) {
        double pij = dist.subpop_prob(id);
        for (int x = 0; x < n; ++x) {
            double eta = dist.mass(x, id.label, id.group) / t.marginal_x[x];
            t.eta_[t.idx(x, id)] = eta;
            t.u_[t.idx(x, id)] = eta / pij;
        }
    }
    return t;
}

namespace {

// Per-point misclassification contributions: a[x][k] = mass(x,i,j) / p_ij,
// with k the flat sub-population index i*p + (j-1).
struct Precomp {
    int n = 0, p = 0;
    std::vector<double> a;       // n x 2p
    std::vector<SubPopId> ids;   // 2p, in flat order

    double at(int x, int k) const { return a[static_cast<std::size_t>(x) * 2 * p + k]; }
};

Precomp precompute(const FiniteDistribution& dist) {
    Precomp pc;
    pc.n = dist.n();
    pc.p = dist.p;
    pc.ids = all_subpops(dist.p);
    pc.a.assign(static_cast<std::size_t>(pc.n) * 2 * pc.p, 0.0);
    for (int k = 0; k < 2 * pc.p; ++k) {
        const SubPopId& id = pc.ids[k];
        double pij = dist.subpop_prob(id);
        for (int x = 0; x < pc.n; ++x)
            pc.a[static_cast<std::size_t>(x) * 2 * pc.p + k] =
                dist.mass(x, id.label, id.group) / pij;
    }
    return pc;
}

// Error rates from a bitmask over the point order of dist.points.
std::vector<double> mask_error_rates(const Precomp& pc, std::uint32_t mask) {
    std::vector<double> r(2 * pc.p, 0.0);
    for (int x = 0; x < pc.n; ++x) {
        if (!((mask >> x) & 1u)) continue;
        for (int k = 0; k < 2 * pc.p; ++k) r[k] += pc.at(x, k);
    }
    // r_0j = E[f u_0j]; r_1j = 1 - E[f u_1j].
    for (int k = pc.p; k < 2 * pc.p; ++k) r[k] = 1.0 - r[k];
    return r;
}

std::uint32_t classifier_mask(const FiniteDistribution& dist,
                              const TabularClassifier& f) {
    std::uint32_t mask = 0;
    for (int x = 0; x < dist.n(); ++x) {
        int y = f.at(dist.points[x]);
        if (y != 0 && y != 1)
            throw std::invalid_argument("classifier label must be 0 or 1");
        if (y) mask |= (1u << x);
    }
    return mask;
}

TabularClassifier mask_classifier(const FiniteDistribution& dist, std::uint32_t mask) {
    TabularClassifier f;
    for (int x = 0; x < dist.n(); ++x)
        f.assignment[dist.points[x]] = static_cast<int>((mask >> x) & 1u);
    return f;
}

}  // namespace

std::map<SubPopId, double> error_rates(const FiniteDistribution& dist,
                                       const TabularClassifier& f) {
    dist.validate();
    const auto pc = precompute(dist);
    const std::uint32_t mask = classifier_mask(dist, f);
    const auto via_unveil = mask_error_rates(pc, mask);

    std::map<SubPopId, double> out;
    for (int k = 0; k < 2 * pc.p; ++k) {
        const SubPopId& id = pc.ids[k];
        // Direct route: P(f(X) != Y | Y=i, Z=j).
        double pij = dist.subpop_prob(id);
        double wrong = 0.0;
        for (int x = 0; x < pc.n; ++x) {
            int y = static_cast<int>((mask >> x) & 1u);
            if (y != id.label) wrong += dist.mass(x, id.label, id.group);
        }
        double direct = wrong / pij;
        if (std::abs(direct - via_unveil[k]) > 1e-12)
            throw std::logic_error("error_rates: direct and unveil routes disagree at " +
                                   to_string(id));
        out[id] = direct;
    }
    return out;
}

double max_error_dual(const FiniteDistribution& dist, const TabularClassifier& f,
                      const DualWeights& c) {
    dist.validate();
    c.validate();
    const std::uint32_t mask = classifier_mask(dist, f);
    double acc = 0.0;
    for (int x = 0; x < dist.n(); ++x) {
        if (!((mask >> x) & 1u)) continue;
        // marginal(x) * u_ij(x) = mass(x,i,j) / p_ij
        for (const auto& id : all_subpops(dist.p)) {
            double term = c.at(id) * dist.mass(x, id.label, id.group) /
                          dist.subpop_prob(id);
            acc += (id.label == 0) ? term : -term;
        }
    }
    double c1_sum = 0.0;
    for (int j = 1; j <= dist.p; ++j) c1_sum += c.at({1, j});
    return acc + c1_sum;
}

RawlsOptimum brute_force_rawls(const FiniteDistribution& dist) {
    dist.validate();
    const int n = dist.n();
    if (n > 24) throw std::invalid_argument("brute_force_rawls: domain too large (n > 24)");
    const auto pc = precompute(dist);
    const std::uint64_t count = 1ull << n;

    double r_star = 2.0;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        auto r = mask_error_rates(pc, static_cast<std::uint32_t>(mask));
        double worst = *std::max_element(r.begin(), r.end());
        if (worst < r_star) r_star = worst;
    }

    RawlsOptimum out;
    out.r_star = r_star;
    constexpr std::size_t kCap = 64;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        auto r = mask_error_rates(pc, static_cast<std::uint32_t>(mask));
        double worst = *std::max_element(r.begin(), r.end());
        if (worst > r_star + 1e-14) continue;
        if (out.optima.size() >= kCap) {
            out.truncated = true;
            break;
        }
        out.optima.push_back(mask_classifier(dist, static_cast<std::uint32_t>(mask)));
        std::set<SubPopId> argmax;
        for (int k = 0; k < 2 * pc.p; ++k)
            if (r[k] >= worst - 1e-12) argmax.insert(pc.ids[k]);
        out.argmax_sets.push_back(std::move(argmax));
    }
    return out;
}

double dual_value(const FiniteDistribution& dist, const DualWeights& c) {
    dist.validate();
    c.validate();
    double acc = 0.0;
    for (int x = 0; x < dist.n(); ++x) {
        double score = 0.0;  // marginal(x) * sum_j (c_0j u_0j - c_1j u_1j)
        for (int j = 1; j <= dist.p; ++j) {
            score += c.at({0, j}) * dist.mass(x, 0, j) / dist.subpop_prob({0, j});
            score -= c.at({1, j}) * dist.mass(x, 1, j) / dist.subpop_prob({1, j});
        }
        acc += std::min(0.0, score);
    }
    for (int j = 1; j <= dist.p; ++j) acc += c.at({1, j});
    return acc;
}

namespace {

void grid_recurse(const FiniteDistribution& dist, const std::vector<SubPopId>& ids,
                  std::vector<int>& counts, std::size_t pos, int remaining,
                  int resolution, DualGridResult& best, bool& have_best) {
    if (pos + 1 == counts.size()) {
        counts[pos] = remaining;
        DualWeights c;
        for (std::size_t k = 0; k < ids.size(); ++k)
            c.c[ids[k]] = static_cast<double>(counts[k]) / resolution;
        double v = dual_value(dist, c);
        if (!have_best || v > best.value) {
            best.value = v;
            best.c_star = c;
            have_best = true;
        }
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        counts[pos] = k;
        grid_recurse(dist, ids, counts, pos + 1, remaining - k, resolution, best,
                     have_best);
    }
}

}  // namespace

DualGridResult dual_grid_maximize(const FiniteDistribution& dist, int resolution) {
    dist.validate();
    if (resolution < 1) throw std::invalid_argument("resolution must be positive");
    if (2 * dist.p > 4)
        throw std::invalid_argument("dual_grid_maximize: grid limited to 2p <= 4");
    auto ids = all_subpops(dist.p);
    std::vector<int> counts(ids.size(), 0);
    DualGridResult best;
    bool have_best = false;
    grid_recurse(dist, ids, counts, 0, resolution, resolution, best, have_best);
    return best;
}

ThresholdP1 rawls_threshold_p1(const FiniteDistribution& dist, const DualWeights& c) {
    dist.validate();
    if (dist.p != 1) throw std::invalid_argument("rawls_threshold_p1 requires p = 1");
    c.validate();
    const double c0 = c.at({0, 1});
    const double c1 = c.at({1, 1});
    if (c0 == 0.0 && c1 == 0.0)
        throw std::invalid_argument("rawls_threshold_p1: c is identically zero");
    const double p01 = dist.subpop_prob({0, 1});
    const double p11 = dist.subpop_prob({1, 1});
    ThresholdP1 out;
    out.t = (c0 / p01) / (c1 / p11 + c0 / p01);
    const auto table = unveil(dist);
    for (int x = 0; x < dist.n(); ++x) {
        double eta1 = table.eta(x, {1, 1});  // P(Y=1 | X=x)
        int fx = eta1 >= out.t ? 1 : 0;
        double sign = c1 * table.u(x, {1, 1}) - c0 * table.u(x, {0, 1});
        int gx = sign >= 0.0 ? 1 : 0;
        if (fx != gx) {
            // Only a genuine floating-point tie may make the two forms differ.
            if (std::abs(sign) > 1e-12)
                throw std::logic_error("rawls_threshold_p1: threshold and sign forms "
                                       "disagree at point '" + dist.points[x] + "'");
            fx = gx;
        }
        out.f.assignment[dist.points[x]] = fx;
    }
    return out;
}

}  // namespace rawls::oracle
