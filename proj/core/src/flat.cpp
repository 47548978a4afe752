#include "rawls/flat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rawls/normal.hpp"

namespace rawls::flat {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols())
        throw std::invalid_argument("psd_sqrt: matrix must be square");
    double max_abs = std::max(sigma.cwiseAbs().maxCoeff(), 1e-300);
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9 * max_abs)
        throw std::invalid_argument("psd_sqrt: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sigma + sigma.transpose()));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

namespace {

struct GroupData {
    Eigen::VectorXd dmu;                 // mu_1j - mu_0j
    Eigen::MatrixXd cov0, cov1;          // Sigma_0j, Sigma_1j
    Eigen::MatrixXd sqrt0, sqrt1;        // PSD square roots
};

std::vector<GroupData> group_data(const MomentTable& moments) {
    require_valid(moments);
    std::vector<GroupData> g(moments.p);
    for (int j = 1; j <= moments.p; ++j) {
        const auto& e0 = moments.at({0, j});
        const auto& e1 = moments.at({1, j});
        g[j - 1].dmu = e1.mean - e0.mean;
        g[j - 1].cov0 = e0.cov;
        g[j - 1].cov1 = e1.cov;
        g[j - 1].sqrt0 = psd_sqrt(e0.cov);
        g[j - 1].sqrt1 = psd_sqrt(e1.cov);
    }
    return g;
}

double group_kappa(const GroupData& g, const Eigen::VectorXd& w) {
    double num = w.dot(g.dmu);
    double den = (g.sqrt1 * w).norm() + (g.sqrt0 * w).norm();
    if (den == 0.0) {
        if (num > 0.0) return kInf;
        if (num < 0.0) return -kInf;
        return 0.0;
    }
    return num / den;
}

}  // namespace

std::map<int, double> kappa_profile(const Eigen::VectorXd& w, const MomentTable& moments) {
    if (w.size() == 0 || w.norm() == 0.0)
        throw std::invalid_argument("kappa_profile: w must be nonzero");
    auto groups = group_data(moments);
    std::map<int, double> out;
    for (int j = 1; j <= moments.p; ++j) out[j] = group_kappa(groups[j - 1], w);
    return out;
}

FlatResult flat_finalize(const Eigen::VectorXd& w, const MomentTable& moments) {
    if (w.size() == 0 || w.norm() == 0.0)
        throw std::invalid_argument("flat_finalize: w must be nonzero");
    auto groups = group_data(moments);

    FlatResult res;
    res.w_star = w;
    double kmin = kInf;
    for (int j = 1; j <= moments.p; ++j) {
        res.kappa[j] = group_kappa(groups[j - 1], w);
        kmin = std::min(kmin, res.kappa[j]);
    }
    // Smallest group index among the argmin set; active constraints produce
    // kappas equal up to rounding, so ties use a relative tolerance.
    double tie_tol = 1e-12 * std::max(1.0, std::isinf(kmin) ? 1.0 : std::abs(kmin));
    res.j_star = 1;
    for (int j = 1; j <= moments.p; ++j) {
        if (res.kappa[j] <= kmin + tie_tol) {
            res.j_star = j;
            break;
        }
    }
    kmin = res.kappa[res.j_star];
    const auto& gs = groups[res.j_star - 1];
    const auto& e0 = moments.at({0, res.j_star});
    const auto& e1 = moments.at({1, res.j_star});

    if (std::isinf(kmin)) {
        // Noiseless along w: zero error, threshold at the midpoint.
        res.r_star = 0.0;
        res.b_star = 0.5 * (w.dot(e0.mean) + w.dot(e1.mean));
        return res;
    }
    res.r_star = 1.0 - normal_cdf(kmin);
    // Phi^{-1}(1 - r_star) equals kmin; both threshold expressions must agree.
    double q = kmin;
    double b0 = w.dot(e0.mean) + q * (gs.sqrt0 * w).norm();
    double b1 = w.dot(e1.mean) - q * (gs.sqrt1 * w).norm();
    double scale = std::max({1.0, std::abs(b0), std::abs(b1)});
    if (std::abs(b0 - b1) > 1e-8 * scale)
        throw std::logic_error("flat_finalize: threshold expressions disagree");
    res.b_star = b0;
    return res;
}

std::map<SubPopId, double> gaussian_linear_error(const Eigen::VectorXd& w, double b,
                                                 const MomentTable& moments) {
    if (w.size() == 0 || w.norm() == 0.0)
        throw std::invalid_argument("gaussian_linear_error: w must be nonzero");
    auto groups = group_data(moments);
    std::map<SubPopId, double> out;
    for (int j = 1; j <= moments.p; ++j) {
        const auto& g = groups[j - 1];
        double m0 = w.dot(moments.at({0, j}).mean);
        double m1 = w.dot(moments.at({1, j}).mean);
        double s0 = (g.sqrt0 * w).norm();
        double s1 = (g.sqrt1 * w).norm();
        // error on S_0j: P(w.x >= b) = 1 - Phi((b - w.mu_0j)/s0)
        if (s0 > 0.0) {
            out[{0, j}] = 1.0 - normal_cdf((b - m0) / s0);
        } else if (b == m0) {
            throw DegeneratePointMassError("S(0," + std::to_string(j) +
                                           "): point mass exactly at the threshold");
        } else {
            out[{0, j}] = (m0 > b) ? 1.0 : 0.0;
        }
        // error on S_1j: P(w.x < b) = Phi((b - w.mu_1j)/s1)
        if (s1 > 0.0) {
            out[{1, j}] = normal_cdf((b - m1) / s1);
        } else if (b == m1) {
            throw DegeneratePointMassError("S(1," + std::to_string(j) +
                                           "): point mass exactly at the threshold");
        } else {
            out[{1, j}] = (m1 < b) ? 1.0 : 0.0;
        }
    }
    return out;
}

// --- spherical path: exact min-norm point via active-set enumeration ------

namespace {

FlatResult finalize_with_spherical(const Eigen::VectorXd& w, const MomentTable& moments,
                                   const std::map<SubPopId, double>& sigma) {
    MomentTable spherical;
    spherical.p = moments.p;
    spherical.d = moments.d;
    for (const auto& id : all_subpops(moments.p)) {
        MomentEntry e;
        e.count = moments.at(id).count;
        e.mean = moments.at(id).mean;
        double s = sigma.at(id);
        e.cov = s * s * Eigen::MatrixXd::Identity(moments.d, moments.d);
        spherical.entries[id] = e;
    }
    return flat_finalize(w, spherical);
}

}  // namespace

FlatResult solve_flat_spherical(const MomentTable& moments,
                                const std::map<SubPopId, double>& sigma) {
    require_valid(moments);
    const int p = moments.p;
    const int d = moments.d;
    if (p > 20)
        throw std::invalid_argument("solve_flat_spherical: active-set enumeration "
                                    "limited to p <= 20");
    for (const auto& id : all_subpops(p)) {
        if (!sigma.count(id))
            throw std::invalid_argument("solve_flat_spherical: missing sigma for " +
                                        to_string(id));
        if (sigma.at(id) < 0.0)
            throw std::invalid_argument("solve_flat_spherical: negative sigma");
    }

    // Constraints: w . a_j >= beta_j with a_j = mu_1j - mu_0j,
    // beta_j = sigma_1j + sigma_0j.
    Eigen::MatrixXd A(p, d);
    Eigen::VectorXd beta(p);
    bool all_zero_beta = true;
    for (int j = 1; j <= p; ++j) {
        Eigen::VectorXd dmu = moments.at({1, j}).mean - moments.at({0, j}).mean;
        double bj = sigma.at({1, j}) + sigma.at({0, j});
        if (dmu.norm() == 0.0) {
            if (bj > 0.0)
                throw NonSeparableError(j, "group " + std::to_string(j) +
                                               ": equal class means with positive noise");
            throw NonSeparableError(j, "group " + std::to_string(j) +
                                           ": equal class means");
        }
        A.row(j - 1) = dmu.transpose();
        beta(j - 1) = bj;
        if (bj > 0.0) all_zero_beta = false;
    }
    // Degenerate noiseless case: any strictly separating direction works;
    // take the max-margin one (min-norm with unit offsets).
    if (all_zero_beta) beta.setOnes();

    const Eigen::MatrixXd gram = A * A.transpose();
    const double feas_tol = 1e-9 * std::max(1.0, beta.cwiseAbs().maxCoeff());

    Eigen::VectorXd best_w;
    double best_norm2 = kInf;
    int examined = 0;
    for (unsigned subset = 1; subset < (1u << p); ++subset) {
        ++examined;
        std::vector<int> idx;
        for (int j = 0; j < p; ++j)
            if ((subset >> j) & 1u) idx.push_back(j);
        const int m = static_cast<int>(idx.size());
        Eigen::MatrixXd G(m, m);
        Eigen::VectorXd bs(m);
        for (int r = 0; r < m; ++r) {
            bs(r) = beta(idx[r]);
            for (int cidx = 0; cidx < m; ++cidx) G(r, cidx) = gram(idx[r], idx[cidx]);
        }
        Eigen::VectorXd lambda = G.completeOrthogonalDecomposition().solve(bs);
        if ((G * lambda - bs).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, bs.cwiseAbs().maxCoeff()))
            continue;  // equality system inconsistent for this active set
        if (lambda.minCoeff() < -1e-12) continue;
        Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
        for (int r = 0; r < m; ++r) w += lambda(r) * A.row(idx[r]).transpose();
        if (((A * w) - beta).minCoeff() < -feas_tol) continue;
        double n2 = w.squaredNorm();
        if (n2 < best_norm2) {
            best_norm2 = n2;
            best_w = w;
        }
    }
    if (!best_w.size())
        throw NonSeparableError(0, "solve_flat_spherical: constraint polyhedron is empty");

    FlatResult res = finalize_with_spherical(best_w, moments, sigma);
    res.solver_diagnostics.mode = "spherical-minnorm";
    res.solver_diagnostics.iterations = examined;
    res.solver_diagnostics.final_gap = 0.0;
    return res;
}

FlatResult solve_flat_spherical(const MomentTable& moments) {
    require_valid(moments);
    std::map<SubPopId, double> sigma;
    for (const auto& id : all_subpops(moments.p))
        sigma[id] = std::sqrt(std::max(0.0, moments.at(id).cov.trace() / moments.d));
    return solve_flat_spherical(moments, sigma);
}

// --- general path: bisection on kappa + supergradient feasibility ---------

namespace {

struct FeasibilityResult {
    double delta = -kInf;
    Eigen::VectorXd w;
    double kappa = -kInf;   // best min-ratio seen along the iterate path
    Eigen::VectorXd w_kappa;
};

double min_ratio(const std::vector<GroupData>& groups, const Eigen::VectorXd& w) {
    double best = kInf;
    for (const auto& g : groups) best = std::min(best, group_kappa(g, w));
    return best;
}

double min_slack(const std::vector<GroupData>& groups, const Eigen::VectorXd& w,
                 double kappa, int* argmin = nullptr) {
    double best = kInf;
    for (std::size_t k = 0; k < groups.size(); ++k) {
        const auto& g = groups[k];
        double s = w.dot(g.dmu) - kappa * ((g.sqrt1 * w).norm() + (g.sqrt0 * w).norm());
        if (s < best) {
            best = s;
            if (argmin) *argmin = static_cast<int>(k);
        }
    }
    return best;
}

// Maximize min_j [w.dmu_j - kappa (|S1j w| + |S0j w|)] over |w| <= 1.
FeasibilityResult max_min_slack(const std::vector<GroupData>& groups, double kappa,
                                const Eigen::VectorXd& w_start, int iters) {
    double lip = 1e-12;
    for (const auto& g : groups) {
        double s1 = std::sqrt(std::max(0.0, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                                g.cov1, Eigen::EigenvaluesOnly)
                                                .eigenvalues()
                                                .maxCoeff()));
        double s0 = std::sqrt(std::max(0.0, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                                g.cov0, Eigen::EigenvaluesOnly)
                                                .eigenvalues()
                                                .maxCoeff()));
        lip = std::max(lip, g.dmu.norm() + kappa * (s1 + s0));
    }
    const double step0 = 1.0 / lip;

    Eigen::VectorXd w = w_start;
    if (w.norm() > 1.0) w /= w.norm();
    FeasibilityResult best;
    best.w = w;
    best.delta = min_slack(groups, w, kappa);
    best.kappa = min_ratio(groups, w);
    best.w_kappa = w;
    for (int it = 1; it <= iters; ++it) {
        int jmin = 0;
        min_slack(groups, w, kappa, &jmin);
        const auto& g = groups[jmin];
        Eigen::VectorXd grad = g.dmu;
        double n1 = (g.sqrt1 * w).norm();
        double n0 = (g.sqrt0 * w).norm();
        if (n1 > 1e-15) grad -= kappa / n1 * (g.cov1 * w);
        if (n0 > 1e-15) grad -= kappa / n0 * (g.cov0 * w);
        w += (step0 / std::sqrt(static_cast<double>(it))) * grad;
        double n = w.norm();
        if (n > 1.0) w /= n;
        double delta = min_slack(groups, w, kappa);
        if (delta > best.delta) {
            best.delta = delta;
            best.w = w;
        }
        // The iterates pass close to the margin maximizer even when this
        // probe level is infeasible; keep the best ratio seen anywhere.
        double ratio = min_ratio(groups, w);
        if (ratio > best.kappa) {
            best.kappa = ratio;
            best.w_kappa = w;
        }
    }
    return best;
}

// d=2 local polish: golden-section on the direction angle inside a small
// bracket around the incumbent. min_j kappa_j is quasiconcave on the arc
// where it is positive, so a local bracket search is sound there.
Eigen::VectorXd polish_angle_2d(const std::vector<GroupData>& groups,
                                const Eigen::VectorXd& w_in, double half_width) {
    double theta = std::atan2(w_in(1), w_in(0));
    double lo = theta - half_width, hi = theta + half_width;
    auto value = [&](double t) {
        Eigen::VectorXd w(2);
        w << std::cos(t), std::sin(t);
        return min_ratio(groups, w);
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = value(a), fb = value(b);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + gr * (hi - lo);
            fb = value(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - gr * (hi - lo);
            fa = value(a);
        }
    }
    double t = 0.5 * (lo + hi);
    Eigen::VectorXd w(2);
    w << std::cos(t), std::sin(t);
    return min_ratio(groups, w) > min_ratio(groups, w_in) ? w : w_in;
}

}  // namespace

FlatResult solve_flat_general(const MomentTable& moments, double tol_kappa,
                              int max_bisection, int feasibility_iters) {
    if (tol_kappa <= 0.0) throw std::invalid_argument("tol_kappa must be positive");
    auto groups = group_data(moments);
    for (std::size_t k = 0; k < groups.size(); ++k)
        if (groups[k].dmu.norm() == 0.0)
            throw NonSeparableError(static_cast<int>(k + 1),
                                    "group " + std::to_string(k + 1) +
                                        ": equal class means");

    // Start from the normalized sum of mean-difference directions.
    Eigen::VectorXd w0 = Eigen::VectorXd::Zero(moments.d);
    for (const auto& g : groups) w0 += g.dmu / g.dmu.norm();
    if (w0.norm() < 1e-12) w0 = groups[0].dmu;
    w0 /= w0.norm();

    const double feas_eps = 1e-10;
    Eigen::VectorXd w_best = w0;
    double kappa_lo = 0.0;
    bool have_feasible = false;

    auto probe = [&](double kappa) -> bool {
        auto fr = max_min_slack(groups, kappa, w_best, feasibility_iters);
        // Any iterate with a better ratio objective raises the certified
        // lower bound, whether or not this probe level turned out feasible.
        if (fr.kappa > kappa_lo && fr.kappa > 0.0) {
            kappa_lo = fr.kappa;
            w_best = fr.w_kappa;
            have_feasible = true;
        }
        if (fr.delta > feas_eps) {
            double achieved = min_ratio(groups, fr.w);
            have_feasible = true;
            if (achieved > kappa_lo) {
                kappa_lo = achieved;
                w_best = fr.w;
            }
            return true;
        }
        return false;
    };

    if (!probe(0.0))
        throw NonSeparableError(0, "solve_flat_general: no direction separates all groups");

    int iterations = 0;
    double kappa_hi = 1.0;
    while (probe(kappa_hi)) {
        kappa_hi *= 2.0;
        if (kappa_hi > 1e6) break;
        if (++iterations > max_bisection)
            throw SolverBudgetError("solve_flat_general: bracket doubling exceeded budget");
    }
    if (kappa_hi > 1e6) {
        // Numerically separable beyond any meaningful error rate.
        FlatResult res = flat_finalize(w_best, moments);
        res.solver_diagnostics = {iterations, 0.0, "general-bisection"};
        return res;
    }

    while (kappa_hi - kappa_lo > tol_kappa) {
        if (++iterations > max_bisection)
            throw SolverBudgetError("solve_flat_general: bisection exceeded budget");
        double mid = 0.5 * (kappa_lo + kappa_hi);
        if (!probe(mid)) kappa_hi = std::min(kappa_hi, mid);
        // probe() advances kappa_lo past mid on success.
        if (kappa_lo >= kappa_hi) kappa_hi = kappa_lo;
    }
    if (!have_feasible || kappa_lo <= tol_kappa)
        throw NonSeparableError(0, "solve_flat_general: optimal margin is not "
                                   "positive at the requested tolerance");

    if (moments.d == 2)
        w_best = polish_angle_2d(groups, w_best / w_best.norm(),
                                 std::max(1e-3, 4.0 * tol_kappa));
    FlatResult res = flat_finalize(w_best, moments);
    res.solver_diagnostics = {iterations, kappa_hi - kappa_lo, "general-bisection"};
    return res;
}

GridOracle2dResult grid_oracle_2d(const MomentTable& moments, int directions) {
    if (moments.d != 2) throw std::invalid_argument("grid_oracle_2d requires d = 2");
    if (directions < 4) throw std::invalid_argument("grid_oracle_2d: too few directions");
    auto groups = group_data(moments);

    GridOracle2dResult best;
    best.kappa = -kInf;
    double prev = 0.0, max_jump = 0.0;
    Eigen::VectorXd w(2);
    for (int k = 0; k < directions; ++k) {
        double theta = 2.0 * M_PI * k / directions;
        w << std::cos(theta), std::sin(theta);
        double kmin = kInf;
        for (const auto& g : groups) kmin = std::min(kmin, group_kappa(g, w));
        if (k > 0) max_jump = std::max(max_jump, std::abs(kmin - prev));
        prev = kmin;
        if (kmin > best.kappa) {
            best.kappa = kmin;
            best.w = w;
        }
    }
    best.resolution_bound = max_jump;
    return best;
}

}  // namespace rawls::flat
