#pragma once

#include <map>
#include <string>

#include <Eigen/Dense>

#include "rawls/moments.hpp"
#include "rawls/types.hpp"

namespace rawls::flat {

struct SolverDiagnostics {
    int iterations = 0;
    double final_gap = 0.0;
    std::string mode;
};

struct FlatResult {
    Eigen::VectorXd w_star;
    double b_star = 0.0;
    double r_star = 0.0;
    int j_star = 1;
    std::map<int, double> kappa;  // group -> margin ratio kappa_j
    SolverDiagnostics solver_diagnostics;
};

// Symmetric PSD square root via eigendecomposition; negative eigenvalues
// are clamped to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma);

// kappa_j = w.(mu_1j - mu_0j) / (|Sigma_1j^{1/2} w| + |Sigma_0j^{1/2} w|),
// with +/-inf (or 0) when the denominator vanishes.
std::map<int, double> kappa_profile(const Eigen::VectorXd& w, const MomentTable& moments);

// Spherical-covariance solver: min-norm point of the polyhedron
// {w : w.(mu_1j - mu_0j) >= sigma_1j + sigma_0j for all j}, solved exactly
// by active-set enumeration (p is small).
FlatResult solve_flat_spherical(const MomentTable& moments,
                                const std::map<SubPopId, double>& sigma);

// Convenience overload: spherical reduction sigma_ij = sqrt(trace(Sigma_ij)/d).
FlatResult solve_flat_spherical(const MomentTable& moments);

// Full-covariance solver: bisection on kappa with a projected supergradient
// feasibility subproblem over the unit ball.
FlatResult solve_flat_general(const MomentTable& moments, double tol_kappa = 1e-6,
                              int max_bisection = 200, int feasibility_iters = 20000);

// Threshold and certificate for a given direction w.
FlatResult flat_finalize(const Eigen::VectorXd& w, const MomentTable& moments);

// Gaussian-model error of (w, b) on each sub-population.
std::map<SubPopId, double> gaussian_linear_error(const Eigen::VectorXd& w, double b,
                                                 const MomentTable& moments);

struct GridOracle2dResult {
    Eigen::Vector2d w;
    double kappa = 0.0;
    double resolution_bound = 0.0;  // max adjacent-direction objective change
};

// d=2 angle sweep over [0, 2pi); independent oracle for the solvers.
GridOracle2dResult grid_oracle_2d(const MomentTable& moments, int directions);

}  // namespace rawls::flat
