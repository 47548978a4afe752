#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "rawls/moments.hpp"
#include "rawls/types.hpp"

namespace rawls::stats {

struct LabeledRow {
    Eigen::VectorXd features;  // length d (d=1 for a scalar score)
    int y = 0;                 // label in {0,1}
    int z = 1;                 // group in 1..p
};

struct LabeledDataset {
    int p = 1;
    int d = 1;
    std::vector<LabeledRow> rows;
};

enum class MomentMode { full, spherical, score };

// Sample means and maximum-likelihood covariances per sub-population,
// regularized by (1e-9 * trace/d) * I. Spherical mode replaces the
// covariance by (trace/d) * I; score mode requires d = 1.
// Sums use a fixed pairwise-reduction order, so the result is independent
// of row order to within 1e-12.
MomentTable estimate_moments(const LabeledDataset& data, MomentMode mode);

std::map<SubPopId, std::int64_t> subpop_counts(const LabeledDataset& data);

}  // namespace rawls::stats
