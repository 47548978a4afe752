#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rawls/types.hpp"

namespace rawls {

// Per-sub-population second-order statistics of a score (d=1) or embedding.
struct MomentEntry {
    std::int64_t count = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // symmetric PSD, d x d
};

struct MomentTable {
    int p = 1;  // group count
    int d = 1;  // feature dimension
    std::map<SubPopId, MomentEntry> entries;

    const MomentEntry& at(const SubPopId& id) const { return entries.at(id); }
};

struct MomentViolation {
    SubPopId id;
    std::string message;
};

// Returns every invariant violation; empty list means the table is valid.
// Checks: one entry per SubPopId, dimensions, covariance symmetry
// (tolerance 1e-9 * max |entry|) and eigenvalues >= -1e-9 * trace / d.
std::vector<MomentViolation> validate_moment_table(const MomentTable& table);

// Throws std::invalid_argument listing all violations if the table is invalid.
void require_valid(const MomentTable& table);

}  // namespace rawls
