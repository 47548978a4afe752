#include "rawls/stats.hpp"

#include <algorithm>
#include <functional>
#include <string>

namespace rawls::stats {

namespace {

// Pairwise reduction over [lo, hi); term(k) produces the k-th summand.
Eigen::MatrixXd pairwise_sum(std::size_t lo, std::size_t hi,
                             const std::function<Eigen::MatrixXd(std::size_t)>& term) {
    if (hi - lo == 1) return term(lo);
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

}  // namespace

std::map<SubPopId, std::int64_t> subpop_counts(const LabeledDataset& data) {
    std::map<SubPopId, std::int64_t> counts;
    for (const auto& id : all_subpops(data.p)) counts[id] = 0;
    for (const auto& row : data.rows) {
        if (row.y != 0 && row.y != 1)
            throw std::invalid_argument("label must be 0 or 1");
        if (row.z < 1 || row.z > data.p)
            throw std::invalid_argument("group " + std::to_string(row.z) +
                                        " out of range 1.." + std::to_string(data.p));
        ++counts[{row.y, row.z}];
    }
    return counts;
}

MomentTable estimate_moments(const LabeledDataset& data, MomentMode mode) {
    if (mode == MomentMode::score && data.d != 1)
        throw std::invalid_argument("score mode requires 1 feature column");
    for (const auto& row : data.rows)
        if (row.features.size() != data.d)
            throw std::invalid_argument("row dimension mismatch");

    const std::int64_t min_count =
        mode == MomentMode::full ? data.d + 1 : 2;

    // Gather rows per sub-population in a canonical order: sort by the
    // feature vector so the pairwise sums are permutation-invariant exactly.
    std::map<SubPopId, std::vector<const LabeledRow*>> groups;
    for (const auto& id : all_subpops(data.p)) groups[id] = {};
    for (const auto& row : data.rows) {
        if (row.y != 0 && row.y != 1)
            throw std::invalid_argument("label must be 0 or 1");
        if (row.z < 1 || row.z > data.p)
            throw std::invalid_argument("group " + std::to_string(row.z) +
                                        " out of range");
        groups[{row.y, row.z}].push_back(&row);
    }

    MomentTable table;
    table.p = data.p;
    table.d = data.d;
    for (auto& [id, rows] : groups) {
        const std::int64_t n = static_cast<std::int64_t>(rows.size());
        if (n < min_count)
            throw std::invalid_argument("sub-population " + to_string(id) + " has " +
                                        std::to_string(n) + " rows, need >= " +
                                        std::to_string(min_count));
        std::sort(rows.begin(), rows.end(), [](const LabeledRow* a, const LabeledRow* b) {
            return std::lexicographical_compare(a->features.data(),
                                                a->features.data() + a->features.size(),
                                                b->features.data(),
                                                b->features.data() + b->features.size());
        });
        Eigen::VectorXd mean =
            pairwise_sum(0, rows.size(), [&](std::size_t k) -> Eigen::MatrixXd {
                return rows[k]->features;
            }) /
            static_cast<double>(n);
        Eigen::MatrixXd scatter =
            pairwise_sum(0, rows.size(), [&](std::size_t k) -> Eigen::MatrixXd {
                Eigen::VectorXd c = rows[k]->features - mean;
                return c * c.transpose();
            });
        Eigen::MatrixXd cov = scatter / static_cast<double>(n);  // MLE (divide by n)
        if (mode == MomentMode::spherical)
            cov = (cov.trace() / data.d) * Eigen::MatrixXd::Identity(data.d, data.d);
        cov += (1e-9 * cov.trace() / data.d) * Eigen::MatrixXd::Identity(data.d, data.d);

        MomentEntry e;
        e.count = n;
        e.mean = mean;
        e.cov = cov;
        table.entries[id] = e;
    }
    return table;
}

}  // namespace rawls::stats
