#include "rawls/moments.hpp"

#include <cmath>

namespace rawls {

std::vector<MomentViolation> validate_moment_table(const MomentTable& table) {
    std::vector<MomentViolation> out;
    if (table.p < 1) {
        out.push_back({{0, 0}, "group count p must be >= 1"});
        return out;
    }
    if (table.d < 1) {
        out.push_back({{0, 0}, "dimension d must be >= 1"});
        return out;
    }
    for (const auto& id : all_subpops(table.p)) {
        auto it = table.entries.find(id);
        if (it == table.entries.end()) {
            out.push_back({id, "missing entry for sub-population " + to_string(id)});
            continue;
        }
        const MomentEntry& e = it->second;
        if (e.count < 0) out.push_back({id, "negative count"});
        if (e.mean.size() != table.d) {
            out.push_back({id, "mean dimension " + std::to_string(e.mean.size()) +
                                   " != d=" + std::to_string(table.d)});
            continue;
        }
        if (e.cov.rows() != table.d || e.cov.cols() != table.d) {
            out.push_back({id, "covariance shape mismatch"});
            continue;
        }
        double max_abs = e.cov.cwiseAbs().maxCoeff();
        double asym = (e.cov - e.cov.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-9 * std::max(max_abs, 1e-300)) {
            out.push_back({id, "asymmetric covariance (max deviation " +
                                   std::to_string(asym) + ")"});
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            0.5 * (e.cov + e.cov.transpose()), Eigen::EigenvaluesOnly);
        double min_eig = es.eigenvalues().minCoeff();
        double tol = 1e-9 * e.cov.trace() / table.d;
        if (min_eig < -std::max(tol, 0.0) - 1e-15) {
            out.push_back({id, "covariance eigenvalue " + std::to_string(min_eig) +
                                   " below PSD tolerance"});
        }
    }
    // Extraneous entries (bad label or group out of range).
    for (const auto& [id, e] : table.entries) {
        (void)e;
        if (id.label < 0 || id.label > 1 || id.group < 1 || id.group > table.p)
            out.push_back({id, "sub-population id out of range for p=" +
                                   std::to_string(table.p)});
    }
    return out;
}

void require_valid(const MomentTable& table) {
    auto v = validate_moment_table(table);
    if (v.empty()) return;
    std::string msg = "invalid moment table:";
    for (const auto& viol : v) msg += " [" + to_string(viol.id) + "] " + viol.message + ";";
    throw std::invalid_argument(msg);
}

}  // namespace rawls
