#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rawls {

// Sensitive sub-population: (class label, protected group).
// Labels are 0/1, groups are 1..p.
struct SubPopId {
    int label = 0;
    int group = 1;

    auto operator<=>(const SubPopId&) const = default;
};

inline std::string to_string(const SubPopId& id) {
    return "(" + std::to_string(id.label) + "," + std::to_string(id.group) + ")";
}

// All 2p sub-population ids for a given group count, ordered
// (0,1), (0,2), ..., (0,p), (1,1), ..., (1,p).
inline std::vector<SubPopId> all_subpops(int p) {
    std::vector<SubPopId> ids;
    ids.reserve(2 * static_cast<std::size_t>(p));
    for (int i = 0; i <= 1; ++i)
        for (int j = 1; j <= p; ++j) ids.push_back({i, j});
    return ids;
}

// Certified worst-case guarantee attached to an adapted model.
struct Guarantee {
    double r_star = 0.0;  // worst-case max sub-population error
    int j_star = 1;       // group attaining it
};

// Threshold classifier on a scalar score: predicts 1 iff score >= b.
struct ScoreThresholdModel {
    double b = 0.0;
    std::optional<Guarantee> guarantee;
};

// Linear threshold classifier: predicts 1 iff w.x >= b.
struct LinearThresholdModel {
    Eigen::VectorXd w;
    double b = 0.0;
    std::optional<Guarantee> guarantee;
};

inline int predict(const ScoreThresholdModel& m, double score) {
    return score >= m.b ? 1 : 0;
}

inline int predict(const LinearThresholdModel& m, const Eigen::VectorXd& x) {
    if (m.w.size() == 0) throw std::invalid_argument("linear model has empty w");
    if (x.size() != m.w.size())
        throw std::invalid_argument("predict: dimension mismatch (" +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(m.w.size()) + ")");
    return m.w.dot(x) >= m.b ? 1 : 0;
}

struct EvaluationReport {
    std::map<SubPopId, double> per_subpop_error;  // r_ij
    double max_error = 0.0;
    std::set<SubPopId> argmax_set;  // entries within 1e-12 of max_error
    std::pair<double, double> fpr_range{0.0, 0.0};
    std::pair<double, double> fnr_range{0.0, 0.0};
    double accuracy = 0.0;
    std::vector<SubPopId> empty_subpops;  // declared but absent from data
};

// A group made the instance infeasible for the requested adaptation.
class NonSeparableError : public std::runtime_error {
  public:
    NonSeparableError(int group, const std::string& what)
        : std::runtime_error(what), group_(group) {}
    int group() const { return group_; }

  private:
    int group_;
};

class SolverBudgetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DegeneratePointMassError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace rawls
