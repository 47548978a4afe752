#include "rawls/eval.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace rawls::eval {

EvaluationReport evaluate(const stats::LabeledDataset& data, const AnyModel& model) {
    auto predict_row = [&](const stats::LabeledRow& row) -> int {
        if (std::holds_alternative<ScoreThresholdModel>(model)) {
            if (row.features.size() != 1)
                throw std::invalid_argument("threshold model needs a scalar score");
            return predict(std::get<ScoreThresholdModel>(model), row.features(0));
        }
        return predict(std::get<LinearThresholdModel>(model), row.features);
    };

    std::map<SubPopId, std::int64_t> count, wrong;
    for (const auto& id : all_subpops(data.p)) count[id] = wrong[id] = 0;
    std::int64_t total = 0, total_wrong = 0;
    for (const auto& row : data.rows) {
        if (row.y != 0 && row.y != 1)
            throw std::invalid_argument("label must be 0 or 1");
        if (row.z < 1 || row.z > data.p)
            throw std::invalid_argument("group out of range");
        SubPopId id{row.y, row.z};
        ++count[id];
        ++total;
        if (predict_row(row) != row.y) {
            ++wrong[id];
            ++total_wrong;
        }
    }
    if (total == 0) throw std::invalid_argument("evaluate: empty dataset");

    EvaluationReport rep;
    rep.max_error = 0.0;
    for (const auto& id : all_subpops(data.p)) {
        if (count[id] == 0) {
            rep.empty_subpops.push_back(id);
            continue;
        }
        double r = static_cast<double>(wrong[id]) / static_cast<double>(count[id]);
        rep.per_subpop_error[id] = r;
        rep.max_error = std::max(rep.max_error, r);
    }
    for (const auto& [id, r] : rep.per_subpop_error)
        if (r >= rep.max_error - 1e-12) rep.argmax_set.insert(id);

    auto range_over_label = [&](int label) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int j = 1; j <= data.p; ++j) {
            auto it = rep.per_subpop_error.find({label, j});
            if (it == rep.per_subpop_error.end()) continue;
            lo = std::min(lo, it->second);
            hi = std::max(hi, it->second);
        }
        if (lo > hi) lo = hi = 0.0;
        return std::pair<double, double>{lo, hi};
    };
    rep.fpr_range = range_over_label(0);  // FPR of group j = r_0j
    rep.fnr_range = range_over_label(1);  // FNR of group j = r_1j
    rep.accuracy = 1.0 - static_cast<double>(total_wrong) / static_cast<double>(total);
    return rep;
}

std::vector<GridPoint> boundary_grid(const LinearThresholdModel& model, double xmin,
                                     double ymin, double xmax, double ymax,
                                     int resolution) {
    if (model.w.size() != 2) throw std::invalid_argument("boundary_grid requires d = 2");
    if (!(xmin < xmax && ymin < ymax))
        throw std::invalid_argument("boundary_grid: degenerate bounding box");
    if (resolution < 1) throw std::invalid_argument("resolution must be positive");

    auto coord = [resolution](double lo, double hi, int k) {
        return resolution == 1 ? lo : lo + (hi - lo) * k / (resolution - 1);
    };
    std::vector<GridPoint> grid;
    grid.reserve(static_cast<std::size_t>(resolution) * resolution);
    Eigen::VectorXd pt(2);
    for (int r = 0; r < resolution; ++r) {
        for (int c = 0; c < resolution; ++c) {
            pt << coord(xmin, xmax, c), coord(ymin, ymax, r);
            grid.push_back({pt(0), pt(1), predict(model, pt)});
        }
    }
    return grid;
}

}  // namespace rawls::eval
