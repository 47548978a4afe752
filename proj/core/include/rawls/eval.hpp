#pragma once

#include <variant>
#include <vector>

#include "rawls/stats.hpp"
#include "rawls/types.hpp"

namespace rawls::eval {

using AnyModel = std::variant<ScoreThresholdModel, LinearThresholdModel>;

// Empirical per-sub-population error rates, max error, FPR/FNR ranges and
// accuracy. Counts stay integral until the final division. Sub-populations
// declared by data.p but absent from the rows are reported in
// empty_subpops and excluded from the max.
EvaluationReport evaluate(const stats::LabeledDataset& data, const AnyModel& model);

struct GridPoint {
    double x = 0.0;
    double y = 0.0;
    int label = 0;
};

// resolution x resolution prediction lattice over the bounding box,
// row-major (y rows, x fastest). d must be 2.
std::vector<GridPoint> boundary_grid(const LinearThresholdModel& model, double xmin,
                                     double ymin, double xmax, double ymax,
                                     int resolution);

}  // namespace rawls::eval
