#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rawls/eval.hpp"
#include "rawls/oracle.hpp"
#include "rawls/rng.hpp"
#include "test_util.hpp"

using namespace rawls;
using namespace rawls::eval;
using rawls::stats::LabeledDataset;

namespace {

LabeledDataset four_rows() {
    // (x, y-label, group); threshold w=(1,0), b=1 misclassifies the last two.
    LabeledDataset d;
    d.p = 2;
    d.d = 2;
    d.rows.push_back({Eigen::Vector2d(0, 0), 0, 1});
    d.rows.push_back({Eigen::Vector2d(2, 1), 1, 1});
    d.rows.push_back({Eigen::Vector2d(0, 1), 1, 2});
    d.rows.push_back({Eigen::Vector2d(2, 0), 0, 2});
    return d;
}

LinearThresholdModel line_model() {
    LinearThresholdModel m;
    m.w = Eigen::Vector2d(1, 0);
    m.b = 1.0;
    return m;
}

}  // namespace

TEST_CASE("evaluate: four-row reference") {
    auto rep = evaluate(four_rows(), line_model());
    CHECK(rep.per_subpop_error.at({0, 1}) == doctest::Approx(0.0));
    CHECK(rep.per_subpop_error.at({1, 1}) == doctest::Approx(0.0));
    CHECK(rep.per_subpop_error.at({1, 2}) == doctest::Approx(1.0));
    CHECK(rep.per_subpop_error.at({0, 2}) == doctest::Approx(1.0));
    CHECK(rep.max_error == doctest::Approx(1.0));
    CHECK(rep.argmax_set == std::set<SubPopId>{{0, 2}, {1, 2}});
    CHECK(rep.accuracy == doctest::Approx(0.5));
    CHECK(rep.fpr_range.first == doctest::Approx(0.0));
    CHECK(rep.fpr_range.second == doctest::Approx(1.0));
    CHECK(rep.fnr_range.second == doctest::Approx(1.0));
    CHECK(rep.empty_subpops.empty());
}

TEST_CASE("evaluate: perfect separation and constant model") {
    auto data = four_rows();
    data.p = 1;
    for (auto& r : data.rows) r.z = 1;
    // Separate on the second coordinate instead.
    LinearThresholdModel sep;
    sep.w = Eigen::Vector2d(0, 1);
    sep.b = 0.5;
    auto rep = evaluate(data, sep);
    CHECK(rep.max_error == doctest::Approx(0.0));
    CHECK(rep.accuracy == doctest::Approx(1.0));

    LinearThresholdModel ones;
    ones.w = Eigen::Vector2d(0, 0);
    ones.b = 0.0;  // 0 >= 0: predicts 1 everywhere
    auto r1 = evaluate(data, ones);
    CHECK(r1.per_subpop_error.at({0, 1}) == doctest::Approx(1.0));
    CHECK(r1.per_subpop_error.at({1, 1}) == doctest::Approx(0.0));
}

TEST_CASE("evaluate: score threshold model") {
    LabeledDataset d;
    d.p = 1;
    d.d = 1;
    for (double v : {-1.0, -0.5, 0.5, 1.0}) {
        d.rows.push_back({Eigen::VectorXd::Constant(1, v), v >= 0 ? 1 : 0, 1});
    }
    auto rep = evaluate(d, ScoreThresholdModel{0.0, {}});
    CHECK(rep.max_error == doctest::Approx(0.0));
    CHECK_THROWS_AS(evaluate(four_rows(), ScoreThresholdModel{0.0, {}}),
                    std::invalid_argument);
}

TEST_CASE("evaluate: declared-but-absent sub-populations are excluded") {
    auto data = four_rows();
    data.p = 3;  // group 3 has no rows
    auto rep = evaluate(data, line_model());
    CHECK(rep.empty_subpops == std::vector<SubPopId>{{0, 3}, {1, 3}});
    CHECK(rep.per_subpop_error.size() == 4);
    CHECK(rep.max_error == doctest::Approx(1.0));

    LabeledDataset empty;
    empty.p = 1;
    CHECK_THROWS_AS(evaluate(empty, line_model()), std::invalid_argument);
}

TEST_CASE("evaluate agrees with the exact error rates on a finite design") {
    // Treat a dataset with duplicated rows as a finite distribution.
    Rng rng(17);
    auto inst = testutil::balanced_corner_instance(rng);
    // Map point index -> scalar score so a threshold model realizes inst.f:
    // prefix points (f = 1) get positive scores, the rest negative.
    LabeledDataset data;
    data.p = 1;
    data.d = 1;
    const int scale = 100000;
    oracle::FiniteDistribution& dist = inst.dist;
    for (int x = 0; x < dist.n(); ++x) {
        double score = inst.f.assignment.at(dist.points[x]) ? 1.0 : -1.0;
        for (int y = 0; y <= 1; ++y) {
            auto n = static_cast<std::int64_t>(std::llround(dist.mass(x, y, 1) * scale));
            for (std::int64_t k = 0; k < n; ++k)
                data.rows.push_back({Eigen::VectorXd::Constant(1, score), y, 1});
        }
    }
    auto rep = evaluate(data, ScoreThresholdModel{0.0, {}});
    auto exact = oracle::error_rates(dist, inst.f);
    // Rounding each mass to 1e-5 granularity perturbs rates by O(n/scale).
    for (const auto& [id, r] : exact)
        CHECK(std::abs(rep.per_subpop_error.at(id) - r) <= 1e-3);
}

TEST_CASE("boundary_grid") {
    LinearThresholdModel m = line_model();
    auto g = boundary_grid(m, 0, 0, 2, 2, 3);
    REQUIRE(g.size() == 9);
    // Row-major, x fastest; x = 1 column sits exactly on the boundary -> 1.
    CHECK(g[0].x == doctest::Approx(0.0));
    CHECK(g[0].y == doctest::Approx(0.0));
    CHECK(g[0].label == 0);
    CHECK(g[1].x == doctest::Approx(1.0));
    CHECK(g[1].label == 1);
    CHECK(g[2].label == 1);
    CHECK(g[3].y == doctest::Approx(1.0));
    CHECK(g[8].x == doctest::Approx(2.0));
    CHECK(g[8].y == doctest::Approx(2.0));

    LinearThresholdModel none;
    none.w = Eigen::Vector2d(0, 1);
    none.b = 10.0;
    for (const auto& pt : boundary_grid(none, 0, 0, 1, 1, 4)) CHECK(pt.label == 0);

    CHECK(boundary_grid(m, -1, -1, 1, 1, 50).size() == 2500);
    CHECK_THROWS_AS(boundary_grid(m, 0, 0, 0, 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(boundary_grid(m, 0, 0, 1, 1, 0), std::invalid_argument);
    LinearThresholdModel bad;
    bad.w = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(boundary_grid(bad, 0, 0, 1, 1, 3), std::invalid_argument);
}

TEST_CASE("accuracy identity") {
    Rng rng(23);
    LabeledDataset d;
    d.p = 2;
    d.d = 2;
    for (int k = 0; k < 400; ++k) {
        Eigen::Vector2d x(rng.next_normal(), rng.next_normal());
        d.rows.push_back({x, static_cast<int>(rng.next_u64() % 2),
                          1 + static_cast<int>(rng.next_u64() % 2)});
    }
    auto rep = evaluate(d, line_model());
    auto counts = stats::subpop_counts(d);
    double wrong = 0.0;
    for (const auto& [id, r] : rep.per_subpop_error)
        wrong += r * static_cast<double>(counts.at(id));
    CHECK(rep.accuracy == doctest::Approx(1.0 - wrong / d.rows.size()).epsilon(1e-12));
}
