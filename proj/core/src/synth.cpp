#include "rawls/synth.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "rawls/rng.hpp"

namespace rawls::synth {

SynthSpec preset(const std::string& name) {
    SynthSpec spec;
    if (name == "synthetic1") {
        spec.clusters = {
            {{0, 1}, {0.0, -2.5}, 2.0, 1900},
            {{0, 2}, {5.0, 3.0}, 1.0, 100},
            {{1, 1}, {0.0, 3.0}, 2.0, 1900},
            {{1, 2}, {2.0, 5.0}, 1.0, 100},
        };
    } else if (name == "synthetic2") {
        spec.clusters = {
            {{0, 1}, {-5.0, 0.0}, 2.0, 1900},
            {{0, 2}, {-1.0, -1.0}, 1.0, 100},
            {{1, 1}, {5.0, 0.0}, 2.0, 1900},
            {{1, 2}, {1.0, 1.0}, 1.0, 100},
        };
    } else {
        throw std::invalid_argument("unknown preset '" + name +
                                    "'; valid presets: synthetic1, synthetic2");
    }
    return spec;
}

namespace {

void validate(const SynthSpec& spec) {
    if (spec.clusters.empty()) throw std::invalid_argument("spec has no clusters");
    std::set<SubPopId> seen;
    for (const auto& c : spec.clusters) {
        if (!seen.insert(c.subpop).second)
            throw std::invalid_argument("duplicate cluster for " + to_string(c.subpop));
        if (c.count < 1) throw std::invalid_argument("cluster count must be >= 1");
        if (c.variance <= 0.0) throw std::invalid_argument("cluster variance must be > 0");
        if (c.subpop.label < 0 || c.subpop.label > 1 || c.subpop.group < 1)
            throw std::invalid_argument("bad sub-population id " + to_string(c.subpop));
    }
}

}  // namespace

stats::LabeledDataset generate(const SynthSpec& spec) {
    validate(spec);
    int p = 1;
    std::int64_t total = 0;
    for (const auto& c : spec.clusters) {
        p = std::max(p, c.subpop.group);
        total += c.count;
    }
    stats::LabeledDataset data;
    data.p = p;
    data.d = 2;
    data.rows.reserve(static_cast<std::size_t>(total));

    Rng rng(spec.seed);
    for (const auto& c : spec.clusters) {
        const double sd = std::sqrt(c.variance);
        for (std::int64_t k = 0; k < c.count; ++k) {
            Eigen::VectorXd x(2);
            x(0) = c.mean(0) + sd * rng.next_normal();
            x(1) = c.mean(1) + sd * rng.next_normal();
            data.rows.push_back({x, c.subpop.label, c.subpop.group});
        }
    }
    return data;
}

}  // namespace rawls::synth
