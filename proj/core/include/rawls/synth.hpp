#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rawls/stats.hpp"
#include "rawls/types.hpp"

namespace rawls::synth {

struct Cluster {
    SubPopId subpop;
    Eigen::Vector2d mean;
    double variance = 1.0;  // spherical, sigma^2
    std::int64_t count = 1;
};

struct SynthSpec {
    std::vector<Cluster> clusters;
    std::uint64_t seed = 0;
};

// Built-in benchmark parameter sets: "synthetic1" and "synthetic2".
SynthSpec preset(const std::string& name);

// Draws `count` rows per cluster from N(mean, variance * I), in cluster
// order then index order; a fixed seed reproduces the dataset bit for bit.
stats::LabeledDataset generate(const SynthSpec& spec);

}  // namespace rawls::synth
