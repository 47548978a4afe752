#include <benchmark/benchmark.h>

#include "rawls/fat.hpp"
#include "rawls/flat.hpp"
#include "rawls/normal.hpp"
#include "rawls/oracle.hpp"
#include "rawls/rng.hpp"
#include "rawls/stats.hpp"
#include "rawls/synth.hpp"
#include "test_util.hpp"

using namespace rawls;

static void BM_normal_cdf(benchmark::State& state) {
    double x = -4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(normal_cdf(x));
        x += 1e-6;
        if (x > 4.0) x = -4.0;
    }
}
BENCHMARK(BM_normal_cdf);

static void BM_normal_quantile(benchmark::State& state) {
    double q = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(normal_quantile(q));
        q += 1e-6;
        if (q > 0.99) q = 0.01;
    }
}
BENCHMARK(BM_normal_quantile);

static void BM_fat_adapt(benchmark::State& state) {
    Rng rng(1);
    auto table = testutil::random_fat_table(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fat::fat_adapt(table));
}
BENCHMARK(BM_fat_adapt)->Arg(1)->Arg(5);

static void BM_flat_spherical(benchmark::State& state) {
    Rng rng(2);
    auto table = testutil::random_flat_table(rng, 2, static_cast<int>(state.range(0)),
                                             true);
    for (auto _ : state) benchmark::DoNotOptimize(flat::solve_flat_spherical(table));
}
BENCHMARK(BM_flat_spherical)->Arg(1)->Arg(4)->Arg(8);

static void BM_flat_general(benchmark::State& state) {
    Rng rng(3);
    auto table = testutil::random_flat_table(rng, 2, static_cast<int>(state.range(0)),
                                             false);
    for (auto _ : state) benchmark::DoNotOptimize(flat::solve_flat_general(table, 1e-6));
}
BENCHMARK(BM_flat_general)->Arg(1)->Arg(4);

static void BM_brute_force_rawls(benchmark::State& state) {
    Rng rng(4);
    std::vector<std::string> pts;
    int n = static_cast<int>(state.range(0));
    for (int k = 0; k < n; ++k) pts.push_back("p" + std::to_string(k));
    oracle::FiniteDistribution dist(pts, 1);
    double total = 0.0;
    std::vector<double> masses(2 * n);
    for (auto& m : masses) total += (m = 0.05 + rng.next_uniform());
    for (int k = 0; k < n; ++k) {
        dist.set_mass(k, 0, 1, masses[2 * k] / total);
        dist.set_mass(k, 1, 1, masses[2 * k + 1] / total);
    }
    dist.validate();
    for (auto _ : state) benchmark::DoNotOptimize(oracle::brute_force_rawls(dist));
}
BENCHMARK(BM_brute_force_rawls)->Arg(8)->Arg(12);

static void BM_estimate_moments(benchmark::State& state) {
    auto spec = synth::preset("synthetic1");
    spec.seed = 5;
    auto data = synth::generate(spec);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            stats::estimate_moments(data, stats::MomentMode::spherical));
}
BENCHMARK(BM_estimate_moments);

BENCHMARK_MAIN();
