#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "lcrec/closure.hpp"
#include "lcrec/rng.hpp"

using namespace lcrec;

namespace {

Eigen::MatrixXf cloud(int n, int d, std::uint64_t seed) {
    Eigen::MatrixXf m(n, d);
    Rng rng(seed);
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < d; ++j) m(r, j) = static_cast<float>(rng.normal(0.0, 1.0));
    return m;
}

Eigen::VectorXd query(int d, std::uint64_t seed) {
    Eigen::VectorXd x(d);
    Rng rng(seed);
    for (int j = 0; j < d; ++j) x[j] = rng.normal(0.0, 2.0);
    return x;
}

}  // namespace

static void BM_BuildSphere(benchmark::State& state) {
    const auto pts = cloud(static_cast<int>(state.range(0)), 128, 1);
    for (auto _ : state) benchmark::DoNotOptimize(build_sphere(pts));
}
BENCHMARK(BM_BuildSphere)->Arg(64)->Arg(256)->Arg(1024);

static void BM_BuildHull(benchmark::State& state) {
    const auto pts = cloud(static_cast<int>(state.range(0)), 128, 2);
    for (auto _ : state) benchmark::DoNotOptimize(build_hull(pts));
}
BENCHMARK(BM_BuildHull)->Arg(64)->Arg(256)->Arg(1024);

static void BM_HullDistance(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int d = static_cast<int>(state.range(1));
    const Eigen::MatrixXd pts = cloud(n, d, 3).cast<double>();
    const auto x = query(d, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(hull_distance_fw(pts, x, 1e-8, 0).distance);
}
BENCHMARK(BM_HullDistance)
    ->Args({16, 16})
    ->Args({64, 16})
    ->Args({64, 128})
    ->Args({256, 128});

static void BM_SphereDistance(benchmark::State& state) {
    const auto c = build_sphere(cloud(256, 128, 5));
    const auto x = query(128, 6);
    for (auto _ : state) benchmark::DoNotOptimize(c.distance(x));
}
BENCHMARK(BM_SphereDistance);

static void BM_BoxDistance(benchmark::State& state) {
    const auto c = build_box(cloud(256, 128, 7));
    const auto x = query(128, 8);
    for (auto _ : state) benchmark::DoNotOptimize(c.distance(x));
}
BENCHMARK(BM_BoxDistance);
