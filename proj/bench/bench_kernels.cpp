// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "vplab/pair_sum.hpp"
#include "vplab/transport.hpp"

using namespace vplab;

namespace {

struct Fixture {
    std::shared_ptr<const SteadyState> state = std::make_shared<const SteadyState>(build_polytrope({}));
    QuadratureCloud cloud;
    HamiltonianField H;
    PointSet points;

    Fixture() {
        CloudSpec c;
        c.n_r = 4;
        c.n_speed = 3;
        c.n_r_margin = 1;
        c.n_speed_margin = 1;
        cloud = build_cloud(*state, c);
        H = sample_hamiltonian(state, 1, 8, 1.5, 0.003);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int i = 0; i < 4000; ++i) points.add({u(rng), u(rng), u(rng)}, 1.0 / 4000, 0.02);
    }
};

const Fixture& fx() {
    static const Fixture f;
    return f;
}

const FlowOptions kFlow{1e-8};

void BM_ForwardImages(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(forward_images(fx().H, 1.0, fx().cloud.nodes, kFlow));
    s.SetItemsProcessed(s.iterations() * static_cast<long>(fx().cloud.size()));
}
void BM_ForwardImagesSerial(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(forward_images_serial(fx().H, 1.0, fx().cloud.nodes, kFlow));
    s.SetItemsProcessed(s.iterations() * static_cast<long>(fx().cloud.size()));
}

void BM_Pushforward(benchmark::State& s) {
    const PerturbedState p(fx().state, fx().H, 1.0, kFlow);
    for (auto _ : s) benchmark::DoNotOptimize(pushforward_cloud(p, fx().cloud));
}
void BM_PushforwardSerial(benchmark::State& s) {
    const PerturbedState p(fx().state, fx().H, 1.0, kFlow);
    for (auto _ : s) benchmark::DoNotOptimize(pushforward_cloud_serial(p, fx().cloud));
}

void pair_sum(benchmark::State& s, bool parallel, PairSumOptions::Method m) {
    PairSumOptions o;
    o.parallel = parallel;
    o.method = m;
    for (auto _ : s) benchmark::DoNotOptimize(potential_at(fx().points, fx().points, true, o));
}
void BM_PairSumDirect(benchmark::State& s) { pair_sum(s, true, PairSumOptions::Method::direct); }
void BM_PairSumDirectSerial(benchmark::State& s) { pair_sum(s, false, PairSumOptions::Method::direct); }
void BM_PairSumTree(benchmark::State& s) { pair_sum(s, true, PairSumOptions::Method::treecode); }
void BM_PairSumTreeSerial(benchmark::State& s) { pair_sum(s, false, PairSumOptions::Method::treecode); }

}  // namespace

BENCHMARK(BM_ForwardImages)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardImagesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pushforward)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PushforwardSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairSumDirect)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairSumDirectSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairSumTree)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairSumTreeSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
