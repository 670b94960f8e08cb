#include "stregion/delaunay.hpp"
#include "stregion/divergence.hpp"
#include "stregion/partition.hpp"
#include "stregion/pipeline.hpp"
#include "stregion/synth.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace stregion;

namespace {

std::vector<geometry::PlanarPoint> scatter(std::size_t n) {
    std::mt19937_64 rng(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<geometry::PlanarPoint> pts;
    for (std::uint32_t i = 0; i < n; ++i) pts.push_back({i, u(rng), u(rng)});
    return pts;
}

const synth::SynthOutput& benchmark_data() {
    static const synth::SynthOutput out = [] {
        auto cfg = synth::default_config();
        cfg.n_slots = 200;
        cfg.n_anomalies = 10;
        cfg.n_external = 5;
        return synth::generate(cfg);
    }();
    return out;
}

void BM_Delaunay(benchmark::State& state) {
    const auto pts = scatter(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(geometry::build_delaunay(pts));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Delaunay)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_LocationClustering(benchmark::State& state) {
    const auto g = geometry::build_delaunay(scatter(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(partition::cluster_locations(g, 4));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LocationClustering)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_SlotAnalysis(benchmark::State& state) {
    const auto& data = benchmark_data();
    SlotAnalyzer analyzer(data.dataset, DetectorConfig{});
    std::size_t t = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(analyzer.analyze(data.dataset.slices()[t]));
        t = (t + 1) % data.dataset.slices().size();
    }
}
BENCHMARK(BM_SlotAnalysis);

void BM_Detect(benchmark::State& state) {
    const auto& data = benchmark_data();
    DetectorConfig cfg;
    cfg.approach = static_cast<Approach>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(detect(data.dataset, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.dataset.slices().size()));
}
BENCHMARK(BM_Detect)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
