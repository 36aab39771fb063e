#include "hmsort/ablation.hpp"
#include "hmsort/association.hpp"
#include "hmsort/synth.hpp"
#include "hmsort/tracker.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace hmsort;

namespace {

const synth::Scenario& crowd(int identities) {
    static std::map<int, synth::Scenario> cache;
    auto it = cache.find(identities);
    if (it == cache.end()) {
        synth::ScenarioSpec spec;
        spec.seed = 99;
        spec.n_identities = identities;
        spec.frames = 300;
        spec.det_noise_sigma = 1.5;
        spec.score_mean = 0.8;
        spec.score_sigma = 0.1;
        spec.miss_rate = 0.03;
        it = cache.emplace(identities, synth::generate(spec, "bench")).first;
    }
    return it->second;
}

void BM_TrackerSequence(benchmark::State& state) {
    const auto& sc = crowd(static_cast<int>(state.range(0)));
    const auto inputs = sc.detections.frame_inputs();
    for (auto _ : state) {
        Tracker t(TrackingConfig{});
        for (const auto& in : inputs) benchmark::DoNotOptimize(t.step(in));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(inputs.size()));
    state.counters["frames/s"] =
        benchmark::Counter(static_cast<double>(inputs.size()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_TrackerSequence)->Arg(10)->Arg(22)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_LinearAssignment(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    synth::Rng rng(5);
    CostMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            if (rng.uniform() < 0.7) m.set(r, c, rng.uniform());
        }
    }
    for (auto _ : state) benchmark::DoNotOptimize(linear_assignment(m));
}
BENCHMARK(BM_LinearAssignment)->Arg(8)->Arg(22)->Arg(64)->Arg(128);

void BM_BuildCostMatrix(benchmark::State& state) {
    const auto& sc = crowd(22);
    const auto& dets = sc.detections.detections[10];
    std::vector<AssociationInput> tracks;
    for (const auto& d : sc.detections.detections[9]) tracks.push_back({d.bbox, &*d.embedding});
    const TrackingConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(build_cost_matrix(tracks, dets, 0.3, cfg, true));
}
BENCHMARK(BM_BuildCostMatrix);

}  // namespace

BENCHMARK_MAIN();
