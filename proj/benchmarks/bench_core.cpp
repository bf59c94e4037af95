#include "rangelab/analysis.hpp"
#include "rangelab/ensemble.hpp"
#include "rangelab/marks.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/samplers.hpp"
#include "rangelab/trees.hpp"

#include <benchmark/benchmark.h>

using namespace rangelab;

namespace {

ModelParams params(double eps) { return ModelParams::make(eps, {0.5, 0.5}); }

}  // namespace

// Conditioned walk stabilized at height x/eps, x = 12.
static void BM_SampleWalk(benchmark::State& state) {
    const double eps = 1.0 / static_cast<double>(state.range(0));
    const auto p = params(eps);
    const auto stop = HeightStabilized::with_tolerance(static_cast<std::int64_t>(12.0 / eps), 1e-4, p);
    auto rng = make_stream(1, 0);
    std::size_t steps = 0;
    for (auto _ : state) {
        const auto w = sample_walk(p, stop, rng);
        steps += w.steps();
        benchmark::DoNotOptimize(w.moves.data());
    }
    state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SampleWalk)->Arg(10)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_RangeTree(benchmark::State& state) {
    const auto p = params(1.0 / static_cast<double>(state.range(0)));
    auto rng = make_stream(2, 0);
    const auto w = sample_walk(p, HeightStabilized::with_tolerance(12 * state.range(0), 1e-4, p), rng);
    for (auto _ : state) benchmark::DoNotOptimize(range_tree(w).size());
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.steps()));
}
BENCHMARK(BM_RangeTree)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_HeightFromLukasiewicz(benchmark::State& state) {
    auto rng = make_stream(3, 0);
    // range tree of a long walk; subcritical GW trees of this size are too rare to sample
    const auto w = sample_walk(params(0.02), FixedSteps{static_cast<std::size_t>(state.range(0))}, rng);
    const auto t = range_tree(w);
    const auto v = lukasiewicz_path(t);
    for (auto _ : state) benchmark::DoNotOptimize(height_from_lukasiewicz(v).values.data());
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_HeightFromLukasiewicz)->Arg(1000)->Arg(100000);

static void BM_TrackAndShrink(benchmark::State& state) {
    const auto p = params(0.02);
    auto rng = make_stream(4, 0);
    const auto w = sample_walk(p, HeightStabilized::with_tolerance(600, 1e-4, p), rng);
    MarkSampler roots(p.weights);
    const auto d = decode_walk_to_marked_tree(w, roots, rng);
    for (auto _ : state) {
        const auto s = shuffle(d.marked, rng);
        benchmark::DoNotOptimize(shrink_to_range_tree(s).size());
    }
    state.counters["vertices"] = static_cast<double>(d.marked.tree.size());
}
BENCHMARK(BM_TrackAndShrink)->Unit(benchmark::kMillisecond);

// One full ensemble replicate at the acceptance parameters.
static void BM_SimulateReplicate(benchmark::State& state) {
    EnsembleConfig cfg;
    cfg.params = params(0.02);
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_replicate(cfg, i++).size_tau);
}
BENCHMARK(BM_SimulateReplicate)->Unit(benchmark::kMillisecond);

static void BM_InvGammaEpsUniform(benchmark::State& state) {
    const double eps = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(inv_gamma_eps_uniform(2, eps).value);
}
BENCHMARK(BM_InvGammaEpsUniform)->Arg(10)->Arg(100)->Arg(1000);

static void BM_LimitPath(benchmark::State& state) {
    auto rng = make_stream(5, 0);
    for (auto _ : state) benchmark::DoNotOptimize(sample_limit_D(1e-4, 1.0, rng).values.back());
}
BENCHMARK(BM_LimitPath)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
