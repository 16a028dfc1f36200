#include <benchmark/benchmark.h>

#include <vector>

#include <simval/patches.hpp>
#include <simval/render.hpp>
#include <simval/rng.hpp>
#include <simval/scene.hpp>
#include <simval/validators.hpp>

using namespace simval;

namespace {

void BM_SampleScene(benchmark::State &state) {
    const SceneConfig cfg = SceneConfig::default_city();
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sample_scene(cfg, seed++));
}
BENCHMARK(BM_SampleScene);

void BM_RenderFrame(benchmark::State &state) {
    const SceneGraph scene = sample_scene(SceneConfig::default_city(), 1);
    RenderConfig rc;
    rc.width = 64;
    rc.height = 48;
    rc.samples_per_pixel = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(render_frame(scene, rc, 1));
    state.SetItemsProcessed(state.iterations() * rc.width * rc.height * rc.samples_per_pixel);
}
BENCHMARK(BM_RenderFrame)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_GroundTruthAndContexts(benchmark::State &state) {
    const SceneGraph scene = sample_scene(SceneConfig::default_city(), 1);
    RenderConfig rc;
    rc.width = 160;
    rc.height = 120;
    for (auto _ : state) {
        const auto gt = render_ground_truth(scene, rc, 1);
        benchmark::DoNotOptimize(classify_contexts(gt));
    }
}
BENCHMARK(BM_GroundTruthAndContexts)->Unit(benchmark::kMillisecond);

void BM_Spearman(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(3);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform();
        y[i] = x[i] + 0.1 * rng.uniform();
    }
    for (auto _ : state) benchmark::DoNotOptimize(spearman_rho(x, y));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Spearman)->RangeMultiplier(4)->Range(9, 441 * 4)->Complexity();

}  // namespace

BENCHMARK_MAIN();
