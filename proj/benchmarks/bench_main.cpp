#include <benchmark/benchmark.h>

#include <vector>

#include "sojourn/berman.hpp"
#include "sojourn/gauss_sim.hpp"
#include "sojourn/sojourn.hpp"

namespace sojourn {
namespace {

void BM_FbmPath(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    FbmSampler s(1.0, GridSpec{0.0, 1.0, n});
    std::vector<double> out(n);
    StreamRng rng({1, 0, 0});
    for (auto _ : state) {
        s.sample(rng, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FbmPath)->RangeMultiplier(4)->Range(256, 65536);

void BM_StationaryField(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    FieldSampler s(process::StationaryExp2D{}, Lattice2D{GridSpec{0.0, 1.0, n}, GridSpec{0.0, 1.0, n}});
    std::vector<double> out(n * n);
    StreamRng rng({2, 0, 0});
    for (auto _ : state) {
        s.sample(rng, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_StationaryField)->RangeMultiplier(2)->Range(32, 256);

void BM_LevelForSojourn(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto path = simulate_fbm(1.0, GridSpec{0.0, 1.0, n}, 3);
    std::vector<double> scratch;
    for (auto _ : state) {
        auto z = level_for_sojourn(path.view(), path.grid.step(), 0.3, scratch);
        benchmark::DoNotOptimize(z);
    }
}
BENCHMARK(BM_LevelForSojourn)->RangeMultiplier(4)->Range(256, 65536);

void BM_Berman1d(benchmark::State& state) {
    McSettings s;
    s.n_samples = 2000;
    s.grid_step = 1.0 / 64;
    s.sampler = state.range(0) ? Sampler::tilted : Sampler::plain;
    for (auto _ : state) {
        auto e = estimate_berman_1d(1.0, {}, 0.5, Interval{0.0, 4.0}, s);
        benchmark::DoNotOptimize(e.value);
    }
    state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_Berman1d)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ParabolaOracle(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(berman2_parabola_oracle(0.3, 2.0, 200));
}
BENCHMARK(BM_ParabolaOracle)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace sojourn
BENCHMARK_MAIN();
