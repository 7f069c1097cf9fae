#include <benchmark/benchmark.h>

#include "bordepth/metric.hpp"

using namespace bordepth;

static void BM_PRandProduct(benchmark::State& state) {
    const metric::SelectionContext ctx{8'841'823, state.range(0), 1000};
    for (auto _ : state) {
        benchmark::DoNotOptimize(metric::p_rand(ctx));
    }
}
BENCHMARK(BM_PRandProduct)->Arg(2)->Arg(30)->Arg(500);

static void BM_PRandLgamma(benchmark::State& state) {
    const metric::SelectionContext ctx{8'841'823, state.range(0), 1000};
    for (auto _ : state) {
        benchmark::DoNotOptimize(metric::log_miss_probability_lgamma(ctx));
    }
}
BENCHMARK(BM_PRandLgamma)->Arg(2)->Arg(500);

static void BM_BorMax(benchmark::State& state) {
    std::int64_t k = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(metric::bor_max({10'000, 3, k}));
        k = k % 10'000 + 1;
    }
}
BENCHMARK(BM_BorMax);
