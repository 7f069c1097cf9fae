#include <benchmark/benchmark.h>

#include "bordepth/scorer.hpp"
#include "bordepth/synthetic.hpp"

using namespace bordepth;

static void BM_Bm25Build(benchmark::State& state) {
    auto spec = synthetic_preset("strong");
    spec.candidates = static_cast<std::size_t>(state.range(0));
    spec.num_queries = 1;
    const auto b = generate_synthetic(spec, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Bm25Index::build(b.registry));
    }
}
BENCHMARK(BM_Bm25Build)->Arg(100)->Arg(2000);

static void BM_Bm25Score(benchmark::State& state) {
    auto spec = synthetic_preset("strong");
    spec.candidates = static_cast<std::size_t>(state.range(0));
    spec.num_queries = 64;
    const auto b = generate_synthetic(spec, 1);
    const auto index = Bm25Index::build(b.registry);
    std::size_t q = 0;
    for (auto _ : state) {
        const auto& query = b.queries[q++ % b.queries.size()];
        benchmark::DoNotOptimize(rank(index.score(query.text, query.id)));
    }
}
BENCHMARK(BM_Bm25Score)->Arg(100)->Arg(2000);
