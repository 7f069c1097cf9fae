#include <benchmark/benchmark.h>

#include "bordepth/agents.hpp"
#include "bordepth/harness.hpp"
#include "bordepth/synthetic.hpp"

using namespace bordepth;

namespace {

PreparedData mixed_data() {
    auto spec = synthetic_preset("mixed");
    spec.num_queries = 500;
    const auto b = generate_synthetic(spec, 7);
    ExperimentSpec e;
    e.methods = {parse_method("bor")};
    return prepare_data(b, *b.scores, e);
}

}  // namespace

static void BM_TrainTabular(benchmark::State& state) {
    const auto data = mixed_data();
    Hyperparams hp;
    hp.passes = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_tabular(data.train, EpisodeConfig{}, hp, 1));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.train.size() * hp.passes));
}
BENCHMARK(BM_TrainTabular)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_TrainNeural(benchmark::State& state) {
    const auto data = mixed_data();
    Hyperparams hp;
    hp.passes = 3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_neural(data.train, EpisodeConfig{}, hp, 1));
    }
}
BENCHMARK(BM_TrainNeural)->Unit(benchmark::kMillisecond);
