#include <benchmark/benchmark.h>

#include "linkpred/embeddings.hpp"
#include "linkpred/heuristics.hpp"
#include "linkpred/sampling.hpp"
#include "synthetic.hpp"

using namespace linkpred;

namespace {

const DiGraph& social(int n) {
    static std::map<int, DiGraph> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, testkit::social_graph(n, std::max(4, n / 100), 1)).first;
    return it->second;
}

HeuristicConfig bench_config() {
    HeuristicConfig cfg;
    cfg.katz_alpha = 0.01;
    return cfg;
}

void BM_Svd(benchmark::State& state) {
    const auto& g = social(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(compute_svd(g, 6, 1));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.arc_count()));
}
BENCHMARK(BM_Svd)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Centralities(benchmark::State& state) {
    const auto& g = social(static_cast<int>(state.range(0)));
    const auto cfg = bench_config();
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_pagerank(g, cfg));
        benchmark::DoNotOptimize(compute_katz(g, cfg));
        benchmark::DoNotOptimize(compute_hits(g, cfg));
    }
}
BENCHMARK(BM_Centralities)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

// Per-edge cost of the 56 features once the featurizer is fitted.
void BM_Featurize(benchmark::State& state) {
    const auto& g = social(static_cast<int>(state.range(0)));
    const auto ds = assemble_dataset(g, 0.1, 3);
    const auto featurizer = HeuristicFeaturizer::fit(ds.train_graph, bench_config());
    for (auto _ : state) benchmark::DoNotOptimize(featurize_edges(featurizer, ds.test));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.test.size()));
}
BENCHMARK(BM_Featurize)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Split(benchmark::State& state) {
    const auto& g = social(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_dataset(g, 0.1, 3));
}
BENCHMARK(BM_Split)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Walks(benchmark::State& state) {
    const auto& g = social(2000);
    WalkConfig cfg;
    cfg.walks_per_node = 2;
    cfg.q = state.range(0) == 0 ? 1.0 : 0.5;  // q != 1 takes the biased path
    std::int64_t steps = 0;
    for (auto _ : state) {
        const auto walks = generate_walks(g, cfg);
        for (const auto& w : walks) steps += static_cast<std::int64_t>(w.size());
    }
    state.SetItemsProcessed(steps);
}
BENCHMARK(BM_Walks)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SkipGramEpoch(benchmark::State& state) {
    const auto& g = social(1000);
    WalkConfig wc;
    wc.walks_per_node = 2;
    wc.walk_length = 40;
    const auto walks = generate_walks(g, wc);
    SkipGramConfig cfg;
    cfg.epochs = 1;
    for (auto _ : state) benchmark::DoNotOptimize(train_skipgram(walks, g.node_count(), cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(walks.size() * wc.walk_length));
}
BENCHMARK(BM_SkipGramEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
