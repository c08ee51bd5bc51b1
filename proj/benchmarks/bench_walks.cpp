#include <benchmark/benchmark.h>

#include "lcrec/rng.hpp"
#include "lcrec/skipgram.hpp"
#include "lcrec/synthetic.hpp"
#include "lcrec/walks.hpp"

using namespace lcrec;

namespace {

HinGraph synthetic_graph(int users, int items) {
    SyntheticSpec spec;
    spec.users = users;
    spec.items = items;
    spec.ratings_per_user = 20;
    spec.seed = 1;
    const auto world = generate_synthetic(spec);
    return build_hin(world.log, nullptr, nullptr, {});
}

}  // namespace

static void BM_HeteroWalks(benchmark::State& state) {
    const auto g = synthetic_graph(static_cast<int>(state.range(0)),
                                   static_cast<int>(state.range(0)) / 2);
    WalkConfig cfg;
    cfg.walk_length = 100;
    cfg.walks_per_node = 10;
    for (auto _ : state) benchmark::DoNotOptimize(hetero_walks(g, cfg, 7).sequences.size());
}
BENCHMARK(BM_HeteroWalks)->Arg(100)->Arg(400);

static void BM_SkipGramEpoch(benchmark::State& state) {
    const auto g = synthetic_graph(100, 50);
    WalkConfig wcfg;
    wcfg.walk_length = 40;
    wcfg.walks_per_node = 4;
    const auto corpus = hetero_walks(g, wcfg, 7);
    std::vector<std::string> names(g.node_count());
    for (int n = 0; n < g.node_count(); ++n) names[n] = g.name(n);

    SkipGramConfig cfg;
    cfg.dim = static_cast<int>(state.range(0));
    cfg.iterations = 1;
    for (auto _ : state) benchmark::DoNotOptimize(train_skipgram(corpus, names, cfg).size());
}
BENCHMARK(BM_SkipGramEpoch)->Arg(32)->Arg(128);
