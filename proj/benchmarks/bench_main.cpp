#include "screensearch/index_bundle.hpp"
#include "screensearch/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

using namespace screensearch;

namespace {

struct Fixture {
    PlantedBenchmark bench;
    Corpus corpus;
    IndexBundle bundle;
    KnnClassifier model;

    explicit Fixture(std::size_t distractors) {
        PlantedOptions opt;
        opt.distractors = distractors;
        opt.targets = 50;
        bench = generate_planted_benchmark(opt);
        corpus = Corpus(bench.screens);
        bundle = IndexBundle::build(corpus, TextPipeline(), {}, synthetic_class_map());
        model = KnnClassifier::train(generate_doodle_set(supported_classes(), 20, 1), supported_classes());
    }
};

const Fixture& fixture(std::size_t distractors) {
    static std::map<std::size_t, std::unique_ptr<Fixture>> cache;
    auto& f = cache[distractors];
    if (!f) f = std::make_unique<Fixture>(distractors);
    return *f;
}

void BM_TextScore(benchmark::State& state) {
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    const auto q = f.bench.queries[0].query.texts[0];
    for (auto _ : state) benchmark::DoNotOptimize(f.bundle.text.score(q));
}
BENCHMARK(BM_TextScore)->Arg(10000)->Arg(58000)->Unit(benchmark::kMicrosecond);

void BM_ClassScore(benchmark::State& state) {
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    const auto& [cls, placements] = *f.bench.queries[0].query.sketch.begin();
    const RankingConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(f.bundle.sketch.score_class_doodles(cls, placements, cfg));
}
BENCHMARK(BM_ClassScore)->Arg(10000)->Arg(58000)->Unit(benchmark::kMicrosecond);

void BM_Rank(benchmark::State& state) {
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    const RankingConfig cfg;
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.bundle.search(f.bench.queries[i].query, cfg));
        i = (i + 1) % f.bench.queries.size();
    }
}
BENCHMARK(BM_Rank)->Arg(10000)->Arg(58000)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
    const auto& f = fixture(10000);
    Rng rng(3);
    std::vector<Sketch> sketches;
    for (const auto& c : supported_classes()) sketches.push_back(generate_doodle(c, rng));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.model.classify(sketches[i]));
        i = (i + 1) % sketches.size();
    }
}
BENCHMARK(BM_Classify)->Unit(benchmark::kMicrosecond);

void BM_Resample(benchmark::State& state) {
    Rng rng(4);
    const auto sketch = generate_doodle("Star", rng);
    for (auto _ : state) {
        for (const auto& s : sketch) benchmark::DoNotOptimize(resample_stroke(s));
    }
}
BENCHMARK(BM_Resample);

void BM_BuildIndex(benchmark::State& state) {
    CorpusOptions opt;
    opt.screens = static_cast<std::size_t>(state.range(0));
    const Corpus corpus(generate_corpus(opt));
    const auto class_map = synthetic_class_map();
    for (auto _ : state) benchmark::DoNotOptimize(IndexBundle::build(corpus, TextPipeline(), {}, class_map));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildIndex)->Arg(2000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
