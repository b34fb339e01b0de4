#include <benchmark/benchmark.h>

#include "fedgui/annotate.hpp"
#include "fedgui/experiment.hpp"
#include "fedgui/featurize.hpp"
#include "fedgui/metrics.hpp"
#include "fedgui/partition.hpp"

using namespace fedgui;

namespace {

std::vector<Episode> bench_corpus(int n, int min_len = 2, int max_len = 12) {
    CorpusSpec spec;
    spec.seed = 99;
    spec.n_episodes = n;
    spec.law = LengthLaw::uniform(min_len, max_len);
    return generate_corpus(spec);
}

void BM_GenerateEpisode(benchmark::State& state) {
    const auto& family = family_by_name("browse");
    const auto& profile = ActionSpaceProfile::android_control();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_episode(++seed, family, 6, profile));
    }
}
BENCHMARK(BM_GenerateEpisode);

void BM_Featurize(benchmark::State& state) {
    auto corpus = bench_corpus(1);
    const auto& step = corpus[0].steps[0];
    for (auto _ : state) {
        benchmark::DoNotOptimize(featurize(corpus[0].high_level, step.screenshot));
    }
}
BENCHMARK(BM_Featurize);

void BM_LossAndGrad(benchmark::State& state) {
    auto corpus = bench_corpus(4);
    auto samples = build_samples(corpus, 64);
    ModelParams params(ActionSpaceProfile::android_control(), 64, 16, 256);
    Rng rng(3);
    for (auto& w : params.flat()) w = rng.uniform(-0.2, 0.2);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grad(params, samples[i++ % samples.size()]));
    }
}
BENCHMARK(BM_LossAndGrad);

void BM_LocalTrain(benchmark::State& state) {
    auto corpus = bench_corpus(10);
    auto samples = build_samples(corpus, 64);
    ModelParams global(ActionSpaceProfile::android_control(), 64, 16, 256);
    LocalTrainConfig cfg;
    cfg.iterations = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(local_train(global, samples, cfg, {}, {}, 7));
    }
}
BENCHMARK(BM_LocalTrain)->Arg(10)->Arg(50);

void BM_AggregateFedAdam(benchmark::State& state) {
    ModelParams global(ActionSpaceProfile::android_control(), 64, 16, 256);
    ServerState server = ServerState::init(global, 7, 10);
    StrategyConfig cfg;
    cfg.strategy = Strategy::FedAdam;
    std::vector<ClientUpdate> updates(3);
    Rng rng(5);
    for (auto& u : updates) {
        u.delta.resize(global.flat().size());
        for (auto& d : u.delta) d = rng.uniform(-0.01, 0.01);
        u.weight.omega = 1.0 / 3.0;
    }
    for (auto _ : state) {
        aggregate(cfg, server, updates);
        benchmark::DoNotOptimize(server.global.flat().data());
    }
}
BENCHMARK(BM_AggregateFedAdam);

void BM_PartitionEpisodeSkew(benchmark::State& state) {
    auto corpus = bench_corpus(1000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(partition(corpus, {Scheme::EpisodeSkew, 10, 0.1}, 7));
    }
}
BENCHMARK(BM_PartitionEpisodeSkew);

void BM_TemplateAnnotate(benchmark::State& state) {
    auto corpus = bench_corpus(1, 6, 6);
    TemplateBackend backend;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            annotate_episode(backend, corpus[0], PipelineMode::AutoAnnotation));
    }
}
BENCHMARK(BM_TemplateAnnotate);

void BM_MatchCorpus(benchmark::State& state) {
    auto corpus = bench_corpus(50);
    auto vocab = TextVocab::build(corpus, 256);
    ModelParams params(ActionSpaceProfile::android_control(), 64, 16, 256);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_model(params, vocab, corpus, 0.14, 1));
    }
}
BENCHMARK(BM_MatchCorpus);

void BM_Bleu(benchmark::State& state) {
    const std::string cand = "open the plantum app and browse articles about succulents";
    const std::string ref = "open the plantum app and look at succulent articles";
    for (auto _ : state) {
        benchmark::DoNotOptimize(bleu(cand, ref));
    }
}
BENCHMARK(BM_Bleu);

}  // namespace

BENCHMARK_MAIN();
