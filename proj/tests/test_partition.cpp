#include <doctest.h>

#include <set>

#include "fedgui/errors.hpp"
#include "fedgui/generate.hpp"
#include "fedgui/partition.hpp"
#include "test_support.hpp"

using namespace fedgui;
using fedgui::test::TempDir;
using fedgui::test::read_file;

namespace {

std::vector<Episode> uniform_corpus(int n, std::uint64_t seed = 7) {
    CorpusSpec spec;
    spec.seed = seed;
    spec.n_episodes = n;
    spec.law = LengthLaw::uniform(2, 12);
    return generate_corpus(spec);
}

void check_exact_cover(const std::vector<Episode>& corpus,
                       const std::vector<ClientDataset>& clients) {
    std::set<std::string> seen;
    std::size_t episodes = 0, steps = 0;
    for (const auto& c : clients) {
        episodes += c.n_epi();
        steps += c.n_steps();
        for (const auto& ep : c.episodes) {
            CHECK(seen.insert(ep.id).second);  // no duplicates anywhere
        }
    }
    CHECK(episodes == corpus.size());
    CHECK(steps == total_steps(corpus));
    CHECK(seen.size() == corpus.size());
}

}  // namespace

TEST_CASE("iid split assigns 100 episodes to each of 10 clients") {
    auto corpus = uniform_corpus(1000);
    auto clients = partition(corpus, {Scheme::Iid, 10}, 7);
    REQUIRE(clients.size() == 10);
    for (const auto& c : clients) CHECK(c.n_epi() == 100);
    check_exact_cover(corpus, clients);
}

TEST_CASE("step skew keeps episode counts equal but skews steps") {
    auto corpus = uniform_corpus(1000);
    auto clients = partition(corpus, {Scheme::StepSkew, 10}, 7);
    std::size_t max_steps = 0, min_steps = SIZE_MAX;
    for (const auto& c : clients) {
        CHECK(c.n_epi() == 100);
        max_steps = std::max(max_steps, c.n_steps());
        min_steps = std::min(min_steps, c.n_steps());
    }
    CHECK(static_cast<double>(max_steps) / static_cast<double>(min_steps) >= 1.5);
    check_exact_cover(corpus, clients);
}

TEST_CASE("episode skew ramps counts and rebalances steps when feasible") {
    auto corpus = uniform_corpus(1000);
    // gamma gentle enough that equal step totals are arithmetically reachable
    auto clients = partition(corpus, {Scheme::EpisodeSkew, 10, 0.1}, 7);
    check_exact_cover(corpus, clients);
    for (std::size_t k = 1; k < clients.size(); ++k) {
        CHECK(clients[k].n_epi() >= clients[k - 1].n_epi());
    }
    CHECK(clients.back().n_epi() > clients.front().n_epi());
    double mean = static_cast<double>(total_steps(corpus)) / 10.0;
    for (const auto& c : clients) {
        CHECK(static_cast<double>(c.n_steps()) >= 0.95 * mean);
        CHECK(static_cast<double>(c.n_steps()) <= 1.05 * mean);
    }
}

TEST_CASE("episode skew at the default gamma still covers exactly") {
    auto corpus = uniform_corpus(1000);
    auto clients = partition(corpus, {Scheme::EpisodeSkew, 10, 0.5}, 7);
    check_exact_cover(corpus, clients);
    CHECK(clients.back().n_epi() > 4 * clients.front().n_epi());
}

TEST_CASE("both skew ramps counts without balancing steps") {
    auto corpus = uniform_corpus(1000);
    auto clients = partition(corpus, {Scheme::BothSkew, 10, 0.5}, 7);
    check_exact_cover(corpus, clients);
    for (std::size_t k = 1; k < clients.size(); ++k) {
        CHECK(clients[k].n_epi() >= clients[k - 1].n_epi());
    }
}

TEST_CASE("K=1 yields a single client holding the whole corpus") {
    auto corpus = uniform_corpus(50);
    for (auto scheme : {Scheme::Iid, Scheme::StepSkew, Scheme::EpisodeSkew, Scheme::BothSkew}) {
        auto clients = partition(corpus, {scheme, 1}, 7);
        REQUIRE(clients.size() == 1);
        CHECK(clients[0].n_epi() == corpus.size());
        CHECK(clients[0].n_steps() == total_steps(corpus));
    }
}

TEST_CASE("partition preconditions") {
    auto corpus = uniform_corpus(10);
    CHECK_THROWS_AS(partition(corpus, {Scheme::Iid, 11}, 7), ValidationError);
    CHECK_THROWS_AS(partition(corpus, {Scheme::Iid, 3}, 7), ValidationError);      // 10 % 3
    CHECK_THROWS_AS(partition(corpus, {Scheme::StepSkew, 4}, 7), ValidationError);  // 10 % 4
    CHECK_NOTHROW(partition(corpus, {Scheme::BothSkew, 3}, 7));
    CHECK_THROWS_AS(partition(corpus, {Scheme::Iid, 0}, 7), ValidationError);
    PartitionScheme negative{Scheme::Iid, 2, -0.5};
    CHECK_THROWS_AS(partition(corpus, negative, 7), ValidationError);
}

TEST_CASE("partition is deterministic under a fixed seed") {
    auto corpus = uniform_corpus(200);
    for (auto scheme : {Scheme::Iid, Scheme::EpisodeSkew, Scheme::BothSkew}) {
        auto a = partition(corpus, {scheme, 10, 0.5}, 123);
        auto b = partition(corpus, {scheme, 10, 0.5}, 123);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            REQUIRE(a[k].n_epi() == b[k].n_epi());
            for (std::size_t i = 0; i < a[k].episodes.size(); ++i) {
                CHECK(a[k].episodes[i].id == b[k].episodes[i].id);
            }
        }
    }
}

TEST_CASE("dataset stats report exact counts and means") {
    CorpusSpec spec;
    spec.seed = 9;
    spec.n_episodes = 2;
    spec.law = LengthLaw::fixed_len(2);
    auto episodes = generate_corpus(spec);
    spec.law = LengthLaw::fixed_len(4);
    spec.seed = 10;
    auto longer = generate_corpus(spec);
    ClientDataset client;
    client.client_id = 0;
    client.episodes = {episodes[0], longer[0]};

    auto stats = dataset_stats({client});
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].n_epi == 2);
    CHECK(stats[0].n_steps == 6);
    CHECK(stats[0].mean_length == doctest::Approx(3.0));

    CHECK_THROWS_AS(dataset_stats({}), ValidationError);
    ClientDataset empty;
    CHECK_THROWS_AS(dataset_stats({empty}), ValidationError);
}

TEST_CASE("iid client mean lengths stay near the corpus mean") {
    auto corpus = uniform_corpus(1000);
    double corpus_mean = static_cast<double>(total_steps(corpus)) / 1000.0;
    for (const auto& s : dataset_stats(partition(corpus, {Scheme::Iid, 10}, 7))) {
        CHECK(s.mean_length >= 0.9 * corpus_mean);
        CHECK(s.mean_length <= 1.1 * corpus_mean);
    }
}

TEST_CASE("split manifest re-materializes the identical split") {
    TempDir tmp("split");
    auto corpus = uniform_corpus(100);
    PartitionScheme scheme{Scheme::EpisodeSkew, 5, 0.3};
    auto clients = partition(corpus, scheme, 11);
    save_split_manifest(clients, scheme, 11, tmp.file("split.json"));
    auto rebuilt = apply_split_manifest(corpus, tmp.file("split.json"));
    REQUIRE(rebuilt.size() == clients.size());
    for (std::size_t k = 0; k < clients.size(); ++k) {
        REQUIRE(rebuilt[k].n_epi() == clients[k].n_epi());
        for (std::size_t i = 0; i < clients[k].episodes.size(); ++i) {
            CHECK(rebuilt[k].episodes[i].id == clients[k].episodes[i].id);
        }
    }
    // unknown id in the manifest is an error
    auto corrupted = read_file(tmp.file("split.json"));
    corrupted.replace(corrupted.find("ep-0000"), 7, "ep-9999");
    fedgui::test::write_file(tmp.file("bad.json"), corrupted);
    CHECK_THROWS_AS(apply_split_manifest(corpus, tmp.file("bad.json")), ValidationError);
}
