#include <doctest.h>

#include <map>

#include "fedgui/errors.hpp"
#include "fedgui/generate.hpp"
#include "fedgui/jsonl.hpp"

using namespace fedgui;

namespace {

TaskFamily click_only_family() {
    TaskFamily f;
    f.name = "clicks";
    f.app = "Gallery";
    f.verb = "look at";
    f.keywords = {"photos"};
    f.kind_weights = {{ActionKind::Click, 1.0}};
    f.open_app_first = false;
    return f;
}

}  // namespace

TEST_CASE("browse episode of three steps ends without COMPLETE") {
    auto ep = generate_episode(7, family_by_name("browse"), 3,
                               ActionSpaceProfile::android_control());
    REQUIRE(ep.step_count() == 3);
    CHECK(ep.steps.back().action.kind != ActionKind::Complete);
    CHECK(ep.high_level.find("Plantum") != std::string::npos);
    for (const auto& step : ep.steps) CHECK(step.low_level.has_value());
}

TEST_CASE("same seed reproduces the episode byte for byte") {
    auto a = generate_episode(7, family_by_name("browse"), 3,
                              ActionSpaceProfile::android_control());
    auto b = generate_episode(7, family_by_name("browse"), 3,
                              ActionSpaceProfile::android_control());
    CHECK(episode_to_json_line(a) == episode_to_json_line(b));
}

TEST_CASE("coordinate actions land inside a referenced element") {
    // 1000 click-only episodes; every point must be inside some element bbox
    auto family = click_only_family();
    const auto& profile = ActionSpaceProfile::android_control();
    for (int i = 0; i < 1000; ++i) {
        auto ep = generate_episode(static_cast<std::uint64_t>(i), family, 2, profile);
        for (const auto& step : ep.steps) {
            REQUIRE(step.action.point.has_value());
            bool contained = false;
            for (const auto& el : step.screenshot.elements) {
                contained = contained || el.contains(*step.action.point);
            }
            CHECK(contained);
        }
    }
}

TEST_CASE("generator rejects bad inputs") {
    CHECK_THROWS_AS(generate_episode(7, family_by_name("browse"), 0,
                                     ActionSpaceProfile::android_control()),
                    ValidationError);
    // shopping uses LONG_PRESS, which AitW does not define
    CHECK_THROWS_AS(generate_episode(7, family_by_name("shopping"), 3,
                                     ActionSpaceProfile::aitw()),
                    ValidationError);
    CHECK_THROWS_AS(family_by_name("gaming"), ValidationError);
}

TEST_CASE("uniform corpus hits the expected mean length") {
    CorpusSpec spec;
    spec.seed = 7;
    spec.n_episodes = 1000;
    spec.law = LengthLaw::uniform(2, 12);
    auto corpus = generate_corpus(spec);
    REQUIRE(corpus.size() == 1000);
    double mean = static_cast<double>(total_steps(corpus)) / 1000.0;
    CHECK(mean >= 6.65);
    CHECK(mean <= 7.35);
}

TEST_CASE("every uniform length appears given enough episodes") {
    CorpusSpec spec;
    spec.seed = 11;
    spec.n_episodes = 1100;  // 100 * (12 - 2 + 1)
    spec.law = LengthLaw::uniform(2, 12);
    auto corpus = generate_corpus(spec);
    std::map<std::size_t, int> lengths;
    for (const auto& ep : corpus) lengths[ep.step_count()]++;
    for (std::size_t len = 2; len <= 12; ++len) CHECK(lengths[len] > 0);
}

TEST_CASE("fixed law gives a single episode of exactly n steps") {
    CorpusSpec spec;
    spec.seed = 3;
    spec.n_episodes = 1;
    spec.law = LengthLaw::fixed_len(5);
    auto corpus = generate_corpus(spec);
    REQUIRE(corpus.size() == 1);
    CHECK(corpus.front().step_count() == 5);
}

TEST_CASE("bimodal corpus splits roughly in half") {
    CorpusSpec spec;
    spec.seed = 7;
    spec.n_episodes = 1000;
    spec.law = LengthLaw::bimodal(2, 12, 0.5);
    auto corpus = generate_corpus(spec);
    int short_count = 0, long_count = 0;
    for (const auto& ep : corpus) {
        if (ep.step_count() == 2) short_count++;
        if (ep.step_count() == 12) long_count++;
    }
    CHECK(short_count + long_count == 1000);
    CHECK(short_count >= 450);
    CHECK(short_count <= 550);
}

TEST_CASE("corpus generation is deterministic as serialized bytes") {
    CorpusSpec spec;
    spec.seed = 42;
    spec.n_episodes = 25;
    spec.law = LengthLaw::uniform(2, 6);
    std::string a, b;
    for (const auto& ep : generate_corpus(spec)) a += episode_to_json_line(ep) + "\n";
    for (const auto& ep : generate_corpus(spec)) b += episode_to_json_line(ep) + "\n";
    CHECK(a == b);
}

TEST_CASE("other profiles generate valid corpora") {
    CorpusSpec odyssey;
    odyssey.seed = 13;
    odyssey.n_episodes = 40;
    odyssey.law = LengthLaw::uniform(2, 6);
    odyssey.profile = "GUIOdyssey";
    for (const auto& ep : generate_corpus(odyssey)) {
        CHECK_NOTHROW(ep.validate(ActionSpaceProfile::gui_odyssey()));
        for (const auto& step : ep.steps) {
            CHECK(step.action.kind != ActionKind::OpenApp);
        }
    }

    CorpusSpec aitw;
    aitw.seed = 14;
    aitw.n_episodes = 40;
    aitw.law = LengthLaw::uniform(2, 6);
    aitw.profile = "AitW";
    aitw.family_names = {"search", "settings"};  // the AitW-compatible builtins
    for (const auto& ep : generate_corpus(aitw)) {
        CHECK_NOTHROW(ep.validate(ActionSpaceProfile::aitw()));
    }
}

TEST_CASE("length law parsing") {
    auto u = LengthLaw::parse("uniform:2,12");
    CHECK(u.kind == LengthLaw::Kind::Uniform);
    CHECK(u.min == 2);
    CHECK(u.max == 12);
    auto f = LengthLaw::parse("fixed:5");
    CHECK(f.kind == LengthLaw::Kind::Fixed);
    CHECK(f.fixed == 5);
    auto b = LengthLaw::parse("bimodal:2,12,0.25");
    CHECK(b.kind == LengthLaw::Kind::Bimodal);
    CHECK(b.short_ratio == doctest::Approx(0.25));
    CHECK_THROWS_AS(LengthLaw::parse("uniform:12,2"), ValidationError);
    CHECK_THROWS_AS(LengthLaw::parse("geometric:3"), ValidationError);
}
