#include <doctest.h>

#include <cstdlib>

#include "fedgui/annotate.hpp"
#include "fedgui/errors.hpp"
#include "fedgui/generate.hpp"
#include "fedgui/jsonl.hpp"
#include "fedgui/prompts.hpp"
#include "test_support.hpp"

using namespace fedgui;
using fedgui::test::TempDir;
using fedgui::test::read_file;

#ifndef FEDGUI_TEST_GOLDEN_DIR
#define FEDGUI_TEST_GOLDEN_DIR "golden"
#endif

namespace {

Screenshot screen_with(std::vector<UiElement> elements) {
    Screenshot s;
    s.screen_id = "scr-fixed";
    s.elements = std::move(elements);
    s.features = {0.0, 0.0};
    return s;
}

UiElement element(double x0, double y0, double x1, double y1, const std::string& label) {
    UiElement el;
    el.bbox = {x0, y0, x1, y1};
    el.label = label;
    return el;
}

Action click_at(double x, double y) {
    Action a;
    a.kind = ActionKind::Click;
    a.point = Point{x, y};
    return a;
}

/// Counts calls and forwards to the template rules.
class CountingBackend final : public AnnotatorBackend {
public:
    std::string complete(const std::string& prompt,
                         const std::vector<std::string>& images) override {
        calls++;
        return inner.complete(prompt, images);
    }
    std::string name() const override { return "counting"; }
    int calls = 0;
    TemplateBackend inner;
};

AnnotationClock ticking_clock() {
    auto t = std::make_shared<double>(0.0);
    return [t] {
        *t += 0.001;
        return *t;
    };
}

}  // namespace

TEST_CASE("click conversion names the containing element") {
    auto shot = screen_with({element(0.4, 0.4, 0.6, 0.6, "cooking")});
    auto conv = convert_action(click_at(0.5, 0.5), shot);
    CHECK(conv.text == "Click on the element: cooking");
    CHECK(conv.source_kind == ActionKind::Click);
}

TEST_CASE("click conversion falls back to coordinates") {
    auto shot = screen_with({element(0.0, 0.0, 0.2, 0.2, "far away")});
    CHECK(convert_action(click_at(0.9, 0.9), shot).text == "Click at (0.90, 0.90)");
}

TEST_CASE("nested elements resolve to the smallest area, ties to the first") {
    auto shot = screen_with({
        element(0.0, 0.0, 1.0, 1.0, "page"),
        element(0.4, 0.4, 0.6, 0.6, "card"),
        element(0.45, 0.45, 0.55, 0.55, "button"),
    });
    CHECK(convert_action(click_at(0.5, 0.5), shot).text == "Click on the element: button");

    auto tie = screen_with({
        element(0.4, 0.4, 0.6, 0.6, "first"),
        element(0.4, 0.4, 0.6, 0.6, "second"),
    });
    CHECK(convert_action(click_at(0.5, 0.5), tie).text == "Click on the element: first");
}

TEST_CASE("non-coordinate conversions use the fixed renderings") {
    auto shot = screen_with({});
    Action a;

    a.kind = ActionKind::OpenApp;
    a.text = "Plantum";
    CHECK(convert_action(a, shot).text == "Open App: Plantum");

    a = Action{};
    a.kind = ActionKind::Type;
    a.text = "succulents";
    CHECK(convert_action(a, shot).text == "Type the text: succulents");

    a = Action{};
    a.kind = ActionKind::Scroll;
    a.direction = ScrollDirection::Down;
    CHECK(convert_action(a, shot).text == "Scroll down");

    for (auto [kind, expected] :
         std::initializer_list<std::pair<ActionKind, const char*>>{
             {ActionKind::NavigateHome, "Return to the home page"},
             {ActionKind::NavigateBack, "Return to the previous page"},
             {ActionKind::Wait, "Wait for response"},
             {ActionKind::Complete, "Check status: successful"},
             {ActionKind::PressRecent, "Press recent apps"},
             {ActionKind::PressEnter, "Press enter"},
             {ActionKind::Impossible, "Mark task infeasible"}}) {
        a = Action{};
        a.kind = kind;
        CHECK(convert_action(a, shot).text == expected);
    }
}

TEST_CASE("template descriptor follows the prompt's example rules") {
    TemplateBackend backend;
    auto shot = screen_with({});

    // open app passes through
    CHECK(describe_step(backend, shot, {"Open App: Plantum", ActionKind::OpenApp}) ==
          "Open App: Plantum");
    // wait collapses to the literal None
    CHECK(describe_step(backend, shot, {"Wait for response", ActionKind::Wait}) == "None");
    // clicks pick up the article-like phrasing (frozen rule)
    CHECK(describe_step(backend, shot, {"Click on the element: cooking", ActionKind::Click}) ==
          "Click on the article-like element: cooking");
    // scrolls grow an exploration suffix
    CHECK(describe_step(backend, shot, {"Scroll down", ActionKind::Scroll}) ==
          "Scroll down to explore more content");
    CHECK(describe_step(backend, shot, {"Press recent apps", ActionKind::PressRecent}) ==
          "Press recent apps to switch to another app");
    CHECK(describe_step(backend, shot, {"Press enter", ActionKind::PressEnter}) ==
          "Press enter to confirm");
    CHECK(describe_step(backend, shot, {"Mark task infeasible", ActionKind::Impossible}) ==
          "Mark the task as infeasible");
    CHECK(describe_step(backend, shot, {"Type the text: hello", ActionKind::Type}) ==
          "Type 'hello' into the input field");
}

TEST_CASE("wait steps return None even if the backend answers otherwise") {
    class Chatty final : public AnnotatorBackend {
    public:
        std::string complete(const std::string&, const std::vector<std::string>&) override {
            return "The user waits patiently";
        }
        std::string name() const override { return "chatty"; }
    };
    Chatty backend;
    CHECK(describe_step(backend, screen_with({}), {"Wait for response", ActionKind::Wait}) ==
          "None");
}

TEST_CASE("template summarizer keeps the app and the topic") {
    TemplateBackend backend;
    std::vector<std::string> lows = {
        "Open App: Plantum",
        "Click on the article-like element: succulents",
        "Scroll down to explore more content",
    };
    auto summary = summarize_episode(backend, lows, {"s1", "s2", "s3"});
    CHECK(summary.find("Plantum") != std::string::npos);
    CHECK(summary.find("succulents") != std::string::npos);

    // degenerate single-step episode: the summary is the normalized low-level
    CHECK(summarize_episode(backend, {"  Open   App: Plantum "}, {"s1"}) == "Open App: Plantum");

    CHECK_THROWS_AS(summarize_episode(backend, {}, {}), ValidationError);
}

TEST_CASE("call accounting per mode") {
    auto ep = generate_episode(7, family_by_name("browse"), 3,
                               ActionSpaceProfile::android_control());
    REQUIRE(ep.step_count() == 3);

    CountingBackend backend;
    auto run = [&](PipelineMode mode) {
        backend.calls = 0;
        auto ann = annotate_episode(backend, ep, mode, ticking_clock());
        CHECK(ann.calls == backend.calls);
        return ann;
    };

    auto aa = run(PipelineMode::AutoAnnotation);
    CHECK(aa.calls == 4);  // n + 1
    CHECK(aa.low_levels.size() == 3);

    auto ao = run(PipelineMode::ActionOrigin);
    CHECK(ao.calls == 0);
    CHECK(ao.low_levels.empty());

    auto vs = run(PipelineMode::VisualSense);
    CHECK(vs.calls == 1);

    auto si = run(PipelineMode::SelfInstruct);
    CHECK(si.calls == 1);

    auto cot = run(PipelineMode::ChainOfThought);
    CHECK(cot.calls == 3);  // n

    // the contract holds for every episode length
    for (int n = 1; n <= 6; ++n) {
        auto episode = generate_episode(100 + static_cast<std::uint64_t>(n),
                                        family_by_name("search"), n,
                                        ActionSpaceProfile::android_control());
        backend.calls = 0;
        annotate_episode(backend, episode, PipelineMode::AutoAnnotation, ticking_clock());
        CHECK(backend.calls == n + 1);
        backend.calls = 0;
        annotate_episode(backend, episode, PipelineMode::ChainOfThought, ticking_clock());
        CHECK(backend.calls == n);
    }
}

TEST_CASE("action origin joins the converted actions verbatim") {
    auto ep = generate_episode(7, family_by_name("browse"), 3,
                               ActionSpaceProfile::android_control());
    TemplateBackend backend;
    auto ann = annotate_episode(backend, ep, PipelineMode::ActionOrigin);

    std::string expected;
    for (std::size_t i = 0; i < ep.steps.size(); ++i) {
        if (i) expected += "; ";
        expected += convert_action(ep.steps[i].action, ep.steps[i].screenshot).text;
    }
    CHECK(ann.high_level == expected);
}

TEST_CASE("template annotation is deterministic") {
    auto ep = generate_episode(19, family_by_name("shopping"), 4,
                               ActionSpaceProfile::android_control());
    TemplateBackend backend;
    auto a = annotate_episode(backend, ep, PipelineMode::AutoAnnotation, ticking_clock());
    auto b = annotate_episode(backend, ep, PipelineMode::AutoAnnotation, ticking_clock());
    CHECK(a.high_level == b.high_level);
    CHECK(a.low_levels == b.low_levels);
    CHECK(a.calls == b.calls);
    CHECK(a.wall_seconds == b.wall_seconds);  // the injected clock is deterministic
}

TEST_CASE("prompts carry the trailing completion cue") {
    CHECK(prompts::step_description("Scroll down").ends_with("The user is trying to:"));
    CHECK(prompts::episode_summary({"a", "b"}).ends_with("The user is trying to:"));
    CHECK(prompts::visual_sense().ends_with("The user is trying to:"));
    CHECK(prompts::chain_of_thought({"a"}, "b").ends_with("The user is trying to:"));
    CHECK(prompts::episode_summary({"first low", "second low"}).find("first low\nsecond low\n") !=
          std::string::npos);
}

TEST_CASE("annotated corpus matches the frozen golden files") {
    // 50 seeded episodes through each pipeline; regenerate the goldens with
    // FEDGUI_UPDATE_GOLDENS=1 after an intentional rule change
    CorpusSpec spec;
    spec.seed = 2024;
    spec.n_episodes = 50;
    spec.law = LengthLaw::uniform(2, 8);
    auto corpus = generate_corpus(spec);

    TemplateBackend backend;
    for (auto [mode, file] : std::initializer_list<std::pair<PipelineMode, const char*>>{
             {PipelineMode::AutoAnnotation, "annotated_auto_annotation.jsonl"},
             {PipelineMode::ActionOrigin, "annotated_action_origin.jsonl"},
             {PipelineMode::ChainOfThought, "annotated_chain_of_thought.jsonl"}}) {
        std::vector<AnnotatedRecord> records;
        auto clock = ticking_clock();
        for (const auto& ep : corpus) {
            records.push_back({ep, annotate_episode(backend, ep, mode, clock)});
        }
        std::string golden_path = std::string(FEDGUI_TEST_GOLDEN_DIR) + "/" + file;
        TempDir tmp("golden");
        save_annotated_jsonl(records, tmp.file(file));
        if (std::getenv("FEDGUI_UPDATE_GOLDENS")) {
            save_annotated_jsonl(records, golden_path);
        }
        INFO("golden file: ", golden_path);
        CHECK(read_file(tmp.file(file)) == read_file(golden_path));
    }
}
