#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "fedgui/annotate.hpp"
#include "fedgui/errors.hpp"
#include "fedgui/generate.hpp"
#include "fedgui/metrics.hpp"
#include "fedgui/rng.hpp"

using namespace fedgui;

namespace {

Action click(double x, double y) {
    Action a;
    a.kind = ActionKind::Click;
    a.point = Point{x, y};
    return a;
}

Action scroll(ScrollDirection d) {
    Action a;
    a.kind = ActionKind::Scroll;
    a.direction = d;
    return a;
}

Action typed(const std::string& text) {
    Action a;
    a.kind = ActionKind::Type;
    a.text = text;
    return a;
}

Action bare(ActionKind kind) {
    Action a;
    a.kind = kind;
    return a;
}

}  // namespace

TEST_CASE("click within 14% of screen width counts as grounded") {
    auto m = match_action(click(0.50, 0.50), click(0.60, 0.50));
    CHECK(m.type_ok);
    REQUIRE(m.ground_ok.has_value());
    CHECK(*m.ground_ok);
    CHECK(m.sr_ok);
}

TEST_CASE("click outside the threshold fails grounding and SR") {
    auto m = match_action(click(0.50, 0.50), click(0.65, 0.50));
    CHECK(m.type_ok);
    CHECK_FALSE(*m.ground_ok);
    CHECK_FALSE(m.sr_ok);
}

TEST_CASE("scroll direction must match exactly") {
    auto m = match_action(scroll(ScrollDirection::Up), scroll(ScrollDirection::Down));
    CHECK(m.type_ok);
    CHECK_FALSE(m.ground_ok.has_value());
    CHECK_FALSE(m.sr_ok);
    CHECK(match_action(scroll(ScrollDirection::Up), scroll(ScrollDirection::Up)).sr_ok);
}

TEST_CASE("typed text is scored by token F1 above one half") {
    auto m = match_action(typed("shanghai shopping mall"), typed("shanghai mall"));
    CHECK(m.type_ok);
    CHECK_FALSE(m.ground_ok.has_value());
    CHECK(m.sr_ok);  // F1 = 0.8

    // F1 of exactly 0.5 must fail: ">" is strict
    CHECK(token_f1("a", "a b c") == doctest::Approx(0.5));
    CHECK_FALSE(match_action(typed("a"), typed("a b c")).sr_ok);
}

TEST_CASE("grounding is scored independently of the predicted kind") {
    // wrong kind, but the point is close: Type misses, Ground hits
    auto m = match_action(click(0.5, 0.5), Action{ActionKind::LongPress, Point{0.52, 0.5},
                                                  std::nullopt, std::nullopt});
    CHECK_FALSE(m.type_ok);
    REQUIRE(m.ground_ok.has_value());
    CHECK(*m.ground_ok);
    CHECK_FALSE(m.sr_ok);

    // prediction with no point at all can never ground
    auto n = match_action(bare(ActionKind::Wait), click(0.5, 0.5));
    REQUIRE(n.ground_ok.has_value());
    CHECK_FALSE(*n.ground_ok);
}

TEST_CASE("argument-free kinds need only the kind to match") {
    CHECK(match_action(bare(ActionKind::NavigateBack), bare(ActionKind::NavigateBack)).sr_ok);
    CHECK_FALSE(match_action(bare(ActionKind::NavigateHome), bare(ActionKind::NavigateBack)).sr_ok);
}

TEST_CASE("compute_metrics aggregates the three counters") {
    std::vector<StepMatch> all_good(4, StepMatch{true, true, true});
    auto r = compute_metrics(all_good);
    CHECK(r.type_acc == 1.0);
    CHECK(*r.ground_acc == 1.0);
    CHECK(r.sr == 1.0);

    // one correct CLICK, one wrong-kind WAIT
    std::vector<StepMatch> mixed = {
        match_action(click(0.5, 0.5), click(0.5, 0.5)),
        match_action(bare(ActionKind::NavigateHome), bare(ActionKind::Wait)),
    };
    auto m = compute_metrics(mixed);
    CHECK(m.type_acc == doctest::Approx(0.5));
    CHECK(*m.ground_acc == doctest::Approx(1.0));
    CHECK(m.sr == doctest::Approx(0.5));
    CHECK(m.n_steps == 2);
    CHECK(m.n_coord_steps == 1);

    CHECK_THROWS_AS(compute_metrics({}), ValidationError);
    std::vector<StepMatch> no_coords = {match_action(bare(ActionKind::Wait), bare(ActionKind::Wait))};
    CHECK_FALSE(compute_metrics(no_coords).ground_acc.has_value());
}

TEST_CASE("metrics equal an exhaustive enumeration oracle") {
    // micro space: CLICK on a 3x3 grid, SCROLL x4, COMPLETE -> 14 actions, 196 pairs
    std::vector<Action> actions;
    const double grid[3] = {0.25, 0.5, 0.75};
    for (double x : grid) {
        for (double y : grid) actions.push_back(click(x, y));
    }
    for (int d = 0; d < 4; ++d) actions.push_back(scroll(static_cast<ScrollDirection>(d)));
    actions.push_back(bare(ActionKind::Complete));
    REQUIRE(actions.size() * actions.size() <= 200);

    // oracle: direct transcription of the matching rules, written separately
    std::size_t oracle_type = 0, oracle_sr = 0, oracle_ground = 0, oracle_coord = 0;
    std::vector<StepMatch> matches;
    for (const auto& gold : actions) {
        for (const auto& pred : actions) {
            bool type_ok = pred.kind == gold.kind;
            oracle_type += type_ok;
            if (gold.kind == ActionKind::Click) {
                oracle_coord++;
                bool near = false;
                if (pred.point) {
                    double dx = pred.point->x - gold.point->x;
                    double dy = pred.point->y - gold.point->y;
                    near = dx * dx + dy * dy <= 0.14 * 0.14;
                }
                oracle_ground += near;
                oracle_sr += type_ok && near;
            } else if (gold.kind == ActionKind::Scroll) {
                oracle_sr += type_ok && pred.direction && *pred.direction == *gold.direction;
            } else {
                oracle_sr += type_ok;
            }
            matches.push_back(match_action(pred, gold));
        }
    }

    auto r = compute_metrics(matches);
    const double n = static_cast<double>(matches.size());
    CHECK(r.type_acc == doctest::Approx(static_cast<double>(oracle_type) / n).epsilon(1e-12));
    CHECK(r.sr == doctest::Approx(static_cast<double>(oracle_sr) / n).epsilon(1e-12));
    CHECK(r.n_coord_steps == oracle_coord);
    CHECK(*r.ground_acc ==
          doctest::Approx(static_cast<double>(oracle_ground) / static_cast<double>(oracle_coord))
              .epsilon(1e-12));
}

TEST_CASE("sr implies type over fuzzed action pairs") {
    Rng rng(99);
    auto random_action = [&]() {
        const auto& kinds = ActionSpaceProfile::android_control().allowed;
        Action a;
        a.kind = kinds[rng.index(kinds.size())];
        if (a.carries_point()) a.point = Point{rng.uniform(), rng.uniform()};
        if (a.carries_text()) a.text = rng.bernoulli(0.5) ? "alpha beta" : "gamma";
        if (a.kind == ActionKind::Scroll) {
            a.direction = static_cast<ScrollDirection>(rng.index(4));
        }
        return a;
    };
    for (int i = 0; i < 2000; ++i) {
        Action pred = random_action(), gold = random_action();
        auto m = match_action(pred, gold);
        if (m.sr_ok) CHECK(m.type_ok);
        if (m.sr_ok && m.ground_ok.has_value()) CHECK(*m.ground_ok);
    }
}

TEST_CASE("token F1 basics") {
    CHECK(token_f1("open chrome", "open chrome") == 1.0);
    CHECK(token_f1("alpha beta", "gamma delta") == 0.0);
    CHECK(token_f1("open chrome app", "open chrome") == doctest::Approx(0.8));
    CHECK(token_f1("", "") == 1.0);
    CHECK(token_f1("", "x") == 0.0);
    Rng rng(3);
    const char* words[] = {"a", "b", "c", "d"};
    for (int i = 0; i < 200; ++i) {
        std::string s, t;
        for (int w = 0; w < 4; ++w) {
            if (rng.bernoulli(0.6)) s += std::string(words[rng.index(4)]) + " ";
            if (rng.bernoulli(0.6)) t += std::string(words[rng.index(4)]) + " ";
        }
        CHECK(token_f1(s, t) == doctest::Approx(token_f1(t, s)));
    }
}

TEST_CASE("bleu and rouge pinned cases") {
    CHECK(bleu("open the plantum app", "open the plantum app") == doctest::Approx(1.0));
    CHECK(bleu("hi", "hi") == doctest::Approx(1.0));
    CHECK(bleu("", "anything") == 0.0);
    CHECK_THROWS_AS(bleu("x", ""), ValidationError);

    auto r = rouge("the cat sat", "the cat");
    CHECK(r.rougeL.precision == doctest::Approx(2.0 / 3.0));
    CHECK(r.rougeL.recall == doctest::Approx(1.0));
    CHECK(r.rougeL.f1 == doctest::Approx(0.8));
    CHECK(rouge("same words here", "same words here").rougeL.f1 == doctest::Approx(1.0));
    CHECK(rouge("", "ref").rouge1.f1 == 0.0);
}

// Independent reference scorer: same published definitions, written naively
// against std::istringstream, used only to cross-check the real one.
namespace reference {

std::vector<std::string> split(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) {
        for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(w);
    }
    return out;
}

double bleu(const std::string& cand_s, const std::string& ref_s) {
    auto cand = split(cand_s), ref = split(ref_s);
    if (cand.empty()) return 0.0;
    double logs = 0.0;
    for (int n = 1; n <= 4; ++n) {
        std::map<std::string, int> cg, rg;
        for (int i = 0; i + n <= static_cast<int>(cand.size()); ++i) {
            std::string g;
            for (int j = 0; j < n; ++j) g += cand[static_cast<std::size_t>(i + j)] + "\x1f";
            cg[g]++;
        }
        for (int i = 0; i + n <= static_cast<int>(ref.size()); ++i) {
            std::string g;
            for (int j = 0; j < n; ++j) g += ref[static_cast<std::size_t>(i + j)] + "\x1f";
            rg[g]++;
        }
        int total = 0, match = 0;
        for (auto& [g, c] : cg) {
            total += c;
            match += std::min(c, rg.count(g) ? rg[g] : 0);
        }
        double p;
        if (total == 0) {
            p = 1.0;
        } else if (match == 0 && n >= 2) {
            p = 1.0 / (total + 1.0);
        } else if (match == 0) {
            return 0.0;
        } else {
            p = static_cast<double>(match) / total;
        }
        logs += std::log(p) / 4.0;
    }
    double bp = cand.size() >= ref.size()
                    ? 1.0
                    : std::exp(1.0 - static_cast<double>(ref.size()) / cand.size());
    return bp * std::exp(logs);
}

double rouge_l_f1(const std::string& cand_s, const std::string& ref_s) {
    auto a = split(cand_s), b = split(ref_s);
    if (a.empty() || b.empty()) return 0.0;
    std::vector<std::vector<int>> dp(a.size() + 1, std::vector<int>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                            : std::max(dp[i - 1][j], dp[i][j - 1]);
        }
    }
    double lcs = dp[a.size()][b.size()];
    double p = lcs / a.size(), r = lcs / b.size();
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

}  // namespace reference

TEST_CASE("quality scores agree with an independent reference scorer") {
    // ten template-annotated episodes scored against their gold instructions
    CorpusSpec spec;
    spec.seed = 21;
    spec.n_episodes = 10;
    spec.law = LengthLaw::uniform(2, 6);
    auto corpus = generate_corpus(spec);
    TemplateBackend backend;
    for (const auto& ep : corpus) {
        auto ann = annotate_episode(backend, ep, PipelineMode::AutoAnnotation);
        CHECK(bleu(ann.high_level, ep.high_level) ==
              doctest::Approx(reference::bleu(ann.high_level, ep.high_level)).epsilon(1e-6));
        CHECK(rouge(ann.high_level, ep.high_level).rougeL.f1 ==
              doctest::Approx(reference::rouge_l_f1(ann.high_level, ep.high_level))
                  .epsilon(1e-6));
    }
}

TEST_CASE("quality scores stay within [0,1]") {
    std::vector<std::string> corpus = {"open the app", "search for news",
                                       "scroll the page down", "type hello world"};
    for (const auto& a : corpus) {
        for (const auto& b : corpus) {
            auto q = text_quality(corpus, a, b);
            CHECK(q.bleu >= 0.0);
            CHECK(q.bleu <= 1.0 + 1e-12);
            CHECK(q.tfidf_cosine >= 0.0);
            CHECK(q.tfidf_cosine <= 1.0 + 1e-12);
            for (auto s : {q.rouge.rouge1, q.rouge.rouge2, q.rouge.rougeL}) {
                CHECK(s.f1 >= 0.0);
                CHECK(s.f1 <= 1.0 + 1e-12);
            }
            if (a == b) {
                CHECK(q.bleu == doctest::Approx(1.0));
                CHECK(q.rouge.rougeL.f1 == doctest::Approx(1.0));
                CHECK(q.tfidf_cosine == doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("annotation cost reproduces the published backend rows") {
    // price covers the two-GPU pool, memory in MB, output in cents
    const double price = 0.5714, total_mb = 49152.0;
    struct Row {
        double seconds, used_mb, cents;
    };
    for (auto [seconds, used, cents] : {Row{1577, 12046, 6.14},   // Qwen2-VL-2B, PyTorch
                                        Row{2005, 25881, 16.77},  // Qwen2-VL-7B
                                        Row{2245, 31960, 23.18}}) {  // InternVL2-8B
        double got = annotation_cost_cents({price, seconds, used, total_mb});
        CHECK(std::abs(got - cents) / cents < 0.01);
    }
}

TEST_CASE("annotation cost trivial and linearity checks") {
    CHECK(annotation_cost_cents({1.0, 3600.0, 512.0, 512.0}) == doctest::Approx(100.0));
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        CostInputs in;
        in.price_per_hour = rng.uniform(0.1, 3.0);
        in.seconds = rng.uniform(10.0, 5000.0);
        in.mem_total_mb = rng.uniform(8192.0, 65536.0);
        in.mem_used_mb = rng.uniform(1.0, in.mem_total_mb / 2.0);
        double base = annotation_cost_cents(in);
        CostInputs twice_time = in;
        twice_time.seconds *= 2.0;
        CHECK(annotation_cost_cents(twice_time) == doctest::Approx(2.0 * base));
        CostInputs twice_mem = in;
        twice_mem.mem_used_mb *= 2.0;
        CHECK(annotation_cost_cents(twice_mem) == doctest::Approx(2.0 * base));
    }
    CHECK_THROWS_AS(annotation_cost_cents({1.0, 10.0, 2.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(annotation_cost_cents({1.0, 10.0, 20.0, 10.0}), ValidationError);
}
