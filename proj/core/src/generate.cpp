#include "fedgui/generate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "fedgui/errors.hpp"

namespace fedgui {

namespace {

const std::vector<std::string>& generic_labels() {
    static const std::vector<std::string> labels = {
        "OK", "Cancel", "Search", "Menu", "Back", "Settings",
        "Profile", "Home", "Next", "Share",
    };
    return labels;
}

std::string hex_id(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

ActionKind sample_kind(const TaskFamily& family, Rng& rng) {
    double total = 0.0;
    for (const auto& [kind, w] : family.kind_weights) {
        if (kind == ActionKind::Complete) continue;  // terminal only
        total += w;
    }
    double r = rng.uniform() * total;
    double acc = 0.0;
    ActionKind last = family.kind_weights.front().first;
    for (const auto& [kind, w] : family.kind_weights) {
        if (kind == ActionKind::Complete) continue;
        acc += w;
        last = kind;
        if (r < acc) return kind;
    }
    return last;
}

Screenshot make_screenshot(Rng& rng, const std::string& target_label, int d) {
    Screenshot shot;
    shot.screen_id = "scr-" + hex_id(rng.next_u64());
    int n_elements = 3 + static_cast<int>(rng.index(4));
    int target_index = static_cast<int>(rng.index(static_cast<std::size_t>(n_elements)));
    for (int i = 0; i < n_elements; ++i) {
        UiElement el;
        double x0 = rng.uniform(0.0, 0.78);
        double y0 = rng.uniform(0.0, 0.86);
        el.bbox = {x0, y0, std::min(1.0, x0 + rng.uniform(0.08, 0.22)),
                   std::min(1.0, y0 + rng.uniform(0.05, 0.12))};
        if (i == target_index && !target_label.empty()) {
            el.label = target_label;
        } else {
            el.label = generic_labels()[rng.index(generic_labels().size())];
        }
        if (rng.bernoulli(0.2)) {
            std::string fn = *el.label;
            for (char& c : fn) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            el.function = "on_" + fn + "_tap";
        }
        shot.elements.push_back(std::move(el));
    }
    shot.features.assign(static_cast<std::size_t>(d), 0.0);
    // Cells 0..1 are filled by the caller with the interaction point; the
    // rest starts as background noise.
    for (int i = 2; i < d; ++i) {
        shot.features[static_cast<std::size_t>(i)] = rng.uniform(-0.25, 0.25);
    }
    return shot;
}

// The synthetic visual embedding encodes what a perception model would take
// from the screen: cells 0..1 the point of interaction, cells 2..13 a noisy
// affordance signature of the action kind, cells 14..15 the scroll axes.
// Everything a linear policy needs is present but jittered.
void set_focus(Screenshot& shot, Point p, Rng& rng) {
    if (shot.features.size() >= 2) {
        shot.features[0] = std::clamp(p.x + rng.uniform(-0.02, 0.02), 0.0, 1.0);
        shot.features[1] = std::clamp(p.y + rng.uniform(-0.02, 0.02), 0.0, 1.0);
    }
}

void set_signature(Screenshot& shot, const Action& a) {
    std::size_t kind_cell = 2 + static_cast<std::size_t>(a.kind);
    if (kind_cell < shot.features.size()) shot.features[kind_cell] += 1.0;
    if (a.direction && shot.features.size() >= 16) {
        shot.features[14] += *a.direction == ScrollDirection::Left
                                 ? -1.0
                                 : (*a.direction == ScrollDirection::Right ? 1.0 : 0.0);
        shot.features[15] += *a.direction == ScrollDirection::Up
                                 ? -1.0
                                 : (*a.direction == ScrollDirection::Down ? 1.0 : 0.0);
    }
}

std::string gold_low_level(const Action& a, const std::string& target_label,
                           const TaskFamily& family) {
    switch (a.kind) {
        case ActionKind::Click: return "Tap on " + target_label;
        case ActionKind::LongPress: return "Press and hold " + target_label;
        case ActionKind::Type: return "Enter '" + *a.text + "' in the field";
        case ActionKind::Scroll: {
            std::string dir{to_string(*a.direction)};
            for (char& c : dir) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            return "Swipe " + dir + " on the page";
        }
        case ActionKind::OpenApp: return "Open " + family.app;
        case ActionKind::NavigateBack: return "Go back to the previous screen";
        case ActionKind::NavigateHome: return "Go to the home screen";
        case ActionKind::Wait: return "Wait for the page to load";
        case ActionKind::Complete: return "Confirm the task is finished";
        case ActionKind::PressRecent: return "Open the recent apps view";
        case ActionKind::PressEnter: return "Press the enter key";
        case ActionKind::Impossible: return "Give up the task";
    }
    return "";
}

}  // namespace

void TaskFamily::validate(const ActionSpaceProfile& profile) const {
    if (keywords.empty()) throw ValidationError("family '" + name + "' has no keywords");
    if (kind_weights.empty()) throw ValidationError("family '" + name + "' has no kind weights");
    double total = 0.0;
    for (const auto& [kind, w] : kind_weights) {
        if (w < 0.0) throw ValidationError("family '" + name + "' has a negative kind weight");
        if (!profile.allows(kind)) {
            throw ValidationError("family '" + name + "' uses kind " +
                                  std::string(to_string(kind)) + " outside profile " +
                                  profile.name);
        }
        if (kind != ActionKind::Complete) total += w;
    }
    if (total <= 0.0) {
        throw ValidationError("family '" + name + "' has no positive non-terminal kind weight");
    }
}

const std::vector<TaskFamily>& builtin_families() {
    static const std::vector<TaskFamily> families = {
        {"browse", "Plantum", "browse articles about",
         {"succulents", "ferns", "orchids", "cacti", "bonsai"},
         {{ActionKind::Click, 0.5}, {ActionKind::Scroll, 0.3}, {ActionKind::Type, 0.1},
          {ActionKind::Wait, 0.1}},
         true, false},
        {"search", "Chrome", "search for",
         {"weather", "recipes", "news", "flights", "hotels"},
         {{ActionKind::Click, 0.4}, {ActionKind::Type, 0.3}, {ActionKind::Scroll, 0.2},
          {ActionKind::NavigateBack, 0.1}},
         true, true},
        {"shopping", "Amazon", "shop for",
         {"sneakers", "headphones", "backpack", "monitor", "kettle"},
         {{ActionKind::Click, 0.5}, {ActionKind::Type, 0.2}, {ActionKind::Scroll, 0.2},
          {ActionKind::LongPress, 0.1}},
         true, true},
        {"messaging", "WhatsApp", "send a message about",
         {"dinner", "meeting", "birthday", "tickets", "weekend"},
         {{ActionKind::Click, 0.5}, {ActionKind::Type, 0.3}, {ActionKind::NavigateBack, 0.1},
          {ActionKind::Wait, 0.1}},
         true, false},
        {"settings", "Settings", "change the option for",
         {"wifi", "bluetooth", "display", "battery", "storage"},
         {{ActionKind::Click, 0.6}, {ActionKind::Scroll, 0.3}, {ActionKind::NavigateBack, 0.1}},
         true, false},
    };
    return families;
}

const TaskFamily& family_by_name(std::string_view name) {
    for (const auto& f : builtin_families()) {
        if (f.name == name) return f;
    }
    std::string known;
    for (const auto& f : builtin_families()) known += (known.empty() ? "" : ", ") + f.name;
    throw ValidationError("unknown task family '" + std::string(name) + "' (known: " + known +
                          ")");
}

std::vector<TaskFamily> families_by_names(const std::vector<std::string>& names) {
    std::vector<TaskFamily> out;
    for (const auto& n : names) out.push_back(family_by_name(n));
    return out;
}

LengthLaw LengthLaw::uniform(int min, int max) {
    LengthLaw law;
    law.kind = Kind::Uniform;
    law.min = min;
    law.max = max;
    return law;
}

LengthLaw LengthLaw::fixed_len(int n) {
    LengthLaw law;
    law.kind = Kind::Fixed;
    law.fixed = n;
    return law;
}

LengthLaw LengthLaw::bimodal(int short_len, int long_len, double short_ratio) {
    LengthLaw law;
    law.kind = Kind::Bimodal;
    law.short_len = short_len;
    law.long_len = long_len;
    law.short_ratio = short_ratio;
    return law;
}

LengthLaw LengthLaw::parse(std::string_view text) {
    auto colon = text.find(':');
    std::string_view head = text.substr(0, colon);
    std::vector<long> nums;
    double ratio = 0.5;
    if (colon != std::string_view::npos) {
        std::string rest{text.substr(colon + 1)};
        std::size_t pos = 0;
        int field = 0;
        while (pos <= rest.size()) {
            std::size_t comma = rest.find(',', pos);
            std::string part = rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                           : comma - pos);
            if (head == "bimodal" && field == 2) {
                ratio = std::strtod(part.c_str(), nullptr);
            } else if (!part.empty()) {
                nums.push_back(std::strtol(part.c_str(), nullptr, 10));
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
            ++field;
        }
    }
    LengthLaw law;
    if (head == "uniform" && nums.size() == 2) {
        law = uniform(static_cast<int>(nums[0]), static_cast<int>(nums[1]));
    } else if (head == "fixed" && nums.size() == 1) {
        law = fixed_len(static_cast<int>(nums[0]));
    } else if (head == "bimodal" && nums.size() == 2) {
        law = bimodal(static_cast<int>(nums[0]), static_cast<int>(nums[1]), ratio);
    } else {
        throw ValidationError("cannot parse length law '" + std::string(text) +
                              "' (expected uniform:MIN,MAX | fixed:N | bimodal:S,L,RATIO)");
    }
    law.validate();
    return law;
}

void LengthLaw::validate() const {
    switch (kind) {
        case Kind::Uniform:
            if (min < 1 || min > max) {
                throw ValidationError("uniform length law needs 1 <= min <= max, got [" +
                                      std::to_string(min) + "," + std::to_string(max) + "]");
            }
            break;
        case Kind::Fixed:
            if (fixed < 1) throw ValidationError("fixed length law needs n >= 1");
            break;
        case Kind::Bimodal:
            if (short_len < 1 || long_len < 1) {
                throw ValidationError("bimodal length law needs positive lengths");
            }
            if (short_ratio < 0.0 || short_ratio > 1.0) {
                throw ValidationError("bimodal ratio must be in [0,1]");
            }
            break;
    }
}

int LengthLaw::sample(Rng& rng) const {
    switch (kind) {
        case Kind::Uniform: return static_cast<int>(rng.uniform_int(min, max));
        case Kind::Fixed: return fixed;
        case Kind::Bimodal: return rng.bernoulli(short_ratio) ? short_len : long_len;
    }
    return fixed;
}

std::string LengthLaw::describe() const {
    char buf[64];
    switch (kind) {
        case Kind::Uniform:
            std::snprintf(buf, sizeof(buf), "uniform:%d,%d", min, max);
            break;
        case Kind::Fixed:
            std::snprintf(buf, sizeof(buf), "fixed:%d", fixed);
            break;
        case Kind::Bimodal:
            std::snprintf(buf, sizeof(buf), "bimodal:%d,%d,%g", short_len, long_len, short_ratio);
            break;
    }
    return buf;
}

Episode generate_episode(std::uint64_t seed, const TaskFamily& family, int n_steps,
                         const ActionSpaceProfile& profile, int d) {
    if (n_steps < 1) throw ValidationError("generate_episode requires n_steps >= 1");
    if (d < 2) throw ValidationError("feature dimension d must be >= 2");
    family.validate(profile);

    Rng rng = Rng::derive(seed, "episode");
    const std::string keyword = family.keywords[rng.index(family.keywords.size())];

    std::vector<ActionKind> plan(static_cast<std::size_t>(n_steps));
    int first_free = 0;
    int last = n_steps;
    if (family.open_app_first && profile.allows(ActionKind::OpenApp)) {
        plan[0] = ActionKind::OpenApp;
        first_free = 1;
    }
    if (family.complete_last && profile.allows(ActionKind::Complete) && last - 1 >= first_free) {
        plan[static_cast<std::size_t>(last - 1)] = ActionKind::Complete;
        --last;
    }
    for (int i = first_free; i < last; ++i) {
        plan[static_cast<std::size_t>(i)] = sample_kind(family, rng);
    }

    Episode ep;
    ep.id = "ep-" + hex_id(seed);
    ep.task_family = family.name;
    ep.high_level = "Open the " + family.app + " app and " + family.verb + " " + keyword;

    for (int i = 0; i < n_steps; ++i) {
        ActionKind kind = plan[static_cast<std::size_t>(i)];
        bool coordinate = kind == ActionKind::Click || kind == ActionKind::LongPress;
        Screenshot shot = make_screenshot(rng, coordinate ? keyword : "", d);

        Action action;
        action.kind = kind;
        std::string target_label;
        Point focus{0.5, 0.5};
        if (coordinate) {
            // Target the element carrying the keyword; the point stays in its bbox.
            std::size_t target = 0;
            for (std::size_t e = 0; e < shot.elements.size(); ++e) {
                if (shot.elements[e].display_name() == keyword) target = e;
            }
            const auto& bbox = shot.elements[target].bbox;
            focus.x = rng.uniform(bbox[0], bbox[2]);
            focus.y = rng.uniform(bbox[1], bbox[3]);
            action.point = focus;
            target_label = shot.elements[target].display_name();
        } else if (kind == ActionKind::Type) {
            action.text = keyword;
            focus = {rng.uniform(0.2, 0.8), rng.uniform(0.1, 0.3)};
        } else if (kind == ActionKind::OpenApp) {
            action.text = family.app;
            focus = {rng.uniform(0.1, 0.9), rng.uniform(0.3, 0.9)};
        } else if (kind == ActionKind::Scroll) {
            action.direction = static_cast<ScrollDirection>(rng.index(4));
            focus = {0.5, *action.direction == ScrollDirection::Up ? 0.25 : 0.75};
        } else {
            focus = {rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)};
        }
        set_focus(shot, focus, rng);
        set_signature(shot, action);

        Step step;
        step.screenshot = std::move(shot);
        step.action = std::move(action);
        step.low_level = gold_low_level(step.action, target_label, family);
        ep.steps.push_back(std::move(step));
    }

    Screenshot last_shot = make_screenshot(rng, "", d);
    set_focus(last_shot, {0.5, 0.5}, rng);
    ep.final_screenshot = std::move(last_shot);

    ep.validate(profile);
    return ep;
}

std::vector<Episode> generate_corpus(const CorpusSpec& spec) {
    if (spec.n_episodes < 1) throw ValidationError("n_episodes must be >= 1");
    spec.law.validate();
    const ActionSpaceProfile& profile = ActionSpaceProfile::by_name(spec.profile);
    std::vector<TaskFamily> families = spec.family_names.empty()
                                           ? builtin_families()
                                           : families_by_names(spec.family_names);
    for (const auto& f : families) f.validate(profile);

    Rng length_rng = Rng::derive(spec.seed, "lengths");
    Rng family_rng = Rng::derive(spec.seed, "family-choice");

    std::vector<Episode> corpus;
    corpus.reserve(static_cast<std::size_t>(spec.n_episodes));
    for (int i = 0; i < spec.n_episodes; ++i) {
        int len = spec.law.sample(length_rng);
        const TaskFamily& family = families[family_rng.index(families.size())];
        std::uint64_t ep_seed = Rng::derive(spec.seed, "episode-seed", static_cast<std::uint64_t>(i))
                                    .next_u64();
        Episode ep = generate_episode(ep_seed, family, len, profile, spec.d);
        char buf[24];
        std::snprintf(buf, sizeof(buf), "ep-%06d", i);
        ep.id = buf;
        corpus.push_back(std::move(ep));
    }
    return corpus;
}

}  // namespace fedgui
