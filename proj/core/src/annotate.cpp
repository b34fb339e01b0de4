#include "fedgui/annotate.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fedgui/errors.hpp"
#include "fedgui/prompts.hpp"

namespace fedgui {

using nlohmann::json;

std::string_view to_string(PipelineMode mode) {
    switch (mode) {
        case PipelineMode::AutoAnnotation: return "auto_annotation";
        case PipelineMode::ActionOrigin: return "action_origin";
        case PipelineMode::VisualSense: return "visual_sense";
        case PipelineMode::SelfInstruct: return "self_instruct";
        case PipelineMode::ChainOfThought: return "chain_of_thought";
    }
    return "auto_annotation";
}

PipelineMode pipeline_mode_from_string(std::string_view s) {
    for (int i = 0; i <= static_cast<int>(PipelineMode::ChainOfThought); ++i) {
        auto m = static_cast<PipelineMode>(i);
        if (to_string(m) == s) return m;
    }
    throw ValidationError("unknown pipeline mode '" + std::string(s) +
                          "' (expected auto_annotation, action_origin, visual_sense, "
                          "self_instruct, chain_of_thought)");
}

ConvertedAction convert_action(const Action& action, const Screenshot& screenshot) {
    action.validate();
    ConvertedAction out;
    out.source_kind = action.kind;
    switch (action.kind) {
        case ActionKind::Click:
        case ActionKind::LongPress: {
            const char* verb = action.kind == ActionKind::Click ? "Click" : "Long press";
            const UiElement* hit = nullptr;
            for (const auto& el : screenshot.elements) {
                if (!el.contains(*action.point)) continue;
                if (!hit || el.area() < hit->area()) hit = &el;  // ties keep the earlier element
            }
            if (hit) {
                out.text = std::string(verb) + " on the element: " + hit->display_name();
            } else {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%s at (%.2f, %.2f)", verb, action.point->x,
                              action.point->y);
                out.text = buf;
            }
            break;
        }
        case ActionKind::Type:
            out.text = "Type the text: " + *action.text;
            break;
        case ActionKind::Scroll: {
            std::string dir{to_string(*action.direction)};
            for (char& c : dir) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            out.text = "Scroll " + dir;
            break;
        }
        case ActionKind::OpenApp:
            out.text = "Open App: " + *action.text;
            break;
        case ActionKind::NavigateHome:
            out.text = "Return to the home page";
            break;
        case ActionKind::NavigateBack:
            out.text = "Return to the previous page";
            break;
        case ActionKind::Wait:
            out.text = "Wait for response";
            break;
        case ActionKind::Complete:
            out.text = "Check status: successful";
            break;
        case ActionKind::PressRecent:
            out.text = "Press recent apps";
            break;
        case ActionKind::PressEnter:
            out.text = "Press enter";
            break;
        case ActionKind::Impossible:
            out.text = "Mark task infeasible";
            break;
    }
    return out;
}

namespace {

std::string normalize_ws(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!out.empty()) pending_space = true;
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

/// Extracts the lines of `section` (e.g. "## History") up to the next "## ".
std::vector<std::string> section_lines(std::string_view prompt, std::string_view section) {
    std::vector<std::string> lines;
    std::size_t at = prompt.find(section);
    if (at == std::string_view::npos) return lines;
    at += section.size();
    while (at < prompt.size()) {
        std::size_t eol = prompt.find('\n', at);
        if (eol == std::string_view::npos) eol = prompt.size();
        std::string_view line = prompt.substr(at, eol - at);
        if (starts_with(line, "## ")) break;
        if (!line.empty()) lines.emplace_back(line);
        at = eol + 1;
    }
    return lines;
}

/// How the offline Descriptor reads a converted action. Mirrors the example
/// block of the step prompt: open-app passthrough, wait collapses to None.
std::string template_describe(std::string_view action) {
    if (starts_with(action, "Open App: ")) return std::string(action);
    if (action == "Wait for response") return "None";
    if (action == "Check status: successful") return "Check if the task is finished";
    if (starts_with(action, "Click on the element: ")) {
        return "Click on the article-like element: " +
               std::string(action.substr(std::string_view("Click on the element: ").size()));
    }
    if (starts_with(action, "Long press on the element: ")) {
        return "Press and hold the element: " +
               std::string(action.substr(std::string_view("Long press on the element: ").size()));
    }
    if (starts_with(action, "Click at ")) {
        return "Click at the position " +
               std::string(action.substr(std::string_view("Click at ").size()));
    }
    if (starts_with(action, "Long press at ")) {
        return "Press and hold the position " +
               std::string(action.substr(std::string_view("Long press at ").size()));
    }
    if (starts_with(action, "Type the text: ")) {
        return "Type '" + std::string(action.substr(std::string_view("Type the text: ").size())) +
               "' into the input field";
    }
    if (starts_with(action, "Scroll ")) {
        return std::string(action) + " to explore more content";
    }
    if (action == "Press recent apps") return "Press recent apps to switch to another app";
    if (action == "Press enter") return "Press enter to confirm";
    if (action == "Mark task infeasible") return "Mark the task as infeasible";
    return std::string(action);  // home/back and anything unrecognized pass through
}

/// Offline Summarizer: pull the app from an open-app line and a topic from
/// typed text or a named element, then phrase one sentence.
std::string template_summarize(const std::vector<std::string>& lows) {
    if (lows.size() == 1) return normalize_ws(lows.front());

    std::string app;
    std::string topic;
    for (const auto& raw : lows) {
        std::string low = normalize_ws(raw);
        if (low == "None") continue;
        if (app.empty() && starts_with(low, "Open App: ")) {
            app = low.substr(std::string_view("Open App: ").size());
        }
        if (topic.empty()) {
            auto quote = low.find('\'');
            if (quote != std::string::npos) {
                auto close = low.find('\'', quote + 1);
                if (close != std::string::npos) topic = low.substr(quote + 1, close - quote - 1);
            }
        }
        if (topic.empty()) {
            auto marker = low.find("element: ");
            if (marker != std::string::npos) {
                topic = low.substr(marker + std::string_view("element: ").size());
            }
        }
    }
    if (!app.empty() && !topic.empty()) {
        return "Use the " + app + " app to work with " + topic;
    }
    if (!app.empty()) return "Use the " + app + " app to complete a task";
    if (!topic.empty()) return "Complete a task involving " + topic;
    return "Complete a multi-step task on the phone";
}

}  // namespace

std::string TemplateBackend::complete(const std::string& prompt,
                                      const std::vector<std::string>& images) {
    if (prompt.find("infer the specific goal") != std::string::npos) {
        auto lines = section_lines(prompt, "## User Action\n");
        return template_describe(lines.empty() ? "" : lines.front());
    }
    if (prompt.find("The full sequence of user actions") != std::string::npos) {
        return template_summarize(section_lines(prompt, "## History\n"));
    }
    if (prompt.find("concatenated horizontally") != std::string::npos) {
        return "Complete a task across " + std::to_string(images.size()) + " screens";
    }
    if (prompt.find("think step by step") != std::string::npos) {
        auto history = section_lines(prompt, "## History\n");
        auto action = section_lines(prompt, "## User Action\n");
        std::string now = template_describe(action.empty() ? "" : action.front());
        if (history.empty()) return now;
        return now + ", after " + std::to_string(history.size()) + " earlier steps";
    }
    throw ValidationError("template backend got an unrecognized prompt");
}

struct RemoteBackend::Impl {
    Options options;
    std::string host;
    httplib::Client client;

    explicit Impl(Options opts, const std::string& url) : options(std::move(opts)), client(url) {
        auto secs = static_cast<time_t>(options.timeout_seconds);
        auto usecs = static_cast<time_t>((options.timeout_seconds - static_cast<double>(secs)) *
                                         1e6);
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        client.set_write_timeout(secs, usecs);
    }
};

RemoteBackend::RemoteBackend(Options options) {
    std::string url = options.base_url;
    impl_ = std::make_unique<Impl>(std::move(options), url);
}

RemoteBackend::~RemoteBackend() = default;

std::string RemoteBackend::complete(const std::string& prompt,
                                    const std::vector<std::string>& images) {
    json body;
    body["prompt"] = prompt;
    body["images"] = images;
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= impl_->options.retries; ++attempt) {
        auto res = impl_->client.Post("/complete", payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "server returned status " + std::to_string(res->status);
            continue;
        }
        try {
            json parsed = json::parse(res->body);
            return parsed.at("text").get<std::string>();
        } catch (const json::exception& e) {
            last_error = std::string("malformed response: ") + e.what();
        }
    }
    throw std::runtime_error("remote backend " + impl_->options.base_url + ": " + last_error);
}

std::string describe_step(AnnotatorBackend& backend, const Screenshot& screenshot,
                          const ConvertedAction& converted) {
    std::string result =
        backend.complete(prompts::step_description(converted.text), {screenshot.screen_id});
    // the template dictates None for wait steps regardless of the model
    if (converted.source_kind == ActionKind::Wait) return "None";
    return result;
}

std::string summarize_episode(AnnotatorBackend& backend,
                              const std::vector<std::string>& low_levels,
                              const std::vector<std::string>& screenshot_refs) {
    if (low_levels.empty()) {
        throw ValidationError("summarize_episode needs at least one low-level instruction");
    }
    return backend.complete(prompts::episode_summary(low_levels), screenshot_refs);
}

AnnotatedEpisode annotate_episode(AnnotatorBackend& backend, const Episode& episode,
                                  PipelineMode mode, AnnotationClock clock) {
    if (episode.steps.empty()) throw ValidationError("cannot annotate an empty episode");
    if (!clock) {
        clock = [] {
            return std::chrono::duration<double>(
                       std::chrono::steady_clock::now().time_since_epoch())
                .count();
        };
    }
    const double t0 = clock();

    AnnotatedEpisode out;
    out.episode_id = episode.id;
    out.mode = mode;
    out.backend_name = backend.name();

    std::vector<ConvertedAction> converted;
    std::vector<std::string> refs;
    for (const auto& step : episode.steps) {
        converted.push_back(convert_action(step.action, step.screenshot));
        refs.push_back(step.screenshot.screen_id);
    }
    if (episode.final_screenshot) refs.push_back(episode.final_screenshot->screen_id);

    auto fail_context = [&](std::size_t step, const std::exception& e) {
        return std::runtime_error("episode '" + episode.id + "' mode " +
                                  std::string(to_string(mode)) + ", step " +
                                  std::to_string(step) + ": " + e.what());
    };

    switch (mode) {
        case PipelineMode::AutoAnnotation: {
            for (std::size_t i = 0; i < episode.steps.size(); ++i) {
                try {
                    out.low_levels.push_back(
                        describe_step(backend, episode.steps[i].screenshot, converted[i]));
                } catch (const ValidationError&) {
                    throw;
                } catch (const std::exception& e) {
                    throw fail_context(i, e);
                }
                out.calls++;
            }
            try {
                out.high_level = summarize_episode(backend, out.low_levels, refs);
            } catch (const ValidationError&) {
                throw;
            } catch (const std::exception& e) {
                throw fail_context(episode.steps.size(), e);
            }
            out.calls++;
            break;
        }
        case PipelineMode::ActionOrigin: {
            std::string joined;
            for (std::size_t i = 0; i < converted.size(); ++i) {
                if (i) joined += "; ";
                joined += converted[i].text;
            }
            out.high_level = joined;
            break;
        }
        case PipelineMode::VisualSense: {
            try {
                out.high_level = backend.complete(prompts::visual_sense(), refs);
            } catch (const std::exception& e) {
                throw fail_context(0, e);
            }
            out.calls = 1;
            break;
        }
        case PipelineMode::SelfInstruct: {
            std::vector<std::string> actions;
            for (const auto& c : converted) actions.push_back(c.text);
            try {
                out.high_level = backend.complete(prompts::episode_summary(actions), {});
            } catch (const std::exception& e) {
                throw fail_context(0, e);
            }
            out.calls = 1;
            break;
        }
        case PipelineMode::ChainOfThought: {
            std::vector<std::string> history;
            std::string latest;
            for (std::size_t i = 0; i < episode.steps.size(); ++i) {
                try {
                    latest = backend.complete(
                        prompts::chain_of_thought(history, converted[i].text),
                        {episode.steps[i].screenshot.screen_id});
                } catch (const std::exception& e) {
                    throw fail_context(i, e);
                }
                history.push_back(latest);
                out.calls++;
            }
            out.high_level = latest;
            break;
        }
    }

    out.wall_seconds = clock() - t0;
    return out;
}

}  // namespace fedgui
