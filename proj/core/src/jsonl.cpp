#include "fedgui/jsonl.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "fedgui/errors.hpp"

namespace fedgui {

using nlohmann::json;

namespace {

const std::set<std::string>& known_episode_keys() {
    static const std::set<std::string> keys = {
        "id", "high_level", "task_family", "steps", "final_screenshot",
        "screen_width", "screen_height",
        // predicted fields of annotated records; recognized so they do not
        // end up duplicated in extra_json
        "pred_high_level", "pred_low_levels", "mode", "backend", "calls", "wall_seconds",
    };
    return keys;
}

json element_to_json(const UiElement& el) {
    json j;
    j["bbox"] = el.bbox;
    if (el.label) j["label"] = *el.label;
    if (el.function) j["function"] = *el.function;
    return j;
}

UiElement element_from_json(const json& j, double sx, double sy) {
    UiElement el;
    const auto& bbox = j.at("bbox");
    if (!bbox.is_array() || bbox.size() != 4) {
        throw ValidationError("field 'bbox' must be an array of 4 numbers");
    }
    el.bbox = {bbox[0].get<double>() / sx, bbox[1].get<double>() / sy,
               bbox[2].get<double>() / sx, bbox[3].get<double>() / sy};
    if (j.contains("label")) el.label = j["label"].get<std::string>();
    if (j.contains("function")) el.function = j["function"].get<std::string>();
    return el;
}

json screenshot_to_json(const Screenshot& s) {
    json j;
    j["screen_id"] = s.screen_id;
    json elements = json::array();
    for (const auto& el : s.elements) elements.push_back(element_to_json(el));
    j["elements"] = std::move(elements);
    j["features"] = s.features;
    return j;
}

Screenshot screenshot_from_json(const json& j, double sx, double sy) {
    Screenshot s;
    s.screen_id = j.value("screen_id", "");
    if (j.contains("elements")) {
        for (const auto& el : j.at("elements")) {
            s.elements.push_back(element_from_json(el, sx, sy));
        }
    }
    if (j.contains("features")) s.features = j.at("features").get<std::vector<double>>();
    return s;
}

json action_to_json(const Action& a) {
    json j;
    j["kind"] = std::string(to_string(a.kind));
    if (a.point) j["point"] = {a.point->x, a.point->y};
    if (a.text) j["text"] = *a.text;
    if (a.direction) j["direction"] = std::string(to_string(*a.direction));
    return j;
}

Action action_from_json(const json& j, double sx, double sy) {
    Action a;
    a.kind = action_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("point")) {
        const auto& p = j["point"];
        if (!p.is_array() || p.size() != 2) {
            throw ValidationError("field 'point' must be an array of 2 numbers");
        }
        a.point = Point{p[0].get<double>() / sx, p[1].get<double>() / sy};
    }
    if (j.contains("text")) a.text = j["text"].get<std::string>();
    if (j.contains("direction")) {
        a.direction = direction_from_string(j["direction"].get<std::string>());
    }
    a.validate();
    return a;
}

json episode_to_json(const Episode& ep) {
    json j = json::object();
    if (!ep.extra_json.empty()) {
        j = json::parse(ep.extra_json);
    }
    j["id"] = ep.id;
    j["high_level"] = ep.high_level;
    j["task_family"] = ep.task_family;
    json steps = json::array();
    for (const auto& step : ep.steps) {
        json s;
        s["screenshot"] = screenshot_to_json(step.screenshot);
        s["action"] = action_to_json(step.action);
        if (step.low_level) s["low_level"] = *step.low_level;
        steps.push_back(std::move(s));
    }
    j["steps"] = std::move(steps);
    if (ep.final_screenshot) j["final_screenshot"] = screenshot_to_json(*ep.final_screenshot);
    return j;
}

Episode episode_from_json(const json& j) {
    Episode ep;
    ep.id = j.value("id", "");
    ep.high_level = j.value("high_level", "");
    ep.task_family = j.value("task_family", "");

    // Pixel-coordinate records declare their screen size; normalized records
    // leave it out and divide by 1.
    double sx = j.value("screen_width", 1.0);
    double sy = j.value("screen_height", 1.0);
    if (sx <= 0.0 || sy <= 0.0) {
        throw ValidationError("fields 'screen_width'/'screen_height' must be positive");
    }

    if (!j.contains("steps") || !j.at("steps").is_array() || j.at("steps").empty()) {
        throw ValidationError("field 'steps' must be a non-empty array");
    }
    std::size_t index = 0;
    for (const auto& s : j.at("steps")) {
        Step step;
        try {
            step.screenshot = screenshot_from_json(s.at("screenshot"), sx, sy);
            step.action = action_from_json(s.at("action"), sx, sy);
        } catch (const json::exception& e) {
            throw ValidationError("step " + std::to_string(index) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError("step " + std::to_string(index) + ": " + e.what());
        }
        if (s.contains("low_level")) step.low_level = s["low_level"].get<std::string>();
        try {
            step.screenshot.validate();
        } catch (const ValidationError& e) {
            throw ValidationError("step " + std::to_string(index) + ": " + e.what());
        }
        if (step.action.kind == ActionKind::Complete && index + 1 != j.at("steps").size()) {
            throw ValidationError("step " + std::to_string(index) +
                                  ": COMPLETE before the last step");
        }
        ep.steps.push_back(std::move(step));
        ++index;
    }
    if (j.contains("final_screenshot")) {
        ep.final_screenshot = screenshot_from_json(j.at("final_screenshot"), sx, sy);
    }

    json extras = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known_episode_keys().count(it.key())) extras[it.key()] = it.value();
    }
    if (!extras.empty()) ep.extra_json = extras.dump();
    return ep;
}

template <typename Fn>
auto load_lines(const std::string& path, Fn&& parse_line) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    std::vector<decltype(parse_line(json{}))> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": malformed JSON: " + e.what());
        }
        try {
            out.push_back(parse_line(j));
        } catch (const ValidationError& e) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const json::exception& e) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

std::string episode_to_json_line(const Episode& ep) { return episode_to_json(ep).dump(); }

Episode episode_from_json_line(const std::string& line) {
    return episode_from_json(json::parse(line));
}

std::vector<Episode> load_jsonl(const std::string& path) {
    return load_lines(path, [](const json& j) { return episode_from_json(j); });
}

void save_jsonl(const std::vector<Episode>& episodes, const std::string& path) {
    auto out = open_out(path);
    for (const auto& ep : episodes) {
        out << episode_to_json(ep).dump() << '\n';
    }
}

std::vector<AnnotatedRecord> load_annotated_jsonl(const std::string& path) {
    return load_lines(path, [](const json& j) {
        AnnotatedRecord rec;
        rec.episode = episode_from_json(j);
        rec.annotation.episode_id = rec.episode.id;
        rec.annotation.high_level = j.value("pred_high_level", "");
        if (j.contains("pred_low_levels")) {
            rec.annotation.low_levels = j["pred_low_levels"].get<std::vector<std::string>>();
        }
        rec.annotation.mode = pipeline_mode_from_string(j.value("mode", "auto_annotation"));
        rec.annotation.backend_name = j.value("backend", "");
        rec.annotation.calls = j.value("calls", 0);
        rec.annotation.wall_seconds = j.value("wall_seconds", 0.0);
        return rec;
    });
}

void save_annotated_jsonl(const std::vector<AnnotatedRecord>& records, const std::string& path) {
    auto out = open_out(path);
    for (const auto& rec : records) {
        json j = episode_to_json(rec.episode);
        j["pred_high_level"] = rec.annotation.high_level;
        if (!rec.annotation.low_levels.empty()) {
            j["pred_low_levels"] = rec.annotation.low_levels;
        }
        j["mode"] = std::string(to_string(rec.annotation.mode));
        j["backend"] = rec.annotation.backend_name;
        j["calls"] = rec.annotation.calls;
        j["wall_seconds"] = rec.annotation.wall_seconds;
        out << j.dump() << '\n';
    }
}

}  // namespace fedgui
