#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fedgui/action.hpp"

namespace fedgui {

struct UiElement {
    /// x_min, y_min, x_max, y_max in normalized screen units.
    std::array<double, 4> bbox{0, 0, 0, 0};
    std::optional<std::string> label;
    std::optional<std::string> function;

    bool contains(Point p) const {
        return p.x >= bbox[0] && p.x <= bbox[2] && p.y >= bbox[1] && p.y <= bbox[3];
    }
    double area() const { return (bbox[2] - bbox[0]) * (bbox[3] - bbox[1]); }

    /// Label if present, else function name. Never empty after validate().
    const std::string& display_name() const;

    void validate() const;
};

/// What the agent "sees": the accessibility-tree stand-in plus a fixed-length
/// synthetic visual embedding. No pixels anywhere in the toolkit.
struct Screenshot {
    std::string screen_id;
    std::vector<UiElement> elements;
    std::vector<double> features;

    void validate() const;  // finite features, valid elements
};

struct Step {
    Screenshot screenshot;
    Action action;
    std::optional<std::string> low_level;
};

struct Episode {
    std::string id;
    std::string high_level;
    std::string task_family;
    std::vector<Step> steps;
    std::optional<Screenshot> final_screenshot;
    /// Unrecognized top-level JSON fields, kept verbatim so external records
    /// survive a load/save round trip. Empty or a serialized JSON object.
    std::string extra_json;

    std::size_t step_count() const { return steps.size(); }
    std::size_t total_elements() const;

    /// Structural invariants: non-empty steps, COMPLETE only terminal,
    /// per-action argument tables, kinds within `profile`.
    void validate(const ActionSpaceProfile& profile) const;
};

std::size_t total_steps(const std::vector<Episode>& episodes);

}  // namespace fedgui
