#include "fedgui/episode.hpp"

#include <cmath>

#include "fedgui/errors.hpp"

namespace fedgui {

const std::string& UiElement::display_name() const {
    if (label && !label->empty()) return *label;
    if (function) return *function;
    static const std::string empty;
    return empty;
}

void UiElement::validate() const {
    if (!(bbox[0] >= 0.0 && bbox[0] <= bbox[2] && bbox[2] <= 1.0 &&
          bbox[1] >= 0.0 && bbox[1] <= bbox[3] && bbox[3] <= 1.0)) {
        throw ValidationError("element bbox not ordered within normalized [0,1]");
    }
    if (!label && !function) {
        throw ValidationError("element needs at least one of 'label' or 'function'");
    }
}

void Screenshot::validate() const {
    for (double f : features) {
        if (!std::isfinite(f)) {
            throw ValidationError("screenshot '" + screen_id + "' has non-finite feature");
        }
    }
    for (const auto& el : elements) el.validate();
}

std::size_t Episode::total_elements() const {
    std::size_t n = 0;
    for (const auto& s : steps) n += s.screenshot.elements.size();
    return n;
}

void Episode::validate(const ActionSpaceProfile& profile) const {
    if (steps.empty()) {
        throw ValidationError("episode '" + id + "' has no steps");
    }
    std::size_t d = steps.front().screenshot.features.size();
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Step& step = steps[i];
        try {
            step.action.validate();
            step.screenshot.validate();
        } catch (const ValidationError& e) {
            throw ValidationError("episode '" + id + "' step " + std::to_string(i) + ": " +
                                  e.what());
        }
        if (!profile.allows(step.action.kind)) {
            throw ValidationError("episode '" + id + "' step " + std::to_string(i) + ": kind " +
                                  std::string(to_string(step.action.kind)) +
                                  " not in profile " + profile.name);
        }
        if (step.action.kind == ActionKind::Complete && i + 1 != steps.size()) {
            throw ValidationError("episode '" + id + "' step " + std::to_string(i) +
                                  ": COMPLETE before the last step");
        }
        if (step.screenshot.features.size() != d) {
            throw ValidationError("episode '" + id + "' step " + std::to_string(i) +
                                  ": feature length differs from step 0");
        }
    }
    if (final_screenshot) final_screenshot->validate();
}

std::size_t total_steps(const std::vector<Episode>& episodes) {
    std::size_t n = 0;
    for (const auto& e : episodes) n += e.step_count();
    return n;
}

}  // namespace fedgui
