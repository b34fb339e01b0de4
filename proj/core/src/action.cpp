#include "fedgui/action.hpp"

#include <algorithm>

#include "fedgui/errors.hpp"

namespace fedgui {

bool Action::carries_point() const {
    return kind == ActionKind::Click || kind == ActionKind::LongPress;
}

bool Action::carries_text() const {
    return kind == ActionKind::Type || kind == ActionKind::OpenApp;
}

void Action::validate() const {
    const std::string k{to_string(kind)};
    if (carries_point() != point.has_value()) {
        throw ValidationError("action " + k + (point ? " must not carry field 'point'"
                                                     : " is missing field 'point'"));
    }
    if (carries_text() != text.has_value()) {
        throw ValidationError("action " + k + (text ? " must not carry field 'text'"
                                                    : " is missing field 'text'"));
    }
    if ((kind == ActionKind::Scroll) != direction.has_value()) {
        throw ValidationError("action " + k + (direction ? " must not carry field 'direction'"
                                                         : " is missing field 'direction'"));
    }
    if (point) {
        if (point->x < 0.0 || point->x > 1.0 || point->y < 0.0 || point->y > 1.0) {
            throw ValidationError("action " + k + " field 'point' outside normalized [0,1]");
        }
    }
}

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::Click: return "CLICK";
        case ActionKind::Type: return "TYPE";
        case ActionKind::Scroll: return "SCROLL";
        case ActionKind::LongPress: return "LONG_PRESS";
        case ActionKind::NavigateBack: return "NAVIGATE_BACK";
        case ActionKind::NavigateHome: return "NAVIGATE_HOME";
        case ActionKind::OpenApp: return "OPEN_APP";
        case ActionKind::Wait: return "WAIT";
        case ActionKind::Complete: return "COMPLETE";
        case ActionKind::PressRecent: return "PRESS_RECENT";
        case ActionKind::PressEnter: return "PRESS_ENTER";
        case ActionKind::Impossible: return "IMPOSSIBLE";
    }
    return "CLICK";
}

ActionKind action_kind_from_string(std::string_view s) {
    for (int i = 0; i < kActionKindCount; ++i) {
        auto k = static_cast<ActionKind>(i);
        if (to_string(k) == s) return k;
    }
    throw ValidationError("unknown action kind '" + std::string(s) + "'");
}

std::string_view to_string(ScrollDirection d) {
    switch (d) {
        case ScrollDirection::Up: return "UP";
        case ScrollDirection::Down: return "DOWN";
        case ScrollDirection::Left: return "LEFT";
        case ScrollDirection::Right: return "RIGHT";
    }
    return "UP";
}

ScrollDirection direction_from_string(std::string_view s) {
    if (s == "UP") return ScrollDirection::Up;
    if (s == "DOWN") return ScrollDirection::Down;
    if (s == "LEFT") return ScrollDirection::Left;
    if (s == "RIGHT") return ScrollDirection::Right;
    throw ValidationError("unknown scroll direction '" + std::string(s) + "'");
}

bool ActionSpaceProfile::allows(ActionKind k) const {
    return std::find(allowed.begin(), allowed.end(), k) != allowed.end();
}

int ActionSpaceProfile::kind_index(ActionKind k) const {
    auto it = std::find(allowed.begin(), allowed.end(), k);
    return it == allowed.end() ? -1 : static_cast<int>(it - allowed.begin());
}

const ActionSpaceProfile& ActionSpaceProfile::android_control() {
    static const ActionSpaceProfile p{
        "AndroidControl",
        {ActionKind::Click, ActionKind::Type, ActionKind::Scroll, ActionKind::LongPress,
         ActionKind::NavigateBack, ActionKind::NavigateHome, ActionKind::OpenApp,
         ActionKind::Wait, ActionKind::Complete}};
    return p;
}

const ActionSpaceProfile& ActionSpaceProfile::gui_odyssey() {
    static const ActionSpaceProfile p{
        "GUIOdyssey",
        {ActionKind::Click, ActionKind::Type, ActionKind::Scroll, ActionKind::LongPress,
         ActionKind::NavigateBack, ActionKind::NavigateHome, ActionKind::PressRecent,
         ActionKind::Wait, ActionKind::Complete}};
    return p;
}

const ActionSpaceProfile& ActionSpaceProfile::aitw() {
    static const ActionSpaceProfile p{
        "AitW",
        {ActionKind::Click, ActionKind::Type, ActionKind::Scroll, ActionKind::NavigateBack,
         ActionKind::NavigateHome, ActionKind::PressEnter, ActionKind::Complete,
         ActionKind::Impossible}};
    return p;
}

const ActionSpaceProfile& ActionSpaceProfile::by_name(std::string_view name) {
    if (name == "AndroidControl") return android_control();
    if (name == "GUIOdyssey") return gui_odyssey();
    if (name == "AitW") return aitw();
    throw ValidationError("unknown action space profile '" + std::string(name) +
                          "' (expected AndroidControl, GUIOdyssey, or AitW)");
}

}  // namespace fedgui
