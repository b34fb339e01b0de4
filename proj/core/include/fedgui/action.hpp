#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fedgui {

enum class ActionKind {
    Click,
    Type,
    Scroll,
    LongPress,
    NavigateBack,
    NavigateHome,
    OpenApp,
    Wait,
    Complete,
    PressRecent,
    PressEnter,
    Impossible,
};

inline constexpr int kActionKindCount = 12;

enum class ScrollDirection { Up, Down, Left, Right };

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// One user interaction. Argument presence is tied to the kind:
/// point for Click/LongPress, text for Type/OpenApp, direction for Scroll,
/// nothing otherwise.
struct Action {
    ActionKind kind = ActionKind::Click;
    std::optional<Point> point;
    std::optional<std::string> text;
    std::optional<ScrollDirection> direction;

    /// Throws ValidationError if the argument-presence table is violated
    /// or a point coordinate leaves [0, 1].
    void validate() const;

    bool carries_point() const;
    bool carries_text() const;
};

std::string_view to_string(ActionKind kind);
ActionKind action_kind_from_string(std::string_view s);

std::string_view to_string(ScrollDirection d);
ScrollDirection direction_from_string(std::string_view s);

/// Which kinds a corpus admits. The `allowed` order is fixed per profile;
/// the model's kind-class indices follow it.
struct ActionSpaceProfile {
    std::string name;
    std::vector<ActionKind> allowed;

    bool allows(ActionKind k) const;
    /// Index of `k` in `allowed`, or -1.
    int kind_index(ActionKind k) const;

    static const ActionSpaceProfile& android_control();  // 9 kinds
    static const ActionSpaceProfile& gui_odyssey();      // 9 kinds, PressRecent instead of OpenApp
    static const ActionSpaceProfile& aitw();             // 8 kinds
    static const ActionSpaceProfile& by_name(std::string_view name);
};

}  // namespace fedgui
