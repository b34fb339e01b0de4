#include <doctest.h>

#include "fedgui/action.hpp"
#include "fedgui/errors.hpp"

using namespace fedgui;

namespace {

Action make(ActionKind kind, bool with_point, bool with_text, bool with_direction) {
    Action a;
    a.kind = kind;
    if (with_point) a.point = Point{0.5, 0.5};
    if (with_text) a.text = "hello";
    if (with_direction) a.direction = ScrollDirection::Up;
    return a;
}

}  // namespace

TEST_CASE("argument presence table, all kind/argument combinations") {
    // exhaustive: 12 kinds x 8 presence combinations, accepted iff the table says so
    for (int k = 0; k < kActionKindCount; ++k) {
        auto kind = static_cast<ActionKind>(k);
        bool wants_point = kind == ActionKind::Click || kind == ActionKind::LongPress;
        bool wants_text = kind == ActionKind::Type || kind == ActionKind::OpenApp;
        bool wants_direction = kind == ActionKind::Scroll;
        for (int bits = 0; bits < 8; ++bits) {
            bool p = bits & 1, t = bits & 2, d = bits & 4;
            Action a = make(kind, p, t, d);
            bool legal = p == wants_point && t == wants_text && d == wants_direction;
            if (legal) {
                CHECK_NOTHROW(a.validate());
            } else {
                CHECK_THROWS_AS(a.validate(), ValidationError);
            }
        }
    }
}

TEST_CASE("point coordinates must stay normalized") {
    Action a = make(ActionKind::Click, true, false, false);
    a.point = Point{1.2, 0.5};
    CHECK_THROWS_AS(a.validate(), ValidationError);
    a.point = Point{0.0, 1.0};
    CHECK_NOTHROW(a.validate());
}

TEST_CASE("kind and direction strings round-trip") {
    for (int k = 0; k < kActionKindCount; ++k) {
        auto kind = static_cast<ActionKind>(k);
        CHECK(action_kind_from_string(to_string(kind)) == kind);
    }
    for (int d = 0; d < 4; ++d) {
        auto dir = static_cast<ScrollDirection>(d);
        CHECK(direction_from_string(to_string(dir)) == dir);
    }
    CHECK_THROWS_AS(action_kind_from_string("SWIPE"), ValidationError);
}

TEST_CASE("action space profiles match the published tables") {
    const auto& ac = ActionSpaceProfile::android_control();
    const auto& odyssey = ActionSpaceProfile::gui_odyssey();
    const auto& aitw = ActionSpaceProfile::aitw();

    CHECK(ac.allowed.size() == 9);
    CHECK(odyssey.allowed.size() == 9);
    CHECK(aitw.allowed.size() == 8);

    CHECK_FALSE(ac.allows(ActionKind::PressRecent));
    CHECK_FALSE(ac.allows(ActionKind::PressEnter));
    CHECK_FALSE(ac.allows(ActionKind::Impossible));

    // odyssey = android_control - OPEN_APP + PRESS_RECENT
    CHECK(odyssey.allows(ActionKind::PressRecent));
    CHECK_FALSE(odyssey.allows(ActionKind::OpenApp));
    for (auto k : ac.allowed) {
        if (k == ActionKind::OpenApp) continue;
        CHECK(odyssey.allows(k));
    }

    CHECK(aitw.allows(ActionKind::PressEnter));
    CHECK(aitw.allows(ActionKind::Impossible));
    CHECK_FALSE(aitw.allows(ActionKind::OpenApp));
    CHECK_FALSE(aitw.allows(ActionKind::LongPress));
    CHECK_FALSE(aitw.allows(ActionKind::Wait));

    // every kind belongs to at least one profile
    for (int k = 0; k < kActionKindCount; ++k) {
        auto kind = static_cast<ActionKind>(k);
        CHECK((ac.allows(kind) || odyssey.allows(kind) || aitw.allows(kind)));
    }

    CHECK(ActionSpaceProfile::by_name("AndroidControl").name == "AndroidControl");
    CHECK_THROWS_AS(ActionSpaceProfile::by_name("Desktop"), ValidationError);
}
