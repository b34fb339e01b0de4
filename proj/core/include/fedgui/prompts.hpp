#pragma once

#include <string>
#include <vector>

namespace fedgui {

/// The four annotation prompts. Templates end with the completion cue
/// "The user is trying to:"; backends return only the continuation.
namespace prompts {

std::string step_description(const std::string& converted_action);
std::string episode_summary(const std::vector<std::string>& low_levels);
std::string visual_sense();
std::string chain_of_thought(const std::vector<std::string>& history,
                             const std::string& converted_action);

}  // namespace prompts

}  // namespace fedgui
