#include "fedgui/prompts.hpp"

namespace fedgui::prompts {

namespace {

constexpr const char* kStepHeader =
    "A user is performing a task on a mobile phone, progressing through multiple steps to "
    "complete the task.\n"
    "Each step involves an interface shown in the provided screenshot, and an action performed "
    "to move on to the next step.\n"
    "\n"
    "Based on the screenshot and the user's action, infer the specific goal the user is trying "
    "to accomplish at this step in the task.\n"
    "You need to associate the action with the key information in the screenshot and output "
    "your predicted goal.\n"
    "\n"
    "## Example\n"
    "- User Action: Scroll down\n"
    "if the screenshot shows the browsing page for purchasing shoes,\n"
    "- Your Output: Swipe up for more product details about shoes\n"
    "\n"
    "- User Action: Click (101,314)\n"
    "if the UI element at this coordinate is an article titled \"cooking\"\n"
    "- Your Output: Click on the article titled \"cooking\"\n"
    "\n"
    "- User Action: Check status: successful\n"
    "- Your Output: Check if the task is finished\n"
    "\n"
    "- User Action: Open App: Plantum\n"
    "if the action is open app, return the same\n"
    "- Your Output: Open App: Plantum\n"
    "\n"
    "- User Action: Wait for response\n"
    "if the action is wait, return none\n"
    "- Your Output: None\n"
    "\n"
    "## Answer Format\n"
    "Only output the predicted goal. Be specific with the input screenshot.\n"
    "Keep your response concise and capture the important things, focusing on key details like "
    "the app name, email address, search terms, item name, and title.\n"
    "\n"
    "## User Action\n";

constexpr const char* kSummaryHeader =
    "A user is performing a high-level task on a mobile phone, progressing through multiple "
    "low-level steps to complete the task.\n"
    "Each step involves an interface, and a low-level action performed to move on to the next "
    "step.\n"
    "\n"
    "The full sequence of user actions is provided in the History section.\n"
    "The task is not known. Now based on the history provided, describe the mobile user's "
    "high-level task when performing these actions.\n"
    "\n"
    "## History\n";

constexpr const char* kSummaryFooter =
    "\n"
    "## Answer Format\n"
    "Keep your output concise and clear, as if the user were explaining the task to someone "
    "else in one sentence.\n"
    "Include key details like the app name, individual name, email address, search terms, item "
    "name, and title.\n"
    "\n"
    "## Your Output\n"
    "The user is trying to:";

constexpr const char* kVisualSense =
    "A user is performing a high-level task on a mobile phone, progressing through multiple "
    "low-level steps to complete the task.\n"
    "Each step involves an interface, and a low-level action performed to move on to the next "
    "step.\n"
    "\n"
    "A single image that shows all the screenshots concatenated horizontally is provided.\n"
    "The task is not known. Now based on this concatenated screenshot, describe the mobile "
    "user's high-level task when performing these actions.\n"
    "\n"
    "## Answer Format\n"
    "Keep your output concise and clear, as if the user were explaining the task to someone "
    "else in one sentence.\n"
    "Include key details like the app name, individual name, email address, search terms, item "
    "name, and title.\n"
    "\n"
    "## Your Output\n"
    "The user is trying to:";

constexpr const char* kChainHeader =
    "A user is performing a high-level task on a mobile phone, progressing through multiple "
    "low-level steps to complete the task.\n"
    "Each step involves an interface, and a low-level action performed to move on to the next "
    "step.\n"
    "\n"
    "The previous task descriptions for each step are provided in the History section, and the "
    "user's final action is provided in the User Action section.\n"
    "You need to think step by step and analyze the input sequence to deduce the user's "
    "underlying objective that prompted these actions.\n"
    "Utilize the screenshot of the final step to gain insights into the user's intentions, "
    "focusing on elements highlighted or implicated by the actions.\n"
    "Your goal is to describe the ultimate intention the user is aiming to achieve.\n"
    "\n"
    "## History\n";

}  // namespace

std::string step_description(const std::string& converted_action) {
    std::string prompt = kStepHeader;
    prompt += converted_action;
    prompt +=
        "\n"
        "\n"
        "## Your Output\n"
        "The user is trying to:";
    return prompt;
}

std::string episode_summary(const std::vector<std::string>& low_levels) {
    std::string prompt = kSummaryHeader;
    for (const auto& low : low_levels) {
        prompt += low;
        prompt += '\n';
    }
    prompt += kSummaryFooter;
    return prompt;
}

std::string visual_sense() { return kVisualSense; }

std::string chain_of_thought(const std::vector<std::string>& history,
                             const std::string& converted_action) {
    std::string prompt = kChainHeader;
    for (const auto& h : history) {
        prompt += h;
        prompt += '\n';
    }
    prompt +=
        "\n"
        "## User Action\n";
    prompt += converted_action;
    prompt +=
        "\n"
        "\n"
        "## Answer Format\n"
        "Keep your output concise and clear, as if the user were explaining the task to someone "
        "else in one sentence.\n"
        "Include key details like the app name, individual name, email address, search terms, "
        "item name, and title.\n"
        "\n"
        "## Your Output\n"
        "The user is trying to:";
    return prompt;
}

}  // namespace fedgui::prompts
