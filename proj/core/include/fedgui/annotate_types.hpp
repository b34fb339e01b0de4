#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fedgui {

enum class PipelineMode {
    AutoAnnotation,
    ActionOrigin,
    VisualSense,
    SelfInstruct,
    ChainOfThought,
};

std::string_view to_string(PipelineMode mode);
PipelineMode pipeline_mode_from_string(std::string_view s);

/// The predictions and accounting for one annotated episode.
struct AnnotatedEpisode {
    std::string episode_id;
    std::vector<std::string> low_levels;  // AutoAnnotation only, one per step
    std::string high_level;
    PipelineMode mode = PipelineMode::AutoAnnotation;
    std::string backend_name;
    double wall_seconds = 0.0;
    int calls = 0;
};

}  // namespace fedgui
