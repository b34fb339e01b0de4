#pragma once

#include <string>
#include <vector>

#include "fedgui/annotate_types.hpp"
#include "fedgui/episode.hpp"

namespace fedgui {

/// One JSON object per line, UTF-8, LF endings. Records carrying
/// screen_width/screen_height have pixel coordinates divided out on load.
/// Unknown top-level fields round-trip through Episode::extra_json.
std::vector<Episode> load_jsonl(const std::string& path);
void save_jsonl(const std::vector<Episode>& episodes, const std::string& path);

std::string episode_to_json_line(const Episode& ep);
Episode episode_from_json_line(const std::string& line);

/// Episode record plus the predicted fields produced by an annotation run.
struct AnnotatedRecord {
    Episode episode;
    AnnotatedEpisode annotation;
};

std::vector<AnnotatedRecord> load_annotated_jsonl(const std::string& path);
void save_annotated_jsonl(const std::vector<AnnotatedRecord>& records, const std::string& path);

}  // namespace fedgui
