#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fedgui/annotate_types.hpp"
#include "fedgui/episode.hpp"

namespace fedgui {

struct ConvertedAction {
    std::string text;
    ActionKind source_kind = ActionKind::Click;
};

/// Rule-based rendering of an action as a sentence. Click/LongPress resolve
/// the point to the smallest-area element containing it (ties: lowest index)
/// and name it; with no containing element the coordinates are kept.
ConvertedAction convert_action(const Action& action, const Screenshot& screenshot);

/// The annotation model seen through one chat-style call. `images` is the
/// ordered list of screenshot references accompanying the prompt.
class AnnotatorBackend {
public:
    virtual ~AnnotatorBackend() = default;
    virtual std::string complete(const std::string& prompt,
                                 const std::vector<std::string>& images) = 0;
    virtual std::string name() const = 0;
};

/// Deterministic offline backend: a pure function of the prompt text. Its
/// rewrite rules are fixed so golden outputs stay stable.
class TemplateBackend final : public AnnotatorBackend {
public:
    std::string complete(const std::string& prompt,
                         const std::vector<std::string>& images) override;
    std::string name() const override { return "template"; }
};

/// HTTP client for a model server: POST {base_url}/complete with
/// {"prompt": ..., "images": [...]}, expecting {"text": ...} back.
class RemoteBackend final : public AnnotatorBackend {
public:
    struct Options {
        std::string base_url = "http://127.0.0.1:8008";
        double timeout_seconds = 60.0;
        int retries = 2;
    };

    explicit RemoteBackend(Options options);
    ~RemoteBackend() override;

    std::string complete(const std::string& prompt,
                         const std::vector<std::string>& images) override;
    std::string name() const override { return "remote"; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One Descriptor call. Wait steps always come back as the literal "None",
/// whatever the backend answered.
std::string describe_step(AnnotatorBackend& backend, const Screenshot& screenshot,
                          const ConvertedAction& converted);

/// One Summarizer call over the whole episode; the composite screenshot is
/// the ordered reference list.
std::string summarize_episode(AnnotatorBackend& backend,
                              const std::vector<std::string>& low_levels,
                              const std::vector<std::string>& screenshot_refs);

/// Injectable time source (seconds); defaults to the steady clock. Tests pin
/// it to make wall_seconds reproducible.
using AnnotationClock = std::function<double()>;

/// Runs one episode through the chosen pipeline. Backend call counts:
/// AutoAnnotation n+1, VisualSense 1, SelfInstruct 1, ChainOfThought n,
/// ActionOrigin 0.
AnnotatedEpisode annotate_episode(AnnotatorBackend& backend, const Episode& episode,
                                  PipelineMode mode, AnnotationClock clock = {});

}  // namespace fedgui
