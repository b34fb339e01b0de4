#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fedgui/episode.hpp"
#include "fedgui/rng.hpp"

namespace fedgui {

/// A template for one kind of task: which app it lives in, what the user is
/// after, and how its mid-episode actions are distributed.
struct TaskFamily {
    std::string name;
    std::string app;
    std::string verb;  // gold instruction phrase, e.g. "search for"
    std::vector<std::string> keywords;
    std::vector<std::pair<ActionKind, double>> kind_weights;
    bool open_app_first = true;
    bool complete_last = false;

    /// Throws if a weighted kind is outside `profile` or the family is empty.
    void validate(const ActionSpaceProfile& profile) const;
};

const std::vector<TaskFamily>& builtin_families();
const TaskFamily& family_by_name(std::string_view name);
std::vector<TaskFamily> families_by_names(const std::vector<std::string>& names);

struct LengthLaw {
    enum class Kind { Uniform, Fixed, Bimodal };
    Kind kind = Kind::Uniform;
    int min = 2, max = 12;       // uniform bounds
    int fixed = 5;               // fixed length
    int short_len = 2, long_len = 12;
    double short_ratio = 0.5;    // bimodal: probability of short_len

    static LengthLaw uniform(int min, int max);
    static LengthLaw fixed_len(int n);
    static LengthLaw bimodal(int short_len, int long_len, double short_ratio);
    /// "uniform:2,12" | "fixed:5" | "bimodal:2,12,0.5"
    static LengthLaw parse(std::string_view text);

    void validate() const;
    int sample(Rng& rng) const;
    std::string describe() const;
};

/// Deterministic in all inputs. Coordinate actions always land inside the
/// bbox of an element on their screenshot; gold low/high-level instructions
/// come from the family's templates.
Episode generate_episode(std::uint64_t seed, const TaskFamily& family, int n_steps,
                         const ActionSpaceProfile& profile, int d = 16);

struct CorpusSpec {
    std::uint64_t seed = 7;
    int n_episodes = 1000;
    LengthLaw law = LengthLaw::uniform(2, 12);
    std::vector<std::string> family_names;  // empty -> all builtin families
    std::string profile = "AndroidControl";
    int d = 16;
};

std::vector<Episode> generate_corpus(const CorpusSpec& spec);

}  // namespace fedgui
