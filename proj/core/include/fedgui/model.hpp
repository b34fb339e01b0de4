#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fedgui/action.hpp"
#include "fedgui/episode.hpp"

namespace fedgui {

struct SegmentSpec {
    std::string name;
    int rows = 0;
    int cols = 0;
    std::size_t offset = 0;

    bool operator==(const SegmentSpec&) const = default;
};

/// Hashed token buckets for action-text supervision. Bucket 0 is reserved
/// for empty text; decode returns the first corpus word seen per bucket.
struct TextVocab {
    int size = 256;
    std::vector<std::string> words;

    int encode(std::string_view token) const;
    const std::string& decode(int bucket) const;
    static TextVocab build(const std::vector<Episode>& corpus, int size = 256);
};

/// Linear policy over featurize() vectors, stored flat. Segments:
///
///   type_head   (|kinds| + 3) x d_in   kind logits; the scroll row plus the
///                                      three appended rows double as the
///                                      UP/DOWN/LEFT/RIGHT direction classes
///   ground_head 2 x d_in               point regression through a sigmoid
///   text_head   V x d_in               first-token scores over TextVocab
class ModelParams {
public:
    ModelParams() = default;
    ModelParams(const ActionSpaceProfile& profile, int d_text = 64, int d = 16, int vocab = 256);

    const std::vector<double>& flat() const { return data_; }
    std::vector<double>& flat() { return data_; }
    const std::vector<SegmentSpec>& segments() const { return segments_; }
    const std::vector<ActionKind>& kinds() const { return kinds_; }
    int d_in() const { return d_in_; }
    int d_text() const { return d_text_; }
    int vocab() const { return vocab_; }
    int kind_rows() const { return static_cast<int>(kinds_.size()) + 3; }

    std::span<const double> row(const std::string& segment, int r) const;
    std::span<double> row(const std::string& segment, int r);

    /// Row index used as the classification target for `kind`.
    int kind_row(ActionKind kind) const;
    /// The four direction rows, in UP, DOWN, LEFT, RIGHT order.
    std::array<int, 4> direction_rows() const;

    bool aggregable_with(const ModelParams& other) const;

private:
    std::vector<SegmentSpec> segments_;
    std::vector<double> data_;
    std::vector<ActionKind> kinds_;
    int d_in_ = 0;
    int d_text_ = 0;
    int vocab_ = 0;
};

struct Prediction {
    std::vector<double> kind_logits;  // kind_rows() entries
    Point point;                      // already squashed to (0,1)^2
    std::vector<double> text_scores;  // vocab entries
};

Prediction forward(const ModelParams& params, std::span<const double> features);

/// Decode a full Action from the heads; text comes from the vocab's pool word.
Action predict_action(const ModelParams& params, std::span<const double> features,
                      const TextVocab& vocab);

struct TrainSample {
    std::vector<double> features;
    Action target;
};

/// Summed terms: kind cross-entropy, squared point error, first-token
/// cross-entropy, and a 4-way direction cross-entropy for scroll targets.
double loss(const ModelParams& params, const TrainSample& sample);

/// Analytic gradient of loss(), flat in the params layout.
std::vector<double> grad(const ModelParams& params, const TrainSample& sample);

enum class TrainVariant { Plain, Prox, Scaffold };

struct LocalTrainConfig {
    double lr = 0.05;
    int iterations = 1;
    TrainVariant variant = TrainVariant::Plain;
    double mu = 0.2;  // Prox strength
};

struct LocalTrainResult {
    ModelParams params;
    std::vector<double> c_k;    // updated client control variate (Scaffold)
    std::vector<double> delta;  // params - broadcast global
};

/// `iterations` sequential single-sample SGD steps; the visit order is a
/// seeded shuffle, reshuffled per epoch. `global` is both the start point and
/// the proximal/Scaffold anchor. `c` and `c_k` may be empty unless Scaffold.
LocalTrainResult local_train(const ModelParams& global, const std::vector<TrainSample>& samples,
                             const LocalTrainConfig& cfg, const std::vector<double>& c,
                             const std::vector<double>& c_k, std::uint64_t seed);

/// Episode steps flattened to (featurize(high_level, screenshot), action).
std::vector<TrainSample> build_samples(const std::vector<Episode>& episodes, int d_text);

struct Checkpoint {
    ModelParams params;
    TextVocab vocab;
    std::map<std::string, std::string> meta;
};

/// JSON header line {segments, d_in, V, ...} followed by the flat
/// little-endian float64 array.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace fedgui
