#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fedgui/federated.hpp"
#include "fedgui/generate.hpp"
#include "fedgui/partition.hpp"

namespace fedgui {

enum class TrainMode { Fed, Central, Local };

std::string_view to_string(TrainMode m);
TrainMode train_mode_from_string(std::string_view s);

/// Either a JSONL file on disk or a generator spec.
struct CorpusSource {
    std::string path;                  // used when non-empty
    std::optional<CorpusSpec> generator;

    std::vector<Episode> materialize(std::uint64_t default_seed) const;
};

struct ExperimentConfig {
    CorpusSource corpus;
    PartitionScheme partition;
    StrategyConfig strategy;
    TrainMode mode = TrainMode::Fed;
    int rounds = 30;
    double fraction = 0.3;
    double lr = 0.05;
    int iterations = 0;  // 0: ceil(n_k / 10)
    int d_text = 64;
    int vocab = 256;
    std::string profile = "AndroidControl";
    std::uint64_t seed = 7;
    int workers = 0;
    std::optional<CorpusSource> holdout;
    double match_threshold = 0.14;

    /// Collects every violation and throws one ValidationError listing them.
    void validate() const;

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
};

struct ExperimentResult {
    std::vector<RoundReport> reports;
    Checkpoint final_checkpoint;
    double resolved_lambda = 0.0;
    std::vector<ClientStats> client_stats;
};

/// Full run: materialize corpus, partition, train `rounds` rounds under the
/// configured mode, evaluating on the holdout after every aggregation.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Step-wise Type/Ground/SR of a policy over a corpus, instructions taken
/// from each episode's high_level.
MetricsReport evaluate_model(const ModelParams& params, const TextVocab& vocab,
                             const std::vector<Episode>& episodes, double threshold = 0.14,
                             int workers = 0);

}  // namespace fedgui
