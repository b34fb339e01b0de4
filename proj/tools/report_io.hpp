#pragma once

#include <string>
#include <vector>

#include "fedgui/experiment.hpp"

namespace fedgui::cli {

std::string format_fixed(double v);  // 6 decimals, the CSV number format

void write_round_reports_jsonl(const std::string& path, const std::vector<RoundReport>& reports,
                               const StrategyConfig& strategy, double resolved_lambda);

struct MetricsRow {
    int round = 0;
    std::string strategy;
    std::string scheme;
    MetricsReport metrics;
    double mean_loss = 0.0;
};

void write_train_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);

struct EvalRow {
    std::string split;
    std::string strategy;
    int round = 0;
    MetricsReport metrics;
};

void write_eval_csv(const std::string& path, const std::vector<EvalRow>& rows);

void write_client_stats_csv(const std::string& path, const std::vector<ClientStats>& stats);

struct QualityRow {
    std::string mode;
    std::string backend;
    double bleu = 0.0;
    double rouge1_f = 0.0;
    double rouge2_f = 0.0;
    double rougeL_f = 0.0;
    double tfidf = 0.0;
    std::size_t n_episodes = 0;
};

void write_quality_csv(const std::string& path, const std::vector<QualityRow>& rows);

}  // namespace fedgui::cli
