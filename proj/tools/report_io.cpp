#include "report_io.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fedgui/errors.hpp"

namespace fedgui::cli {

using nlohmann::json;

std::string format_fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    return out;
}

std::string ground_or_na(const MetricsReport& m) {
    return m.ground_acc ? format_fixed(*m.ground_acc) : "na";
}

}  // namespace

void write_round_reports_jsonl(const std::string& path, const std::vector<RoundReport>& reports,
                               const StrategyConfig& strategy, double resolved_lambda) {
    auto out = open_out(path);
    for (const auto& r : reports) {
        json j;
        j["round"] = r.round;
        j["strategy"] = std::string(to_string(strategy.strategy));
        if (strategy.strategy == Strategy::Adapted) j["lambda"] = resolved_lambda;
        j["sampled"] = r.sampled;
        json weights = json::array();
        for (const auto& w : r.weights) {
            weights.push_back({{"client_id", w.client_id},
                               {"n_epi", w.n_epi},
                               {"n_steps", w.n_steps},
                               {"n_star", w.n_star},
                               {"omega", w.omega}});
        }
        j["weights"] = std::move(weights);
        j["mean_loss_before"] = r.mean_loss_before;
        j["mean_loss_after"] = r.mean_loss_after;
        if (r.eval) {
            json e;
            e["type_acc"] = r.eval->type_acc;
            if (r.eval->ground_acc) e["ground_acc"] = *r.eval->ground_acc;
            e["sr"] = r.eval->sr;
            e["n_steps"] = r.eval->n_steps;
            e["n_coord_steps"] = r.eval->n_coord_steps;
            j["eval"] = std::move(e);
        }
        j["wall_ms"] = r.wall_ms;
        out << j.dump() << '\n';
    }
}

void write_train_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    auto out = open_out(path);
    out << "round,strategy,scheme,type,ground,sr,mean_loss\n";
    for (const auto& r : rows) {
        out << r.round << ',' << r.strategy << ',' << r.scheme << ','
            << format_fixed(r.metrics.type_acc) << ',' << ground_or_na(r.metrics) << ','
            << format_fixed(r.metrics.sr) << ',' << format_fixed(r.mean_loss) << '\n';
    }
}

void write_eval_csv(const std::string& path, const std::vector<EvalRow>& rows) {
    auto out = open_out(path);
    out << "split,strategy,round,type_acc,ground_acc,sr,n_steps,n_coord_steps\n";
    for (const auto& r : rows) {
        out << r.split << ',' << r.strategy << ',' << r.round << ','
            << format_fixed(r.metrics.type_acc) << ',' << ground_or_na(r.metrics) << ','
            << format_fixed(r.metrics.sr) << ',' << r.metrics.n_steps << ','
            << r.metrics.n_coord_steps << '\n';
    }
}

void write_client_stats_csv(const std::string& path, const std::vector<ClientStats>& stats) {
    auto out = open_out(path);
    out << "client_id,n_epi,n_steps,mean_length\n";
    for (const auto& s : stats) {
        out << s.client_id << ',' << s.n_epi << ',' << s.n_steps << ','
            << format_fixed(s.mean_length) << '\n';
    }
}

void write_quality_csv(const std::string& path, const std::vector<QualityRow>& rows) {
    auto out = open_out(path);
    out << "mode,backend,bleu,rouge1_f,rouge2_f,rougeL_f,tfidf,n_episodes\n";
    for (const auto& r : rows) {
        out << r.mode << ',' << r.backend << ',' << format_fixed(r.bleu) << ','
            << format_fixed(r.rouge1_f) << ',' << format_fixed(r.rouge2_f) << ','
            << format_fixed(r.rougeL_f) << ',' << format_fixed(r.tfidf) << ',' << r.n_episodes
            << '\n';
    }
}

}  // namespace fedgui::cli
