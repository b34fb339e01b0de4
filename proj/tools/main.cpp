#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fedgui/annotate.hpp"
#include "fedgui/errors.hpp"
#include "fedgui/experiment.hpp"
#include "fedgui/jsonl.hpp"
#include "fedgui/metrics.hpp"
#include "fedgui/parallel.hpp"
#include "report_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fedgui;
using namespace fedgui::cli;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

/// Every command records its resolved flags before doing any work; re-running
/// from the manifest replays them exactly (output paths may be redirected).
class RunManifest {
public:
    RunManifest(std::string command, std::vector<std::string> argv,
                std::vector<std::string> outputs, std::string path)
        : command_(std::move(command)),
          argv_(std::move(argv)),
          outputs_(std::move(outputs)),
          path_(std::move(path)),
          started_(timestamp_now()) {
        write(false);
    }

    void finish() { write(true); }

private:
    void write(bool finished) const {
        json j;
        j["command"] = command_;
        j["argv"] = argv_;
        j["outputs"] = outputs_;
        j["version"] = kVersion;
        j["started_at"] = started_;
        if (finished) j["finished_at"] = timestamp_now();
        std::ofstream out(path_, std::ios::binary);
        if (!out) throw ValidationError("cannot write manifest '" + path_ + "'");
        out << j.dump(2) << '\n';
    }

    std::string command_;
    std::vector<std::string> argv_;
    std::vector<std::string> outputs_;
    std::string path_;
    std::string started_;
};

const std::map<std::string, std::set<std::string>>& output_flags_by_command() {
    static const std::map<std::string, std::set<std::string>> flags = {
        {"generate", {"--out"}},
        {"partition", {"--out", "--stats-out"}},
        {"annotate", {"--out", "--cost-out"}},
        {"train", {"--out-dir"}},
        {"evaluate", {"--out"}},
        {"quality", {"--out"}},
    };
    return flags;
}

/// Expands `<cmd> --from-manifest M [output overrides]` into the stored argv.
std::vector<std::string> effective_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    auto it = std::find(args.begin(), args.end(), "--from-manifest");
    if (it == args.end()) return args;
    if (args.empty() || args[0] == "--from-manifest") {
        throw ValidationError("--from-manifest needs a leading subcommand");
    }
    const std::string command = args[0];
    auto allowed_it = output_flags_by_command().find(command);
    if (allowed_it == output_flags_by_command().end()) {
        throw ValidationError("unknown subcommand '" + command + "' before --from-manifest");
    }
    if (it + 1 == args.end()) throw ValidationError("--from-manifest needs a file path");
    const std::string manifest_path = *(it + 1);

    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw ValidationError("cannot open manifest '" + manifest_path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(manifest_path + ": malformed manifest: " + e.what());
    }
    if (j.value("command", "") != command) {
        throw ValidationError("manifest records command '" + j.value("command", "") +
                              "', not '" + command + "'");
    }

    std::vector<std::string> merged = {command};
    for (const auto& a : j.at("argv")) merged.push_back(a.get<std::string>());

    // besides the manifest itself, only output redirections are accepted
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--from-manifest") {
            ++i;
            continue;
        }
        if (!allowed_it->second.count(args[i])) {
            throw ValidationError("replay accepts only output-path overrides; got '" + args[i] +
                                  "'");
        }
        if (i + 1 >= args.size()) throw ValidationError(args[i] + " needs a value");
        merged.push_back(args[i]);
        merged.push_back(args[i + 1]);
        ++i;
    }
    return merged;
}

std::string csv_escape_free_name(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (c == ',' || c == '\n') c = '_';
    }
    return out;
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
    std::uint64_t seed = 7;
    int n_episodes = 1000;
    std::string length_law = "uniform:2,12";
    std::string families = "browse,search,shopping,messaging,settings";
    std::string profile = "AndroidControl";
    int d = 16;
    std::string out;
};

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto comma = s.find(',', pos);
        auto part = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!part.empty()) out.push_back(part);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

void run_generate(const GenerateOptions& opt) {
    CorpusSpec spec;
    spec.seed = opt.seed;
    spec.n_episodes = opt.n_episodes;
    spec.law = LengthLaw::parse(opt.length_law);
    spec.family_names = split_csv(opt.families);
    spec.profile = opt.profile;
    spec.d = opt.d;

    RunManifest manifest("generate",
                         {"--seed", std::to_string(opt.seed), "--n-episodes",
                          std::to_string(opt.n_episodes), "--length-law", opt.length_law,
                          "--families", opt.families, "--profile", opt.profile, "--d",
                          std::to_string(opt.d), "--out", opt.out},
                         {opt.out, opt.out + ".stats.json"}, opt.out + ".manifest.json");

    auto corpus = generate_corpus(spec);
    save_jsonl(corpus, opt.out);

    std::map<std::string, int> per_family;
    std::map<std::string, int> per_kind;
    for (const auto& ep : corpus) {
        per_family[ep.task_family]++;
        for (const auto& step : ep.steps) per_kind[std::string(to_string(step.action.kind))]++;
    }
    json stats;
    stats["n_episodes"] = corpus.size();
    stats["total_steps"] = total_steps(corpus);
    stats["mean_length"] =
        static_cast<double>(total_steps(corpus)) / static_cast<double>(corpus.size());
    stats["per_family"] = per_family;
    stats["per_kind"] = per_kind;
    std::ofstream stats_out(opt.out + ".stats.json", std::ios::binary);
    stats_out << stats.dump(2) << '\n';

    manifest.finish();
    std::cout << "wrote " << corpus.size() << " episodes (" << total_steps(corpus) << " steps) to "
              << opt.out << "\n";
}

// ---------------------------------------------------------------- partition

struct PartitionOptions {
    std::string corpus;
    std::string scheme = "iid";
    int clients = 10;
    double gamma = 0.5;
    std::uint64_t seed = 7;
    std::string out;
    std::string stats_out;
};

void run_partition(PartitionOptions opt) {
    if (opt.stats_out.empty()) opt.stats_out = opt.out + ".stats.csv";
    RunManifest manifest("partition",
                         {"--corpus", opt.corpus, "--scheme", opt.scheme, "--k",
                          std::to_string(opt.clients), "--gamma", std::to_string(opt.gamma),
                          "--seed", std::to_string(opt.seed), "--out", opt.out, "--stats-out",
                          opt.stats_out},
                         {opt.out, opt.stats_out}, opt.out + ".manifest.json");

    auto corpus = load_jsonl(opt.corpus);
    PartitionScheme scheme{scheme_from_string(opt.scheme), opt.clients, opt.gamma};
    auto clients = partition(corpus, scheme, opt.seed);
    save_split_manifest(clients, scheme, opt.seed, opt.out);
    write_client_stats_csv(opt.stats_out, dataset_stats(clients));

    manifest.finish();
    std::cout << "split " << corpus.size() << " episodes into " << clients.size()
              << " clients (" << opt.scheme << ") -> " << opt.out << "\n";
}

// ---------------------------------------------------------------- annotate

struct AnnotateOptions {
    std::string corpus;
    std::string mode = "auto_annotation";
    std::string backend = "template";
    std::string base_url;
    double timeout_seconds = 60.0;
    int retries = 2;
    int workers = 0;
    double price_per_hour = 0.5714;
    double mem_used_mb = 24576.0;
    double mem_total_mb = 24576.0;
    std::string out;
    std::string cost_out;
};

/// cpp-httplib clients are not safe for concurrent requests, so remote
/// completions are serialized behind a lock.
class LockedBackend final : public AnnotatorBackend {
public:
    explicit LockedBackend(std::unique_ptr<AnnotatorBackend> inner) : inner_(std::move(inner)) {}
    std::string complete(const std::string& prompt,
                         const std::vector<std::string>& images) override {
        std::scoped_lock lock(mutex_);
        return inner_->complete(prompt, images);
    }
    std::string name() const override { return inner_->name(); }

private:
    std::unique_ptr<AnnotatorBackend> inner_;
    std::mutex mutex_;
};

void run_annotate(AnnotateOptions opt) {
    if (opt.cost_out.empty()) opt.cost_out = opt.out + ".cost.json";
    if (opt.base_url.empty()) {
        const char* env = std::getenv("FEDGUI_BACKEND_URL");
        opt.base_url = env ? env : "http://127.0.0.1:8008";
    }
    RunManifest manifest(
        "annotate",
        {"--corpus", opt.corpus, "--mode", opt.mode, "--backend", opt.backend, "--base-url",
         opt.base_url, "--timeout", std::to_string(opt.timeout_seconds), "--retries",
         std::to_string(opt.retries), "--workers", std::to_string(opt.workers), "--price",
         std::to_string(opt.price_per_hour), "--mem-used", std::to_string(opt.mem_used_mb),
         "--mem-total", std::to_string(opt.mem_total_mb), "--out", opt.out, "--cost-out",
         opt.cost_out},
        {opt.out, opt.cost_out}, opt.out + ".manifest.json");

    auto corpus = load_jsonl(opt.corpus);
    PipelineMode mode = pipeline_mode_from_string(opt.mode);

    std::unique_ptr<AnnotatorBackend> backend;
    if (opt.backend == "template") {
        backend = std::make_unique<TemplateBackend>();
    } else if (opt.backend == "remote") {
        backend = std::make_unique<LockedBackend>(std::make_unique<RemoteBackend>(
            RemoteBackend::Options{opt.base_url, opt.timeout_seconds, opt.retries}));
    } else {
        throw ValidationError("unknown backend '" + opt.backend +
                              "' (expected template or remote)");
    }

    auto t0 = std::chrono::steady_clock::now();
    std::vector<AnnotatedRecord> records(corpus.size());
    parallel_for(corpus.size(), opt.workers, [&](std::size_t i) {
        records[i] = {corpus[i], annotate_episode(*backend, corpus[i], mode)};
    });
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    save_annotated_jsonl(records, opt.out);

    long long calls = 0;
    std::size_t steps = 0;
    for (const auto& r : records) {
        calls += r.annotation.calls;
        steps += r.episode.step_count();
    }
    CostInputs cost_in{opt.price_per_hour, std::max(elapsed, 1e-9), opt.mem_used_mb,
                       opt.mem_total_mb};
    json cost;
    cost["mode"] = opt.mode;
    cost["backend"] = backend->name();
    cost["episodes"] = corpus.size();
    cost["steps"] = steps;
    cost["calls"] = calls;
    cost["wall_seconds"] = elapsed;
    cost["price_per_hour"] = opt.price_per_hour;
    cost["mem_used_mb"] = opt.mem_used_mb;
    cost["mem_total_mb"] = opt.mem_total_mb;
    cost["cents"] = annotation_cost_cents(cost_in);
    std::ofstream cost_file(opt.cost_out, std::ios::binary);
    cost_file << cost.dump(2) << '\n';

    manifest.finish();
    std::cout << "annotated " << corpus.size() << " episodes (" << calls << " backend calls) -> "
              << opt.out << "\n";
}

// ---------------------------------------------------------------- train

struct TrainOptions {
    std::string config;
    std::string corpus;
    std::string holdout;
    std::string mode;
    std::string strategy;
    std::string scheme;
    int clients = -1;
    double gamma = -1.0;
    int rounds = -1;
    double fraction = -1.0;
    double lr = -1.0;
    int iterations = -1;
    std::vector<double> lambdas;
    std::uint64_t seed = 7;
    bool seed_passed = false;
    int workers = -1;
    std::string out_dir;
};

ExperimentConfig default_train_config() {
    ExperimentConfig cfg;
    CorpusSpec gen;
    gen.seed = 0;
    gen.n_episodes = 1000;
    gen.law = LengthLaw::uniform(2, 12);
    cfg.corpus.generator = gen;
    CorpusSpec holdout = gen;
    holdout.n_episodes = 100;
    cfg.holdout = CorpusSource{"", holdout};
    return cfg;
}

void run_train(const TrainOptions& opt, const std::vector<std::string>& resolved) {
    fs::create_directories(opt.out_dir);
    auto out_path = [&](const std::string& name) {
        return (fs::path(opt.out_dir) / name).string();
    };

    ExperimentConfig cfg =
        opt.config.empty() ? default_train_config() : ExperimentConfig::from_json_file(opt.config);
    if (!opt.corpus.empty()) {
        cfg.corpus.path = opt.corpus;
        cfg.corpus.generator.reset();
    }
    if (!opt.holdout.empty()) cfg.holdout = CorpusSource{opt.holdout, std::nullopt};
    if (!opt.mode.empty()) cfg.mode = train_mode_from_string(opt.mode);
    if (!opt.strategy.empty()) cfg.strategy.strategy = strategy_from_string(opt.strategy);
    if (!opt.scheme.empty()) cfg.partition.scheme = scheme_from_string(opt.scheme);
    if (opt.clients > 0) cfg.partition.clients = opt.clients;
    if (opt.gamma >= 0.0) cfg.partition.gamma = opt.gamma;
    if (opt.rounds >= 0) cfg.rounds = opt.rounds;
    if (opt.fraction > 0.0) cfg.fraction = opt.fraction;
    if (opt.lr > 0.0) cfg.lr = opt.lr;
    if (opt.iterations >= 0) cfg.iterations = opt.iterations;
    if (opt.seed_passed) cfg.seed = opt.seed;
    if (opt.workers >= 0) cfg.workers = opt.workers;
    cfg.validate();

    std::vector<double> lambdas = opt.lambdas;
    if (lambdas.empty()) lambdas.push_back(cfg.strategy.lambda);
    bool sweep = lambdas.size() > 1;
    if (sweep && cfg.strategy.strategy != Strategy::Adapted) {
        throw ValidationError("a lambda sweep needs strategy=adapted");
    }

    std::vector<std::string> outputs = {out_path("reports.jsonl"), out_path("metrics.csv")};
    RunManifest manifest("train", resolved, outputs, out_path("manifest.json"));

    std::ofstream reports_out(out_path("reports.jsonl"), std::ios::binary);
    std::vector<MetricsRow> metrics_rows;
    for (double lambda : lambdas) {
        ExperimentConfig run_cfg = cfg;
        run_cfg.strategy.lambda = lambda;
        auto result = run_experiment(run_cfg);

        std::string tag = sweep ? "_lambda" + format_fixed(lambda).substr(0,
                                      format_fixed(lambda).find('.') + 2)
                                : "";
        std::string ckpt = out_path("checkpoint" + tag + ".bin");
        save_checkpoint(ckpt, result.final_checkpoint);

        // stream this run's rounds into the shared reports file
        {
            std::string tmp = out_path(".reports.tmp");
            write_round_reports_jsonl(tmp, result.reports, run_cfg.strategy,
                                      result.resolved_lambda);
            std::ifstream tmp_in(tmp, std::ios::binary);
            reports_out << tmp_in.rdbuf();
            fs::remove(tmp);
        }

        if (!result.reports.empty() && result.reports.back().eval) {
            MetricsRow row;
            row.round = result.reports.back().round;
            row.strategy = std::string(to_string(run_cfg.strategy.strategy));
            if (run_cfg.strategy.strategy == Strategy::Adapted) {
                row.strategy += "(lambda=" + format_fixed(result.resolved_lambda) + ")";
            }
            row.scheme = std::string(to_string(run_cfg.partition.scheme));
            row.metrics = *result.reports.back().eval;
            row.mean_loss = result.reports.back().mean_loss_after;
            metrics_rows.push_back(row);
            std::cout << "strategy " << row.strategy << " round " << row.round << " type "
                      << format_fixed(row.metrics.type_acc) << " sr "
                      << format_fixed(row.metrics.sr) << "\n";
        }
    }
    write_train_metrics_csv(out_path("metrics.csv"), metrics_rows);
    manifest.finish();
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
    std::string checkpoint;
    std::string holdout;
    std::string split;
    double threshold = 0.14;
    bool exclude_unanchored_clicks = false;
    int workers = 0;
    std::string out;
};

void run_evaluate(EvaluateOptions opt) {
    if (opt.split.empty()) opt.split = fs::path(opt.holdout).stem().string();
    std::vector<std::string> resolved = {
        "--checkpoint", opt.checkpoint, "--holdout",  opt.holdout,
        "--split",      opt.split,      "--threshold", std::to_string(opt.threshold),
        "--workers",    std::to_string(opt.workers),   "--out", opt.out};
    if (opt.exclude_unanchored_clicks) resolved.emplace_back("--exclude-unanchored-clicks");
    RunManifest manifest("evaluate", resolved, {opt.out}, opt.out + ".manifest.json");

    auto ckpt = load_checkpoint(opt.checkpoint);
    auto holdout = load_jsonl(opt.holdout);
    if (opt.exclude_unanchored_clicks) holdout = filter_unanchored_clicks(holdout);
    auto metrics = evaluate_model(ckpt.params, ckpt.vocab, holdout, opt.threshold, opt.workers);

    EvalRow row;
    row.split = csv_escape_free_name(opt.split);
    row.strategy = ckpt.meta.count("strategy") ? ckpt.meta.at("strategy") : "unknown";
    row.round = ckpt.meta.count("rounds") ? std::stoi(ckpt.meta.at("rounds")) : 0;
    row.metrics = metrics;
    write_eval_csv(opt.out, {row});

    manifest.finish();
    std::cout << "split " << row.split << ": type " << format_fixed(metrics.type_acc) << " ground "
              << (metrics.ground_acc ? format_fixed(*metrics.ground_acc) : "na") << " sr "
              << format_fixed(metrics.sr) << " over " << metrics.n_steps << " steps\n";
}

// ---------------------------------------------------------------- quality

struct QualityOptions {
    std::string annotated;
    std::string gold;
    std::string out;
};

void run_quality(const QualityOptions& opt) {
    RunManifest manifest("quality",
                         {"--annotated", opt.annotated, "--gold", opt.gold, "--out", opt.out},
                         {opt.out}, opt.out + ".manifest.json");

    auto records = load_annotated_jsonl(opt.annotated);
    auto gold = load_jsonl(opt.gold);
    if (records.empty()) throw ValidationError("annotated file has no records");

    std::map<std::string, const Episode*> gold_by_id;
    for (const auto& ep : gold) gold_by_id[ep.id] = &ep;

    std::vector<std::string> idf_corpus;
    for (const auto& ep : gold) idf_corpus.push_back(ep.high_level);
    for (const auto& r : records) idf_corpus.push_back(r.annotation.high_level);

    QualityRow row;
    row.mode = std::string(to_string(records.front().annotation.mode));
    row.backend = records.front().annotation.backend_name;
    for (const auto& r : records) {
        auto it = gold_by_id.find(r.episode.id);
        if (it == gold_by_id.end()) {
            throw ValidationError("episode '" + r.episode.id + "' missing from the gold corpus");
        }
        auto q = text_quality(idf_corpus, r.annotation.high_level, it->second->high_level);
        row.bleu += q.bleu;
        row.rouge1_f += q.rouge.rouge1.f1;
        row.rouge2_f += q.rouge.rouge2.f1;
        row.rougeL_f += q.rouge.rougeL.f1;
        row.tfidf += q.tfidf_cosine;
    }
    auto n = static_cast<double>(records.size());
    row.bleu /= n;
    row.rouge1_f /= n;
    row.rouge2_f /= n;
    row.rougeL_f /= n;
    row.tfidf /= n;
    row.n_episodes = records.size();
    write_quality_csv(opt.out, {row});

    manifest.finish();
    std::cout << "quality over " << records.size() << " episodes: bleu "
              << format_fixed(row.bleu) << " rougeL_f " << format_fixed(row.rougeL_f) << " tfidf "
              << format_fixed(row.tfidf) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args;
    try {
        args = effective_args(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"Synthetic GUI-agent trajectories, instruction auto-annotation, and federated "
                 "training at desk scale"};
    app.require_subcommand(1);
    // manifest replay appends output overrides after the stored flags
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    GenerateOptions gen;
    auto* sub_gen = app.add_subcommand("generate", "Generate a synthetic episode corpus");
    sub_gen->add_option("--seed", gen.seed, "Root seed for all randomness")
        ->capture_default_str();
    sub_gen->add_option("--n-episodes", gen.n_episodes, "Number of episodes")
        ->capture_default_str();
    sub_gen->add_option("--length-law", gen.length_law,
                        "uniform:MIN,MAX | fixed:N | bimodal:S,L,RATIO")
        ->capture_default_str();
    sub_gen->add_option("--families", gen.families, "Comma-separated task families")
        ->capture_default_str();
    sub_gen->add_option("--profile", gen.profile, "AndroidControl | GUIOdyssey | AitW")
        ->capture_default_str();
    sub_gen->add_option("--d", gen.d, "Screenshot feature dimension")->capture_default_str();
    sub_gen->add_option("--out", gen.out, "Corpus JSONL path")->required();
    sub_gen->callback([&] { run_generate(gen); });

    PartitionOptions part;
    auto* sub_part = app.add_subcommand("partition", "Split a corpus into client datasets");
    sub_part->add_option("--corpus", part.corpus, "Corpus JSONL path")->required();
    sub_part->add_option("--scheme", part.scheme, "iid | step_skew | episode_skew | both_skew")
        ->capture_default_str();
    sub_part->add_option("--k", part.clients, "Number of clients")->capture_default_str();
    sub_part->add_option("--gamma", part.gamma, "Episode-count ramp strength")
        ->capture_default_str();
    sub_part->add_option("--seed", part.seed, "Root seed for all randomness")
        ->capture_default_str();
    sub_part->add_option("--out", part.out, "Split manifest JSON path")->required();
    sub_part->add_option("--stats-out", part.stats_out,
                         "Per-client stats CSV (default: <out>.stats.csv)");
    sub_part->callback([&] { run_partition(part); });

    AnnotateOptions ann;
    auto* sub_ann = app.add_subcommand("annotate", "Infer instructions from raw trajectories");
    sub_ann->add_option("--corpus", ann.corpus, "Corpus JSONL path")->required();
    sub_ann->add_option("--mode", ann.mode,
                        "auto_annotation | action_origin | visual_sense | self_instruct | "
                        "chain_of_thought")
        ->capture_default_str();
    sub_ann->add_option("--backend", ann.backend, "template | remote")->capture_default_str();
    sub_ann->add_option("--base-url", ann.base_url,
                        "Model server base URL (default: $FEDGUI_BACKEND_URL or "
                        "http://127.0.0.1:8008)");
    sub_ann->add_option("--timeout", ann.timeout_seconds, "Remote request timeout, seconds")
        ->capture_default_str();
    sub_ann->add_option("--retries", ann.retries, "Remote retry count")->capture_default_str();
    sub_ann->add_option("--workers", ann.workers, "Worker threads (0 = all cores)")
        ->capture_default_str();
    sub_ann->add_option("--price", ann.price_per_hour, "GPU pool rent per hour, dollars")
        ->capture_default_str();
    sub_ann->add_option("--mem-used", ann.mem_used_mb, "Average GPU memory used, MB")
        ->capture_default_str();
    sub_ann->add_option("--mem-total", ann.mem_total_mb, "Total GPU memory, MB")
        ->capture_default_str();
    sub_ann->add_option("--out", ann.out, "Annotated JSONL path")->required();
    sub_ann->add_option("--cost-out", ann.cost_out, "Cost report JSON (default: <out>.cost.json)");
    sub_ann->callback([&] { run_annotate(ann); });

    TrainOptions train;
    auto* sub_train = app.add_subcommand("train", "Federated, centralized, or local training");
    sub_train->add_option("--config", train.config, "Experiment config JSON (flags win)");
    sub_train->add_option("--corpus", train.corpus, "Corpus JSONL (overrides config)");
    sub_train->add_option("--holdout", train.holdout, "Holdout JSONL (overrides config)");
    sub_train->add_option("--mode", train.mode, "fed | central | local");
    sub_train->add_option("--strategy", train.strategy,
                          "fedavg | adapted | fedprox | scaffold | fedavgm | fedadagrad | "
                          "fedyogi | fedadam");
    sub_train->add_option("--scheme", train.scheme, "iid | step_skew | episode_skew | both_skew");
    sub_train->add_option("--k", train.clients, "Number of clients (default 10)");
    sub_train->add_option("--gamma", train.gamma, "Episode-count ramp strength (default 0.5)");
    sub_train->add_option("--rounds", train.rounds, "Communication rounds (default 30)");
    sub_train->add_option("--fraction", train.fraction, "Client fraction per round (default 0.3)");
    sub_train->add_option("--lr", train.lr, "Local learning rate (default 0.05)");
    sub_train->add_option("--iterations", train.iterations,
                          "Local SGD iterations (default 0 = one tenth of the client's steps)");
    sub_train
        ->add_option("--lambda", train.lambdas,
                     "Adapted ratio; repeat for a sweep (default: mean episode length)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    auto* seed_opt = sub_train->add_option("--seed", train.seed, "Root seed for all randomness");
    seed_opt->capture_default_str();
    sub_train->add_option("--workers", train.workers, "Worker threads (0 = all cores)");
    sub_train->add_option("--out-dir", train.out_dir, "Output directory")->required();
    sub_train->callback([&] {
        train.seed_passed = seed_opt->count() > 0;
        std::vector<std::string> resolved = {"--out-dir", train.out_dir};
        auto push = [&](const char* flag, const std::string& v) {
            if (!v.empty()) {
                resolved.emplace_back(flag);
                resolved.push_back(v);
            }
        };
        // pin the seed unless it comes from the config file
        if (train.seed_passed || train.config.empty()) {
            push("--seed", std::to_string(train.seed));
        }
        push("--config", train.config);
        push("--corpus", train.corpus);
        push("--holdout", train.holdout);
        push("--mode", train.mode);
        push("--strategy", train.strategy);
        push("--scheme", train.scheme);
        if (train.clients > 0) push("--k", std::to_string(train.clients));
        if (train.gamma >= 0.0) push("--gamma", std::to_string(train.gamma));
        if (train.rounds >= 0) push("--rounds", std::to_string(train.rounds));
        if (train.fraction > 0.0) push("--fraction", std::to_string(train.fraction));
        if (train.lr > 0.0) push("--lr", std::to_string(train.lr));
        if (train.iterations >= 0) push("--iterations", std::to_string(train.iterations));
        if (train.workers >= 0) push("--workers", std::to_string(train.workers));
        for (double l : train.lambdas) push("--lambda", std::to_string(l));
        run_train(train, resolved);
    });

    EvaluateOptions eval;
    auto* sub_eval = app.add_subcommand("evaluate", "Score a checkpoint on a holdout corpus");
    sub_eval->add_option("--checkpoint", eval.checkpoint, "Checkpoint path")->required();
    sub_eval->add_option("--holdout", eval.holdout, "Holdout corpus JSONL")->required();
    sub_eval->add_option("--split", eval.split, "Split name for the CSV (default: file stem)");
    sub_eval->add_option("--threshold", eval.threshold, "Grounding distance threshold")
        ->capture_default_str();
    sub_eval->add_flag("--exclude-unanchored-clicks", eval.exclude_unanchored_clicks,
                       "Drop click steps whose point hits no element");
    sub_eval->add_option("--workers", eval.workers, "Worker threads (0 = all cores)")
        ->capture_default_str();
    sub_eval->add_option("--out", eval.out, "Metrics CSV path")->required();
    sub_eval->callback([&] { run_evaluate(eval); });

    QualityOptions quality;
    auto* sub_quality =
        app.add_subcommand("quality", "Compare annotated instructions against gold ones");
    sub_quality->add_option("--annotated", quality.annotated, "Annotated JSONL path")->required();
    sub_quality->add_option("--gold", quality.gold, "Gold corpus JSONL path")->required();
    sub_quality->add_option("--out", quality.out, "Quality CSV path")->required();
    sub_quality->callback([&] { run_quality(quality); });

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
