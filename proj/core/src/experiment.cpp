#include "fedgui/experiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedgui/errors.hpp"
#include "fedgui/featurize.hpp"
#include "fedgui/jsonl.hpp"
#include "fedgui/parallel.hpp"

namespace fedgui {

using nlohmann::json;

std::string_view to_string(TrainMode m) {
    switch (m) {
        case TrainMode::Fed: return "fed";
        case TrainMode::Central: return "central";
        case TrainMode::Local: return "local";
    }
    return "fed";
}

TrainMode train_mode_from_string(std::string_view s) {
    if (s == "fed") return TrainMode::Fed;
    if (s == "central") return TrainMode::Central;
    if (s == "local") return TrainMode::Local;
    throw ValidationError("unknown train mode '" + std::string(s) +
                          "' (expected fed, central, local)");
}

std::vector<Episode> CorpusSource::materialize(std::uint64_t default_seed) const {
    if (!path.empty()) return load_jsonl(path);
    if (generator) {
        CorpusSpec spec = *generator;
        if (spec.seed == 0) spec.seed = default_seed;
        return generate_corpus(spec);
    }
    throw ValidationError("corpus source has neither a path nor a generator spec");
}

void ExperimentConfig::validate() const {
    std::vector<std::string> problems;
    if (corpus.path.empty() && !corpus.generator) {
        problems.push_back("corpus: needs 'path' or 'generator'");
    }
    if (rounds < 0) problems.push_back("rounds: must be >= 0");
    if (fraction <= 0.0 || fraction > 1.0) problems.push_back("fraction: must be in (0, 1]");
    if (lr <= 0.0) problems.push_back("local.lr: must be > 0");
    if (iterations < 0) problems.push_back("local.iterations: must be >= 0");
    if (d_text < 1) problems.push_back("dims.d_text: must be >= 1");
    if (vocab < 2) problems.push_back("dims.vocab: must be >= 2");
    if (partition.clients < 1) problems.push_back("partition.K: must be >= 1");
    if (partition.gamma < 0.0) problems.push_back("partition.gamma: must be >= 0");
    if (strategy.mu < 0.0) problems.push_back("strategy.mu: must be >= 0");
    if (strategy.tau <= 0.0) problems.push_back("strategy.tau: must be > 0");
    if (match_threshold <= 0.0) problems.push_back("eval.threshold: must be > 0");
    try {
        ActionSpaceProfile::by_name(profile);
    } catch (const ValidationError& e) {
        problems.push_back(std::string("profile: ") + e.what());
    }
    if (!problems.empty()) {
        std::string msg = "invalid experiment config:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ValidationError(msg);
    }
}

namespace {

CorpusSource corpus_source_from_json(const json& j) {
    CorpusSource src;
    if (j.contains("path")) src.path = j["path"].get<std::string>();
    if (j.contains("generator")) {
        const json& g = j["generator"];
        CorpusSpec spec;
        spec.seed = g.value("seed", 0);  // 0: inherit the experiment seed
        spec.n_episodes = g.value("n_episodes", 1000);
        if (g.contains("length_law")) {
            spec.law = LengthLaw::parse(g["length_law"].get<std::string>());
        }
        if (g.contains("families")) {
            spec.family_names = g["families"].get<std::vector<std::string>>();
        }
        spec.profile = g.value("profile", "AndroidControl");
        spec.d = g.value("d", 16);
        src.generator = spec;
    }
    return src;
}

json corpus_source_to_json(const CorpusSource& src) {
    json j = json::object();
    if (!src.path.empty()) j["path"] = src.path;
    if (src.generator) {
        json g;
        g["seed"] = src.generator->seed;
        g["n_episodes"] = src.generator->n_episodes;
        g["length_law"] = src.generator->law.describe();
        g["families"] = src.generator->family_names;
        g["profile"] = src.generator->profile;
        g["d"] = src.generator->d;
        j["generator"] = std::move(g);
    }
    return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed experiment config: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        if (j.contains("corpus")) cfg.corpus = corpus_source_from_json(j["corpus"]);
        if (j.contains("partition")) {
            const json& p = j["partition"];
            if (p.contains("scheme")) {
                cfg.partition.scheme = scheme_from_string(p["scheme"].get<std::string>());
            }
            cfg.partition.clients = p.value("K", cfg.partition.clients);
            cfg.partition.gamma = p.value("gamma", cfg.partition.gamma);
        }
        if (j.contains("strategy")) {
            const json& s = j["strategy"];
            if (s.contains("name")) {
                cfg.strategy.strategy = strategy_from_string(s["name"].get<std::string>());
            }
            cfg.strategy.lambda = s.value("lambda", cfg.strategy.lambda);
            cfg.strategy.mu = s.value("mu", cfg.strategy.mu);
            cfg.strategy.server_lr = s.value("server_lr", cfg.strategy.server_lr);
            cfg.strategy.beta = s.value("beta", cfg.strategy.beta);
            cfg.strategy.beta1 = s.value("beta1", cfg.strategy.beta1);
            cfg.strategy.beta2 = s.value("beta2", cfg.strategy.beta2);
            cfg.strategy.eta = s.value("eta", cfg.strategy.eta);
            cfg.strategy.tau = s.value("tau", cfg.strategy.tau);
        }
        if (j.contains("mode")) cfg.mode = train_mode_from_string(j["mode"].get<std::string>());
        cfg.rounds = j.value("rounds", cfg.rounds);
        cfg.fraction = j.value("fraction", cfg.fraction);
        if (j.contains("local")) {
            const json& l = j["local"];
            cfg.lr = l.value("lr", cfg.lr);
            cfg.iterations = l.value("iterations", cfg.iterations);
        }
        if (j.contains("dims")) {
            const json& d = j["dims"];
            cfg.d_text = d.value("d_text", cfg.d_text);
            cfg.vocab = d.value("vocab", cfg.vocab);
        }
        cfg.profile = j.value("profile", cfg.profile);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.workers = j.value("workers", cfg.workers);
        if (j.contains("eval")) {
            const json& e = j["eval"];
            if (e.contains("holdout")) cfg.holdout = corpus_source_from_json(e["holdout"]);
            cfg.match_threshold = e.value("threshold", cfg.match_threshold);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed experiment config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["corpus"] = corpus_source_to_json(corpus);
    j["partition"] = {{"scheme", std::string(to_string(partition.scheme))},
                      {"K", partition.clients},
                      {"gamma", partition.gamma}};
    j["strategy"] = {{"name", std::string(to_string(strategy.strategy))},
                     {"lambda", strategy.lambda},
                     {"mu", strategy.mu},
                     {"server_lr", strategy.server_lr},
                     {"beta", strategy.beta},
                     {"beta1", strategy.beta1},
                     {"beta2", strategy.beta2},
                     {"eta", strategy.eta},
                     {"tau", strategy.tau}};
    j["mode"] = std::string(to_string(mode));
    j["rounds"] = rounds;
    j["fraction"] = fraction;
    j["local"] = {{"lr", lr}, {"iterations", iterations}};
    j["dims"] = {{"d_text", d_text}, {"vocab", vocab}};
    j["profile"] = profile;
    j["seed"] = seed;
    j["workers"] = workers;
    json eval = json::object();
    if (holdout) eval["holdout"] = corpus_source_to_json(*holdout);
    eval["threshold"] = match_threshold;
    j["eval"] = std::move(eval);
    return j.dump(2);
}

MetricsReport evaluate_model(const ModelParams& params, const TextVocab& vocab,
                             const std::vector<Episode>& episodes, double threshold,
                             int workers) {
    if (episodes.empty()) throw ValidationError("evaluate_model needs a non-empty corpus");
    std::vector<std::vector<StepMatch>> per_episode(episodes.size());
    parallel_for(episodes.size(), workers, [&](std::size_t i) {
        const Episode& ep = episodes[i];
        for (const auto& step : ep.steps) {
            auto features = featurize(ep.high_level, step.screenshot,
                                      {params.d_text(),
                                       static_cast<int>(step.screenshot.features.size())});
            Action pred = predict_action(params, features, vocab);
            per_episode[i].push_back(match_action(pred, step.action, threshold));
        }
    });
    std::vector<StepMatch> matches;
    for (const auto& ms : per_episode) matches.insert(matches.end(), ms.begin(), ms.end());
    return compute_metrics(matches);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const ActionSpaceProfile& profile = ActionSpaceProfile::by_name(config.profile);

    std::vector<Episode> corpus = config.corpus.materialize(config.seed);
    if (corpus.empty()) throw ValidationError("training corpus is empty");
    for (const auto& ep : corpus) ep.validate(profile);

    // Central mode is a single client holding the whole corpus; local mode
    // partitions normally but only ever trains client 0.
    std::vector<ClientDataset> clients;
    double fraction = config.fraction;
    if (config.mode == TrainMode::Central) {
        ClientDataset all;
        all.client_id = 0;
        all.episodes = corpus;
        clients.push_back(std::move(all));
        fraction = 1.0;
    } else {
        clients = partition(corpus, config.partition, config.seed);
        if (config.mode == TrainMode::Local) {
            clients.resize(1);
            fraction = 1.0;
        }
    }

    double resolved_lambda = config.strategy.lambda;
    if (resolved_lambda < 0.0) {
        resolved_lambda = static_cast<double>(total_steps(corpus)) /
                          static_cast<double>(corpus.size());
    }
    StrategyConfig strategy = config.strategy;
    strategy.lambda = resolved_lambda;

    TextVocab vocab = TextVocab::build(corpus, config.vocab);
    int d = static_cast<int>(corpus.front().steps.front().screenshot.features.size());

    std::vector<FedClient> fed_clients;
    for (const auto& c : clients) {
        FedClient fc;
        fc.id = c.client_id;
        fc.n_epi = c.n_epi();
        fc.n_steps = c.n_steps();
        fc.samples = build_samples(c.episodes, config.d_text);
        fed_clients.push_back(std::move(fc));
    }

    std::optional<std::vector<Episode>> holdout;
    if (config.holdout) {
        holdout = config.holdout->materialize(config.seed + 1);
        for (const auto& ep : *holdout) ep.validate(profile);
    }

    ServerState state = ServerState::init(ModelParams(profile, config.d_text, d, config.vocab),
                                          config.seed, static_cast<int>(fed_clients.size()));

    RoundOptions options;
    options.fraction = fraction;
    options.lr = config.lr;
    options.iterations = config.iterations;
    options.workers = config.workers;

    ExperimentResult result;
    result.resolved_lambda = resolved_lambda;
    result.client_stats = dataset_stats(clients);
    for (int r = 0; r < config.rounds; ++r) {
        RoundReport report = run_round(state, fed_clients, strategy, options);
        if (holdout) {
            report.eval = evaluate_model(state.global, vocab, *holdout, config.match_threshold,
                                         config.workers);
        }
        result.reports.push_back(std::move(report));
    }

    result.final_checkpoint.params = std::move(state.global);
    result.final_checkpoint.vocab = std::move(vocab);
    result.final_checkpoint.meta = {
        {"strategy", std::string(to_string(strategy.strategy))},
        {"scheme", std::string(to_string(config.partition.scheme))},
        {"mode", std::string(to_string(config.mode))},
        {"rounds", std::to_string(config.rounds)},
        {"seed", std::to_string(config.seed)},
        {"lambda", std::to_string(resolved_lambda)},
        {"profile", config.profile},
    };
    return result;
}

}  // namespace fedgui
