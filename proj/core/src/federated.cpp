#include "fedgui/federated.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "fedgui/errors.hpp"
#include "fedgui/parallel.hpp"

namespace fedgui {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::FedAvg: return "fedavg";
        case Strategy::Adapted: return "adapted";
        case Strategy::FedProx: return "fedprox";
        case Strategy::Scaffold: return "scaffold";
        case Strategy::FedAvgM: return "fedavgm";
        case Strategy::FedAdagrad: return "fedadagrad";
        case Strategy::FedYogi: return "fedyogi";
        case Strategy::FedAdam: return "fedadam";
    }
    return "fedavg";
}

Strategy strategy_from_string(std::string_view s) {
    for (int i = 0; i <= static_cast<int>(Strategy::FedAdam); ++i) {
        auto st = static_cast<Strategy>(i);
        if (to_string(st) == s) return st;
    }
    throw ValidationError("unknown strategy '" + std::string(s) +
                          "' (expected fedavg, adapted, fedprox, scaffold, fedavgm, "
                          "fedadagrad, fedyogi, fedadam)");
}

TrainVariant StrategyConfig::local_variant() const {
    switch (strategy) {
        case Strategy::FedProx: return TrainVariant::Prox;
        case Strategy::Scaffold: return TrainVariant::Scaffold;
        default: return TrainVariant::Plain;
    }
}

std::vector<int> sample_clients(int total_clients, double fraction, Rng& rng) {
    if (total_clients < 1) throw ValidationError("sample_clients needs K >= 1");
    if (fraction <= 0.0 || fraction > 1.0) {
        throw ValidationError("client fraction must be in (0, 1]");
    }
    // fp guard keeps 0.2 * 10 from ceiling to 3
    int m = static_cast<int>(std::ceil(fraction * total_clients - 1e-9));
    m = std::clamp(m, 1, total_clients);
    std::vector<int> ids(static_cast<std::size_t>(total_clients));
    std::iota(ids.begin(), ids.end(), 0);
    for (int i = 0; i < m; ++i) {
        auto j = static_cast<std::size_t>(i) +
                 rng.index(static_cast<std::size_t>(total_clients - i));
        std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
    }
    ids.resize(static_cast<std::size_t>(m));
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<WeightEntry> adapted_weights(const std::vector<ClientCounts>& clients,
                                         double lambda) {
    if (clients.empty()) throw ValidationError("adapted_weights needs at least one client");
    if (lambda < 0.0) throw ValidationError("adapted_weights needs lambda >= 0");
    std::vector<WeightEntry> weights;
    double total = 0.0;
    for (const auto& c : clients) {
        WeightEntry w;
        w.client_id = c.client_id;
        w.n_epi = c.n_epi;
        w.n_steps = c.n_steps;
        w.n_star = lambda * static_cast<double>(c.n_epi) + static_cast<double>(c.n_steps);
        total += w.n_star;
        weights.push_back(w);
    }
    if (total <= 0.0) {
        throw ValidationError("adapted_weights: all adapted sample counts are zero");
    }
    for (auto& w : weights) w.omega = w.n_star / total;
    return weights;
}

ServerState ServerState::init(ModelParams global, std::uint64_t seed, int total_clients) {
    ServerState s;
    std::size_t n = global.flat().size();
    s.global = std::move(global);
    s.seed = seed;
    s.total_clients = total_clients;
    s.momentum.assign(n, 0.0);
    s.second_moment.assign(n, 0.0);
    s.c.assign(n, 0.0);
    s.c_k.assign(static_cast<std::size_t>(total_clients), std::vector<double>(n, 0.0));
    return s;
}

void aggregate(const StrategyConfig& cfg, ServerState& state,
               const std::vector<ClientUpdate>& updates) {
    if (updates.empty()) throw ValidationError("aggregate needs at least one client update");
    auto& w = state.global.flat();
    const std::size_t n = w.size();

    double omega_sum = 0.0;
    for (const auto& u : updates) {
        if (u.delta.size() != n) {
            throw ValidationError("client delta layout does not match the global params");
        }
        omega_sum += u.weight.omega;
    }
    if (std::abs(omega_sum - 1.0) > 1e-9) {
        throw ValidationError("aggregation weights must sum to 1");
    }

    std::vector<double> pseudo_grad(n, 0.0);
    for (const auto& u : updates) {
        for (std::size_t i = 0; i < n; ++i) pseudo_grad[i] += u.weight.omega * u.delta[i];
    }
    for (double v : pseudo_grad) {
        if (!std::isfinite(v)) throw std::runtime_error("non-finite aggregated update");
    }

    switch (cfg.strategy) {
        case Strategy::FedAvg:
        case Strategy::Adapted:
        case Strategy::FedProx:
            // with sum(omega) = 1 this equals the weighted model average
            for (std::size_t i = 0; i < n; ++i) w[i] += pseudo_grad[i];
            break;
        case Strategy::FedAvgM:
            for (std::size_t i = 0; i < n; ++i) {
                state.momentum[i] = cfg.beta * state.momentum[i] + pseudo_grad[i];
                w[i] += state.momentum[i];
            }
            break;
        case Strategy::FedAdagrad:
        case Strategy::FedYogi:
        case Strategy::FedAdam:
            for (std::size_t i = 0; i < n; ++i) {
                double g = pseudo_grad[i];
                double g2 = g * g;
                state.momentum[i] = cfg.beta1 * state.momentum[i] + (1.0 - cfg.beta1) * g;
                double& v = state.second_moment[i];
                if (cfg.strategy == Strategy::FedAdagrad) {
                    v += g2;
                } else if (cfg.strategy == Strategy::FedYogi) {
                    double sign = v - g2 > 0.0 ? 1.0 : (v - g2 < 0.0 ? -1.0 : 0.0);
                    v -= (1.0 - cfg.beta2) * g2 * sign;
                } else {
                    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g2;
                }
                w[i] += cfg.eta * state.momentum[i] / (std::sqrt(v) + cfg.tau);
            }
            break;
        case Strategy::Scaffold: {
            for (std::size_t i = 0; i < n; ++i) w[i] += cfg.server_lr * pseudo_grad[i];
            // c += |S|/K * mean over sampled clients of (c_k_new - c_k_old)
            double scale = 1.0 / static_cast<double>(state.total_clients);
            for (const auto& u : updates) {
                if (u.c_k_new.size() != n || u.c_k_old.size() != n) {
                    throw ValidationError("scaffold update missing control variates");
                }
                for (std::size_t i = 0; i < n; ++i) {
                    state.c[i] += scale * (u.c_k_new[i] - u.c_k_old[i]);
                }
            }
            break;
        }
    }
}

RoundReport run_round(ServerState& state, const std::vector<FedClient>& clients,
                      const StrategyConfig& strategy, const RoundOptions& options) {
    auto t0 = std::chrono::steady_clock::now();
    if (clients.empty()) throw ValidationError("run_round needs at least one client");
    if (strategy.strategy == Strategy::Adapted && strategy.lambda < 0.0) {
        throw ValidationError("adapted strategy needs a resolved lambda >= 0");
    }
    for (std::size_t i = 0; i < clients.size(); ++i) {
        // sampling and the control-variate store address clients by position
        if (clients[i].id != static_cast<int>(i)) {
            throw ValidationError("client ids must equal their position, got id " +
                                  std::to_string(clients[i].id) + " at " + std::to_string(i));
        }
    }
    if (state.c_k.size() != clients.size()) {
        throw ValidationError("server state was initialized for a different client count");
    }

    Rng sampler = Rng::derive(state.seed, "sample-clients", static_cast<std::uint64_t>(state.round));
    std::vector<int> sampled = sample_clients(static_cast<int>(clients.size()),
                                              options.fraction, sampler);

    struct Slot {
        LocalTrainResult result;
        double loss_before = 0.0;
        double loss_after = 0.0;
    };
    std::vector<Slot> slots(sampled.size());

    parallel_for(sampled.size(), options.workers, [&](std::size_t si) {
        const FedClient& client = clients[static_cast<std::size_t>(sampled[si])];
        try {
            LocalTrainConfig cfg;
            cfg.lr = options.lr;
            cfg.iterations = options.iterations > 0
                                 ? options.iterations
                                 : static_cast<int>((client.samples.size() + 9) / 10);
            cfg.variant = strategy.local_variant();
            cfg.mu = strategy.mu;

            std::uint64_t client_seed =
                Rng::derive(state.seed, "client-train",
                            (static_cast<std::uint64_t>(state.round) << 32) |
                                static_cast<std::uint32_t>(client.id))
                    .next_u64();

            double before = 0.0;
            for (const auto& s : client.samples) before += loss(state.global, s);
            before /= static_cast<double>(client.samples.size());

            Slot slot;
            slot.result = local_train(state.global, client.samples, cfg, state.c,
                                      state.c_k[static_cast<std::size_t>(client.id)],
                                      client_seed);
            double after = 0.0;
            for (const auto& s : client.samples) after += loss(slot.result.params, s);
            after /= static_cast<double>(client.samples.size());
            slot.loss_before = before;
            slot.loss_after = after;
            slots[si] = std::move(slot);
        } catch (const std::exception& e) {
            throw std::runtime_error("round " + std::to_string(state.round) + ", client " +
                                     std::to_string(client.id) + ": " + e.what());
        }
    });

    std::vector<ClientCounts> counts;
    for (int id : sampled) {
        const FedClient& c = clients[static_cast<std::size_t>(id)];
        counts.push_back({c.id, c.n_epi, c.n_steps});
    }
    double lambda = strategy.strategy == Strategy::Adapted ? strategy.lambda : 0.0;
    std::vector<WeightEntry> weights = adapted_weights(counts, lambda);

    std::vector<ClientUpdate> updates;
    for (std::size_t si = 0; si < sampled.size(); ++si) {
        ClientUpdate u;
        u.delta = std::move(slots[si].result.delta);
        u.weight = weights[si];
        if (strategy.strategy == Strategy::Scaffold) {
            u.c_k_old = state.c_k[static_cast<std::size_t>(sampled[si])];
            u.c_k_new = slots[si].result.c_k;
        }
        updates.push_back(std::move(u));
    }
    aggregate(strategy, state, updates);
    if (strategy.strategy == Strategy::Scaffold) {
        for (std::size_t si = 0; si < sampled.size(); ++si) {
            state.c_k[static_cast<std::size_t>(sampled[si])] = std::move(updates[si].c_k_new);
        }
    }

    RoundReport report;
    report.round = state.round;
    report.sampled = sampled;
    report.weights = std::move(weights);
    for (const auto& slot : slots) {
        report.mean_loss_before += slot.loss_before;
        report.mean_loss_after += slot.loss_after;
    }
    report.mean_loss_before /= static_cast<double>(slots.size());
    report.mean_loss_after /= static_cast<double>(slots.size());
    state.round++;
    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return report;
}

}  // namespace fedgui
