#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "fedgui/metrics.hpp"
#include "fedgui/model.hpp"
#include "fedgui/rng.hpp"

namespace fedgui {

enum class Strategy {
    FedAvg,
    Adapted,
    FedProx,
    Scaffold,
    FedAvgM,
    FedAdagrad,
    FedYogi,
    FedAdam,
};

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct StrategyConfig {
    Strategy strategy = Strategy::FedAvg;
    /// Adapted sample-count ratio; negative means "resolve to the corpus
    /// mean episode length" at experiment setup.
    double lambda = -1.0;
    double mu = 0.2;         // FedProx proximal strength
    double server_lr = 1.0;  // Scaffold
    double beta = 0.9;       // FedAvgM momentum
    double beta1 = 0.9;      // adaptive trio
    double beta2 = 0.999;
    double eta = 1e-3;
    double tau = 1e-6;

    /// Plain for most strategies; Prox under FedProx, Scaffold under Scaffold.
    TrainVariant local_variant() const;
};

struct ClientCounts {
    int client_id = 0;
    std::size_t n_epi = 0;
    std::size_t n_steps = 0;
};

struct WeightEntry {
    int client_id = 0;
    std::size_t n_epi = 0;
    std::size_t n_steps = 0;
    double n_star = 0.0;
    double omega = 0.0;
};

/// ceil(fraction * K) distinct ids, uniform without replacement, sorted.
std::vector<int> sample_clients(int total_clients, double fraction, Rng& rng);

/// n_star = lambda * n_epi + n_steps; omega normalized over the given set.
/// lambda = 0 recovers plain step-count weighting.
std::vector<WeightEntry> adapted_weights(const std::vector<ClientCounts>& clients, double lambda);

struct ClientUpdate {
    std::vector<double> delta;  // local params minus broadcast global
    WeightEntry weight;
    std::vector<double> c_k_old;  // Scaffold only
    std::vector<double> c_k_new;
};

struct ServerState {
    int round = 0;
    ModelParams global;
    std::uint64_t seed = 0;
    int total_clients = 0;
    // strategy state, all sharing the params layout
    std::vector<double> momentum;
    std::vector<double> second_moment;
    std::vector<double> c;                  // Scaffold server control variate
    std::vector<std::vector<double>> c_k;   // per-client control variates

    static ServerState init(ModelParams global, std::uint64_t seed, int total_clients);
};

/// Folds the weighted pseudo-gradient (sum of omega * delta) into the global
/// params under the configured strategy. Weights must already sum to 1.
void aggregate(const StrategyConfig& cfg, ServerState& state,
               const std::vector<ClientUpdate>& updates);

struct FedClient {
    int id = 0;
    std::size_t n_epi = 0;
    std::size_t n_steps = 0;
    std::vector<TrainSample> samples;
};

struct RoundReport {
    int round = 0;
    std::vector<int> sampled;
    std::vector<WeightEntry> weights;
    double mean_loss_before = 0.0;
    double mean_loss_after = 0.0;
    std::optional<MetricsReport> eval;
    double wall_ms = 0.0;
};

struct RoundOptions {
    double fraction = 0.3;
    double lr = 0.05;
    /// Fixed SGD iteration count; 0 means ceil(n_k / 10) per client.
    int iterations = 0;
    int workers = 0;  // 0: hardware concurrency
};

/// One communication round: sample, broadcast, train locally in parallel,
/// weight (adapted lambda for Adapted, step counts otherwise), aggregate.
/// Client randomness derives from (seed, round, client id), so results do
/// not depend on scheduling.
RoundReport run_round(ServerState& state, const std::vector<FedClient>& clients,
                      const StrategyConfig& strategy, const RoundOptions& options);

}  // namespace fedgui
