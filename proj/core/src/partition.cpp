#include "fedgui/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "fedgui/errors.hpp"
#include "fedgui/rng.hpp"

namespace fedgui {

using nlohmann::json;

namespace {

/// Episode counts proportional to (1+gamma)^k, rounded to sum to n with
/// every client keeping at least one episode.
std::vector<std::size_t> ramp_counts(std::size_t n, int k, double gamma) {
    std::vector<double> weights(static_cast<std::size_t>(k));
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        weights[static_cast<std::size_t>(i)] = std::pow(1.0 + gamma, i);
        total += weights[static_cast<std::size_t>(i)];
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    std::vector<std::pair<double, int>> fractional;
    std::size_t assigned = 0;
    for (int i = 0; i < k; ++i) {
        double raw = static_cast<double>(n) * weights[static_cast<std::size_t>(i)] / total;
        counts[static_cast<std::size_t>(i)] = static_cast<std::size_t>(raw);
        assigned += counts[static_cast<std::size_t>(i)];
        fractional.emplace_back(raw - std::floor(raw), i);
    }
    std::sort(fractional.begin(), fractional.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
        counts[static_cast<std::size_t>(fractional[i % fractional.size()].second)]++;
    }
    // Nobody may end up empty; take from the fullest client.
    for (auto& c : counts) {
        while (c == 0) {
            auto fullest = std::max_element(counts.begin(), counts.end());
            --(*fullest);
            ++c;
        }
    }
    return counts;
}

std::vector<ClientDataset> deal_by_counts(const std::vector<Episode>& episodes,
                                          const std::vector<std::size_t>& order,
                                          const std::vector<std::size_t>& counts) {
    std::vector<ClientDataset> clients(counts.size());
    std::size_t pos = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        clients[k].client_id = static_cast<int>(k);
        for (std::size_t i = 0; i < counts[k]; ++i) {
            clients[k].episodes.push_back(episodes[order[pos++]]);
        }
    }
    return clients;
}

/// 1-for-1 episode swaps between the step-richest and step-poorest clients.
/// Keeps episode counts (the ramp) intact; stops at the 5% band around the
/// mean or when no swap improves the spread any further.
void rebalance_steps(std::vector<ClientDataset>& clients) {
    const double mean = static_cast<double>(std::accumulate(
                            clients.begin(), clients.end(), std::size_t{0},
                            [](std::size_t acc, const ClientDataset& c) {
                                return acc + c.n_steps();
                            })) /
                        static_cast<double>(clients.size());
    const double lo = 0.95 * mean, hi = 1.05 * mean;

    std::vector<double> totals(clients.size());
    for (std::size_t k = 0; k < clients.size(); ++k) {
        totals[k] = static_cast<double>(clients[k].n_steps());
    }

    for (std::size_t iter = 0; iter < 64 * clients.size() * clients.size() + 4096; ++iter) {
        std::size_t a = static_cast<std::size_t>(
            std::max_element(totals.begin(), totals.end()) - totals.begin());
        std::size_t b = static_cast<std::size_t>(
            std::min_element(totals.begin(), totals.end()) - totals.begin());
        if (totals[a] <= hi && totals[b] >= lo) break;

        double diff = totals[a] - totals[b];
        double best_gain = 0.0;
        std::size_t best_i = 0, best_j = 0;
        for (std::size_t i = 0; i < clients[a].episodes.size(); ++i) {
            double la = static_cast<double>(clients[a].episodes[i].step_count());
            for (std::size_t j = 0; j < clients[b].episodes.size(); ++j) {
                double lb = static_cast<double>(clients[b].episodes[j].step_count());
                double delta = la - lb;  // step mass moved a -> b
                double new_diff = std::abs(diff - 2.0 * delta);
                if (diff - new_diff > best_gain + 1e-12) {
                    best_gain = diff - new_diff;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_gain <= 0.0) break;
        std::swap(clients[a].episodes[best_i], clients[b].episodes[best_j]);
        totals[a] = static_cast<double>(clients[a].n_steps());
        totals[b] = static_cast<double>(clients[b].n_steps());
    }
}

}  // namespace

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::Iid: return "iid";
        case Scheme::StepSkew: return "step_skew";
        case Scheme::EpisodeSkew: return "episode_skew";
        case Scheme::BothSkew: return "both_skew";
    }
    return "iid";
}

Scheme scheme_from_string(std::string_view s) {
    if (s == "iid") return Scheme::Iid;
    if (s == "step_skew") return Scheme::StepSkew;
    if (s == "episode_skew") return Scheme::EpisodeSkew;
    if (s == "both_skew") return Scheme::BothSkew;
    throw ValidationError("unknown partition scheme '" + std::string(s) +
                          "' (expected iid, step_skew, episode_skew, both_skew)");
}

void PartitionScheme::validate() const {
    if (clients < 1) throw ValidationError("partition needs K >= 1");
    if (gamma < 0.0) throw ValidationError("partition gamma must be >= 0");
}

std::vector<ClientDataset> partition(const std::vector<Episode>& episodes,
                                     const PartitionScheme& scheme, std::uint64_t seed) {
    scheme.validate();
    const std::size_t n = episodes.size();
    const auto k = static_cast<std::size_t>(scheme.clients);
    if (n < k) {
        throw ValidationError("cannot split " + std::to_string(n) + " episodes across K=" +
                              std::to_string(k) + " clients");
    }
    if ((scheme.scheme == Scheme::Iid || scheme.scheme == Scheme::StepSkew) && n % k != 0) {
        throw ValidationError(to_string(scheme.scheme).data() +
                              std::string(" requires |episodes| divisible by K; got ") +
                              std::to_string(n) + " / " + std::to_string(k));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = Rng::derive(seed, "partition");

    switch (scheme.scheme) {
        case Scheme::Iid: {
            rng.shuffle(order);
            return deal_by_counts(episodes, order, std::vector<std::size_t>(k, n / k));
        }
        case Scheme::StepSkew: {
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return episodes[a].step_count() < episodes[b].step_count();
            });
            return deal_by_counts(episodes, order, std::vector<std::size_t>(k, n / k));
        }
        case Scheme::EpisodeSkew: {
            rng.shuffle(order);
            auto clients = deal_by_counts(episodes, order, ramp_counts(n, scheme.clients,
                                                                       scheme.gamma));
            rebalance_steps(clients);
            return clients;
        }
        case Scheme::BothSkew: {
            rng.shuffle(order);
            return deal_by_counts(episodes, order, ramp_counts(n, scheme.clients, scheme.gamma));
        }
    }
    throw ValidationError("unreachable partition scheme");
}

std::vector<ClientStats> dataset_stats(const std::vector<ClientDataset>& clients) {
    if (clients.empty()) throw ValidationError("dataset_stats needs at least one client");
    std::vector<ClientStats> stats;
    for (const auto& c : clients) {
        if (c.episodes.empty()) {
            throw ValidationError("client " + std::to_string(c.client_id) + " has no episodes");
        }
        ClientStats s;
        s.client_id = c.client_id;
        s.n_epi = c.n_epi();
        s.n_steps = c.n_steps();
        s.mean_length = static_cast<double>(s.n_steps) / static_cast<double>(s.n_epi);
        stats.push_back(s);
    }
    return stats;
}

void save_split_manifest(const std::vector<ClientDataset>& clients, const PartitionScheme& scheme,
                         std::uint64_t seed, const std::string& path) {
    json j;
    j["scheme"] = std::string(to_string(scheme.scheme));
    j["K"] = scheme.clients;
    j["gamma"] = scheme.gamma;
    j["seed"] = seed;
    json arr = json::array();
    for (const auto& c : clients) {
        json cj;
        cj["client_id"] = c.client_id;
        json ids = json::array();
        for (const auto& ep : c.episodes) ids.push_back(ep.id);
        cj["episode_ids"] = std::move(ids);
        arr.push_back(std::move(cj));
    }
    j["clients"] = std::move(arr);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

std::vector<ClientDataset> apply_split_manifest(const std::vector<Episode>& corpus,
                                                const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(path + ": malformed split manifest: " + e.what());
    }
    std::unordered_map<std::string, const Episode*> by_id;
    for (const auto& ep : corpus) {
        if (!by_id.emplace(ep.id, &ep).second) {
            throw ValidationError("corpus has duplicate episode id '" + ep.id + "'");
        }
    }
    std::vector<ClientDataset> clients;
    for (const auto& cj : j.at("clients")) {
        ClientDataset c;
        c.client_id = cj.at("client_id").get<int>();
        for (const auto& id : cj.at("episode_ids")) {
            auto it = by_id.find(id.get<std::string>());
            if (it == by_id.end()) {
                throw ValidationError(path + ": episode id '" + id.get<std::string>() +
                                      "' not present in the corpus");
            }
            c.episodes.push_back(*it->second);
        }
        clients.push_back(std::move(c));
    }
    return clients;
}

}  // namespace fedgui
