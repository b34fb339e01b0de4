#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedgui/episode.hpp"

namespace fedgui {

enum class Scheme { Iid, StepSkew, EpisodeSkew, BothSkew };

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view s);

struct PartitionScheme {
    Scheme scheme = Scheme::Iid;
    int clients = 10;    // K
    double gamma = 0.5;  // skew strength for the episode-count ramp

    void validate() const;
};

struct ClientDataset {
    int client_id = 0;
    std::vector<Episode> episodes;

    std::size_t n_epi() const { return episodes.size(); }
    std::size_t n_steps() const { return total_steps(episodes); }
};

/// Splits the corpus into K disjoint client datasets covering it exactly.
///
///   Iid         seeded shuffle, equal episode counts
///   StepSkew    sort by length, deal contiguous blocks: equal n_epi, skewed n_steps
///   EpisodeSkew episode counts follow a (1+gamma)^k ramp, then 1-for-1 swaps
///               pull every client's n_steps toward the mean (within 5% when
///               the ramp makes that arithmetically reachable)
///   BothSkew    the ramp alone, steps left wherever they fall
std::vector<ClientDataset> partition(const std::vector<Episode>& episodes,
                                     const PartitionScheme& scheme, std::uint64_t seed);

struct ClientStats {
    int client_id = 0;
    std::size_t n_epi = 0;
    std::size_t n_steps = 0;
    double mean_length = 0.0;
};

std::vector<ClientStats> dataset_stats(const std::vector<ClientDataset>& clients);

/// {scheme, K, seed, clients:[{client_id, episode_ids}]}; enough to
/// re-materialize an identical split from the same corpus.
void save_split_manifest(const std::vector<ClientDataset>& clients, const PartitionScheme& scheme,
                         std::uint64_t seed, const std::string& path);
std::vector<ClientDataset> apply_split_manifest(const std::vector<Episode>& corpus,
                                                const std::string& path);

}  // namespace fedgui
