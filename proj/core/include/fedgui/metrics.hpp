#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedgui/action.hpp"
#include "fedgui/episode.hpp"

namespace fedgui {

/// Per-step verdicts. ground_ok exists only when the gold step carries a
/// point; sr_ok implies type_ok, and for coordinate steps also ground_ok.
struct StepMatch {
    bool type_ok = false;
    std::optional<bool> ground_ok;
    bool sr_ok = false;
};

/// kinds equal -> type_ok. Coordinate golds: predicted point within
/// `threshold` (fraction of screen width, Euclidean on normalized axes).
/// Text golds: token F1 strictly above 0.5. Scroll: direction must match.
/// Everything else: kind match alone decides sr_ok.
StepMatch match_action(const Action& pred, const Action& gold, double threshold = 0.14);

struct MetricsReport {
    double type_acc = 0.0;
    std::optional<double> ground_acc;  // absent when no coordinate gold steps
    double sr = 0.0;
    std::size_t n_steps = 0;
    std::size_t n_coord_steps = 0;
};

/// type_acc and sr over all steps; ground_acc over coordinate golds only.
MetricsReport compute_metrics(const std::vector<StepMatch>& matches);

/// Multiset F1 over lowercase whitespace tokens. Both empty -> 1, one
/// empty -> 0. Symmetric.
double token_f1(std::string_view a, std::string_view b);

/// Geometric mean of clipped n-gram precisions with brevity penalty.
/// Zero-count precisions for n >= 2 get add-one smoothing; orders with no
/// candidate n-grams contribute 1. Empty candidate scores 0.
double bleu(std::string_view candidate, std::string_view reference, int max_n = 4);

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct RougeReport {
    RougeScore rouge1;
    RougeScore rouge2;
    RougeScore rougeL;  // longest common subsequence
};

RougeReport rouge(std::string_view candidate, std::string_view reference);

/// Cosine over tf-idf vectors with idf(t) = 1 + ln(N / df(t)), df counted
/// over `corpus`. Terms missing from the corpus count as df = 1.
double tfidf_cosine(const std::vector<std::string>& corpus, std::string_view a,
                    std::string_view b);

struct QualityReport {
    double bleu = 0.0;
    RougeReport rouge;
    double tfidf_cosine = 0.0;
};

/// All pairwise scores of candidate vs reference at once.
QualityReport text_quality(const std::vector<std::string>& corpus, std::string_view candidate,
                           std::string_view reference);

/// Drops click steps whose gold point lies in no element of their screenshot
/// (AitW-style records lack the target unit there); episodes left with no
/// steps are dropped entirely. Off by default everywhere.
std::vector<Episode> filter_unanchored_clicks(const std::vector<Episode>& episodes);

struct CostInputs {
    double price_per_hour = 0.0;  // currency per hour for the whole GPU pool
    double seconds = 0.0;
    double mem_used_mb = 0.0;
    double mem_total_mb = 0.0;

    void validate() const;
};

/// cents = price_per_hour * 100 / 3600 * seconds * mem_used / mem_total
double annotation_cost_cents(const CostInputs& in);

}  // namespace fedgui
