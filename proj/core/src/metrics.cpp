#include "fedgui/metrics.hpp"

#include <cmath>
#include <map>

#include "fedgui/errors.hpp"
#include "fedgui/featurize.hpp"

namespace fedgui {

namespace {

std::map<std::string, int> token_counts(std::string_view s) {
    std::map<std::string, int> counts;
    for (auto& tok : tokenize(s)) counts[tok]++;
    return counts;
}

std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string>& tokens,
                                                     int n) {
    std::map<std::vector<std::string>, int> counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
        counts[std::vector<std::string>(tokens.begin() + static_cast<long>(i),
                                        tokens.begin() + static_cast<long>(i) + n)]++;
    }
    return counts;
}

int clipped_overlap(const std::map<std::vector<std::string>, int>& cand,
                    const std::map<std::vector<std::string>, int>& ref) {
    int overlap = 0;
    for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) overlap += std::min(count, it->second);
    }
    return overlap;
}

RougeScore rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                   int n) {
    auto cand_counts = ngram_counts(cand, n);
    auto ref_counts = ngram_counts(ref, n);
    int cand_total = 0, ref_total = 0;
    for (const auto& [_, c] : cand_counts) cand_total += c;
    for (const auto& [_, c] : ref_counts) ref_total += c;
    int overlap = clipped_overlap(cand_counts, ref_counts);
    RougeScore s;
    s.precision = cand_total > 0 ? static_cast<double>(overlap) / cand_total : 0.0;
    s.recall = ref_total > 0 ? static_cast<double>(overlap) / ref_total : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> dp(a.size() + 1,
                                             std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                            : std::max(dp[i - 1][j], dp[i][j - 1]);
        }
    }
    return dp[a.size()][b.size()];
}

}  // namespace

StepMatch match_action(const Action& pred, const Action& gold, double threshold) {
    StepMatch m;
    m.type_ok = pred.kind == gold.kind;
    switch (gold.kind) {
        case ActionKind::Click:
        case ActionKind::LongPress: {
            bool in_range = false;
            if (pred.point && gold.point) {
                double dx = pred.point->x - gold.point->x;
                double dy = pred.point->y - gold.point->y;
                in_range = std::sqrt(dx * dx + dy * dy) <= threshold;
            }
            m.ground_ok = in_range;
            m.sr_ok = m.type_ok && in_range;
            break;
        }
        case ActionKind::Type:
        case ActionKind::OpenApp: {
            std::string_view pred_text = pred.text ? std::string_view(*pred.text) : "";
            std::string_view gold_text = gold.text ? std::string_view(*gold.text) : "";
            m.sr_ok = m.type_ok && token_f1(pred_text, gold_text) > 0.5;
            break;
        }
        case ActionKind::Scroll:
            m.sr_ok = m.type_ok && pred.direction && gold.direction &&
                      *pred.direction == *gold.direction;
            break;
        default:
            m.sr_ok = m.type_ok;
            break;
    }
    return m;
}

MetricsReport compute_metrics(const std::vector<StepMatch>& matches) {
    if (matches.empty()) throw ValidationError("compute_metrics needs at least one step");
    MetricsReport r;
    r.n_steps = matches.size();
    std::size_t type_hits = 0, sr_hits = 0, ground_hits = 0;
    for (const auto& m : matches) {
        type_hits += m.type_ok ? 1 : 0;
        sr_hits += m.sr_ok ? 1 : 0;
        if (m.ground_ok.has_value()) {
            r.n_coord_steps++;
            ground_hits += *m.ground_ok ? 1 : 0;
        }
    }
    r.type_acc = static_cast<double>(type_hits) / static_cast<double>(r.n_steps);
    r.sr = static_cast<double>(sr_hits) / static_cast<double>(r.n_steps);
    if (r.n_coord_steps > 0) {
        r.ground_acc = static_cast<double>(ground_hits) / static_cast<double>(r.n_coord_steps);
    }
    return r;
}

double token_f1(std::string_view a, std::string_view b) {
    auto ca = token_counts(a);
    auto cb = token_counts(b);
    std::size_t na = 0, nb = 0;
    for (const auto& [_, c] : ca) na += static_cast<std::size_t>(c);
    for (const auto& [_, c] : cb) nb += static_cast<std::size_t>(c);
    if (na == 0 && nb == 0) return 1.0;
    if (na == 0 || nb == 0) return 0.0;
    std::size_t overlap = 0;
    for (const auto& [tok, c] : ca) {
        auto it = cb.find(tok);
        if (it != cb.end()) overlap += static_cast<std::size_t>(std::min(c, it->second));
    }
    double p = static_cast<double>(overlap) / static_cast<double>(na);
    double r = static_cast<double>(overlap) / static_cast<double>(nb);
    return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

double bleu(std::string_view candidate, std::string_view reference, int max_n) {
    auto cand = tokenize(candidate);
    auto ref = tokenize(reference);
    if (ref.empty()) throw ValidationError("bleu needs a non-empty reference");
    if (cand.empty()) return 0.0;

    double log_sum = 0.0;
    for (int n = 1; n <= max_n; ++n) {
        auto cand_counts = ngram_counts(cand, n);
        int total = 0;
        for (const auto& [_, c] : cand_counts) total += c;
        double p;
        if (total == 0) {
            p = 1.0;  // candidate shorter than n: nothing to score at this order
        } else {
            int overlap = clipped_overlap(cand_counts, ngram_counts(ref, n));
            if (overlap == 0 && n >= 2) {
                p = 1.0 / (static_cast<double>(total) + 1.0);
            } else if (overlap == 0) {
                return 0.0;  // no unigram overlap at all
            } else {
                p = static_cast<double>(overlap) / static_cast<double>(total);
            }
        }
        log_sum += std::log(p);
    }
    double brevity = cand.size() >= ref.size()
                         ? 1.0
                         : std::exp(1.0 - static_cast<double>(ref.size()) /
                                              static_cast<double>(cand.size()));
    return brevity * std::exp(log_sum / static_cast<double>(max_n));
}

RougeReport rouge(std::string_view candidate, std::string_view reference) {
    auto cand = tokenize(candidate);
    auto ref = tokenize(reference);
    RougeReport report;
    report.rouge1 = rouge_n(cand, ref, 1);
    report.rouge2 = rouge_n(cand, ref, 2);
    if (!cand.empty() && !ref.empty()) {
        auto lcs = static_cast<double>(lcs_length(cand, ref));
        report.rougeL.precision = lcs / static_cast<double>(cand.size());
        report.rougeL.recall = lcs / static_cast<double>(ref.size());
        double pr = report.rougeL.precision + report.rougeL.recall;
        report.rougeL.f1 = pr > 0.0 ? 2.0 * report.rougeL.precision * report.rougeL.recall / pr
                                    : 0.0;
    }
    return report;
}

double tfidf_cosine(const std::vector<std::string>& corpus, std::string_view a,
                    std::string_view b) {
    std::map<std::string, int> df;
    for (const auto& doc : corpus) {
        for (const auto& [tok, _] : token_counts(doc)) df[tok]++;
    }
    const double n_docs = static_cast<double>(corpus.size());
    auto weight = [&](const std::string& tok, int tf) {
        auto it = df.find(tok);
        double d = it == df.end() ? 1.0 : static_cast<double>(it->second);
        return static_cast<double>(tf) * (1.0 + std::log(n_docs / d));
    };
    auto ca = token_counts(a);
    auto cb = token_counts(b);
    double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (const auto& [tok, tf] : ca) {
        double w = weight(tok, tf);
        norm_a += w * w;
        auto it = cb.find(tok);
        if (it != cb.end()) dot += w * weight(tok, it->second);
    }
    for (const auto& [tok, tf] : cb) {
        double w = weight(tok, tf);
        norm_b += w * w;
    }
    if (norm_a == 0.0 && norm_b == 0.0) return 1.0;  // both empty
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

QualityReport text_quality(const std::vector<std::string>& corpus, std::string_view candidate,
                           std::string_view reference) {
    QualityReport q;
    q.bleu = bleu(candidate, reference);
    q.rouge = rouge(candidate, reference);
    q.tfidf_cosine = tfidf_cosine(corpus, candidate, reference);
    return q;
}

std::vector<Episode> filter_unanchored_clicks(const std::vector<Episode>& episodes) {
    std::vector<Episode> out;
    for (const auto& ep : episodes) {
        Episode kept = ep;
        kept.steps.clear();
        for (const auto& step : ep.steps) {
            if (step.action.kind == ActionKind::Click) {
                bool anchored = false;
                for (const auto& el : step.screenshot.elements) {
                    anchored = anchored || el.contains(*step.action.point);
                }
                if (!anchored) continue;
            }
            kept.steps.push_back(step);
        }
        if (!kept.steps.empty()) out.push_back(std::move(kept));
    }
    return out;
}

void CostInputs::validate() const {
    if (price_per_hour <= 0.0) throw ValidationError("cost: price_per_hour must be positive");
    if (seconds <= 0.0) throw ValidationError("cost: seconds must be positive");
    if (mem_used_mb <= 0.0) throw ValidationError("cost: mem_used_mb must be positive");
    if (mem_total_mb <= 0.0) throw ValidationError("cost: mem_total_mb must be positive");
    if (mem_used_mb > mem_total_mb) {
        throw ValidationError("cost: mem_used_mb exceeds mem_total_mb");
    }
}

double annotation_cost_cents(const CostInputs& in) {
    in.validate();
    return (in.price_per_hour * 100.0 / 3600.0) * in.seconds * (in.mem_used_mb / in.mem_total_mb);
}

}  // namespace fedgui
