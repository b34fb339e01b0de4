#include "fedgui/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "fedgui/errors.hpp"
#include "fedgui/featurize.hpp"
#include "fedgui/rng.hpp"

namespace fedgui {

using nlohmann::json;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void softmax_inplace(std::vector<double>& z) {
    double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::string first_token(std::string_view text) {
    auto toks = tokenize(text);
    return toks.empty() ? std::string{} : toks.front();
}

}  // namespace

int TextVocab::encode(std::string_view token) const {
    if (token.empty()) return 0;
    return 1 + static_cast<int>(fnv1a64(token) % static_cast<std::uint64_t>(size - 1));
}

const std::string& TextVocab::decode(int bucket) const {
    static const std::string empty;
    if (bucket < 0 || bucket >= static_cast<int>(words.size())) return empty;
    return words[static_cast<std::size_t>(bucket)];
}

TextVocab TextVocab::build(const std::vector<Episode>& corpus, int size) {
    if (size < 2) throw ValidationError("vocab size must be >= 2");
    TextVocab v;
    v.size = size;
    v.words.assign(static_cast<std::size_t>(size), "");
    for (const auto& ep : corpus) {
        for (const auto& step : ep.steps) {
            if (!step.action.text) continue;
            for (const auto& tok : tokenize(*step.action.text)) {
                auto bucket = static_cast<std::size_t>(v.encode(tok));
                if (v.words[bucket].empty()) v.words[bucket] = tok;
            }
        }
    }
    return v;
}

ModelParams::ModelParams(const ActionSpaceProfile& profile, int d_text, int d, int vocab)
    : kinds_(profile.allowed), d_in_(d_text + d), d_text_(d_text), vocab_(vocab) {
    if (vocab < 2) throw ValidationError("vocab size must be >= 2");
    int type_rows = static_cast<int>(kinds_.size()) + 3;
    segments_ = {
        {"type_head", type_rows, d_in_, 0},
        {"ground_head", 2, d_in_, static_cast<std::size_t>(type_rows) *
                                      static_cast<std::size_t>(d_in_)},
        {"text_head", vocab, d_in_,
         static_cast<std::size_t>(type_rows + 2) * static_cast<std::size_t>(d_in_)},
    };
    data_.assign(segments_.back().offset +
                     static_cast<std::size_t>(vocab) * static_cast<std::size_t>(d_in_),
                 0.0);
}

std::span<const double> ModelParams::row(const std::string& segment, int r) const {
    for (const auto& s : segments_) {
        if (s.name == segment) {
            return {data_.data() + s.offset + static_cast<std::size_t>(r) *
                                                  static_cast<std::size_t>(s.cols),
                    static_cast<std::size_t>(s.cols)};
        }
    }
    throw ValidationError("unknown segment '" + segment + "'");
}

std::span<double> ModelParams::row(const std::string& segment, int r) {
    auto view = static_cast<const ModelParams*>(this)->row(segment, r);
    return {data_.data() + (view.data() - data_.data()), view.size()};
}

int ModelParams::kind_row(ActionKind kind) const {
    auto it = std::find(kinds_.begin(), kinds_.end(), kind);
    if (it == kinds_.end()) {
        throw ValidationError("kind " + std::string(to_string(kind)) +
                              " outside the model's action space");
    }
    return static_cast<int>(it - kinds_.begin());
}

std::array<int, 4> ModelParams::direction_rows() const {
    int r = kind_rows();
    return {kind_row(ActionKind::Scroll), r - 3, r - 2, r - 1};
}

bool ModelParams::aggregable_with(const ModelParams& other) const {
    return segments_ == other.segments_ && kinds_ == other.kinds_;
}

Prediction forward(const ModelParams& params, std::span<const double> features) {
    if (static_cast<int>(features.size()) != params.d_in()) {
        throw ValidationError("feature length " + std::to_string(features.size()) +
                              " does not match model d_in=" + std::to_string(params.d_in()));
    }
    Prediction out;
    out.kind_logits.resize(static_cast<std::size_t>(params.kind_rows()));
    for (int r = 0; r < params.kind_rows(); ++r) {
        out.kind_logits[static_cast<std::size_t>(r)] = dot(params.row("type_head", r), features);
    }
    out.point.x = sigmoid(dot(params.row("ground_head", 0), features));
    out.point.y = sigmoid(dot(params.row("ground_head", 1), features));
    out.text_scores.resize(static_cast<std::size_t>(params.vocab()));
    for (int r = 0; r < params.vocab(); ++r) {
        out.text_scores[static_cast<std::size_t>(r)] = dot(params.row("text_head", r), features);
    }
    return out;
}

Action predict_action(const ModelParams& params, std::span<const double> features,
                      const TextVocab& vocab) {
    Prediction p = forward(params, features);
    // argmax over the kind classes only; the 3 trailing rows are direction slots
    int best = 0;
    for (int r = 1; r < static_cast<int>(params.kinds().size()); ++r) {
        if (p.kind_logits[static_cast<std::size_t>(r)] >
            p.kind_logits[static_cast<std::size_t>(best)]) {
            best = r;
        }
    }
    Action a;
    a.kind = params.kinds()[static_cast<std::size_t>(best)];
    if (a.carries_point()) {
        a.point = p.point;
    } else if (a.carries_text()) {
        auto top = std::max_element(p.text_scores.begin(), p.text_scores.end());
        a.text = vocab.decode(static_cast<int>(top - p.text_scores.begin()));
    } else if (a.kind == ActionKind::Scroll) {
        auto rows = params.direction_rows();
        int best_dir = 0;
        for (int i = 1; i < 4; ++i) {
            if (p.kind_logits[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] >
                p.kind_logits[static_cast<std::size_t>(rows[static_cast<std::size_t>(best_dir)])]) {
                best_dir = i;
            }
        }
        a.direction = static_cast<ScrollDirection>(best_dir);
    }
    return a;
}

namespace {

/// Shared by loss() and grad(). The gradient pointer may be null.
double loss_impl(const ModelParams& params, const TrainSample& sample,
                 std::vector<double>* grad_out) {
    const auto& x = sample.features;
    if (static_cast<int>(x.size()) != params.d_in()) {
        throw ValidationError("sample feature length does not match model d_in");
    }
    sample.target.validate();
    const int target_row = params.kind_row(sample.target.kind);
    const int rows = params.kind_rows();
    double total = 0.0;

    auto add_outer = [&](const std::string& segment, int r, double coeff) {
        if (!grad_out) return;
        auto row_view = params.row(segment, r);
        std::size_t base = static_cast<std::size_t>(row_view.data() - params.flat().data());
        for (std::size_t i = 0; i < x.size(); ++i) {
            (*grad_out)[base + i] += coeff * x[i];
        }
    };

    // Kind cross-entropy over all rows (directions included in the softmax).
    std::vector<double> p(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
        p[static_cast<std::size_t>(r)] = dot(params.row("type_head", r), x);
    }
    softmax_inplace(p);
    total += -std::log(std::max(p[static_cast<std::size_t>(target_row)], 1e-300));
    for (int r = 0; r < rows; ++r) {
        double coeff = p[static_cast<std::size_t>(r)] - (r == target_row ? 1.0 : 0.0);
        add_outer("type_head", r, coeff);
    }

    if (sample.target.point) {
        double gx[2] = {sample.target.point->x, sample.target.point->y};
        for (int r = 0; r < 2; ++r) {
            double s = sigmoid(dot(params.row("ground_head", r), x));
            double err = s - gx[r];
            total += err * err;
            add_outer("ground_head", r, 2.0 * err * s * (1.0 - s));
        }
    }

    if (sample.target.text) {
        // First-token supervision against the hashed vocabulary.
        TextVocab codec;
        codec.size = params.vocab();
        int target_bucket = codec.encode(first_token(*sample.target.text));
        std::vector<double> q(static_cast<std::size_t>(params.vocab()));
        for (int r = 0; r < params.vocab(); ++r) {
            q[static_cast<std::size_t>(r)] = dot(params.row("text_head", r), x);
        }
        softmax_inplace(q);
        total += -std::log(std::max(q[static_cast<std::size_t>(target_bucket)], 1e-300));
        for (int r = 0; r < params.vocab(); ++r) {
            double coeff = q[static_cast<std::size_t>(r)] - (r == target_bucket ? 1.0 : 0.0);
            add_outer("text_head", r, coeff);
        }
    }

    if (sample.target.kind == ActionKind::Scroll) {
        auto dir_rows = params.direction_rows();
        int target_dir = static_cast<int>(*sample.target.direction);
        std::vector<double> q(4);
        for (int i = 0; i < 4; ++i) {
            q[static_cast<std::size_t>(i)] =
                dot(params.row("type_head", dir_rows[static_cast<std::size_t>(i)]), x);
        }
        softmax_inplace(q);
        total += -std::log(std::max(q[static_cast<std::size_t>(target_dir)], 1e-300));
        for (int i = 0; i < 4; ++i) {
            double coeff = q[static_cast<std::size_t>(i)] - (i == target_dir ? 1.0 : 0.0);
            add_outer("type_head", dir_rows[static_cast<std::size_t>(i)], coeff);
        }
    }

    return total;
}

}  // namespace

double loss(const ModelParams& params, const TrainSample& sample) {
    return loss_impl(params, sample, nullptr);
}

std::vector<double> grad(const ModelParams& params, const TrainSample& sample) {
    std::vector<double> g(params.flat().size(), 0.0);
    loss_impl(params, sample, &g);
    return g;
}

LocalTrainResult local_train(const ModelParams& global, const std::vector<TrainSample>& samples,
                             const LocalTrainConfig& cfg, const std::vector<double>& c,
                             const std::vector<double>& c_k, std::uint64_t seed) {
    if (samples.empty()) throw ValidationError("local_train needs a non-empty dataset");
    if (cfg.lr <= 0.0) throw ValidationError("local_train needs lr > 0");
    if (cfg.iterations < 1) throw ValidationError("local_train needs iterations >= 1");
    if (cfg.variant == TrainVariant::Scaffold &&
        (c.size() != global.flat().size() || c_k.size() != global.flat().size())) {
        throw ValidationError("scaffold control variates do not match the params layout");
    }

    LocalTrainResult out;
    out.params = global;
    auto& w = out.params.flat();
    const auto& w0 = global.flat();

    Rng rng = Rng::derive(seed, "local-train");
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t cursor = order.size();  // forces a shuffle before the first draw

    for (int it = 0; it < cfg.iterations; ++it) {
        if (cursor == order.size()) {
            rng.shuffle(order);
            cursor = 0;
        }
        const TrainSample& sample = samples[order[cursor++]];
        std::vector<double> g = grad(out.params, sample);
        for (std::size_t i = 0; i < w.size(); ++i) {
            double step = g[i];
            if (cfg.variant == TrainVariant::Prox) {
                step += cfg.mu * (w[i] - w0[i]);
            } else if (cfg.variant == TrainVariant::Scaffold) {
                step += c[i] - c_k[i];
            }
            w[i] -= cfg.lr * step;
            if (!std::isfinite(w[i])) {
                throw std::runtime_error("non-finite parameter update at iteration " +
                                         std::to_string(it));
            }
        }
    }

    out.delta.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out.delta[i] = w[i] - w0[i];

    if (cfg.variant == TrainVariant::Scaffold) {
        // c_k <- c_k - c + (w_global - w) / (R * lr)
        out.c_k.resize(w.size());
        double inv = 1.0 / (static_cast<double>(cfg.iterations) * cfg.lr);
        for (std::size_t i = 0; i < w.size(); ++i) {
            out.c_k[i] = c_k[i] - c[i] + (w0[i] - w[i]) * inv;
        }
    } else {
        out.c_k = c_k;
    }
    return out;
}

std::vector<TrainSample> build_samples(const std::vector<Episode>& episodes, int d_text) {
    std::vector<TrainSample> samples;
    for (const auto& ep : episodes) {
        for (const auto& step : ep.steps) {
            TrainSample s;
            s.features = featurize(ep.high_level, step.screenshot,
                                   {d_text, static_cast<int>(step.screenshot.features.size())});
            s.target = step.action;
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    json header;
    json segs = json::array();
    for (const auto& s : ckpt.params.segments()) {
        segs.push_back({{"name", s.name}, {"rows", s.rows}, {"cols", s.cols}});
    }
    header["segments"] = std::move(segs);
    header["d_in"] = ckpt.params.d_in();
    header["V"] = ckpt.params.vocab();
    header["d_text"] = ckpt.params.d_text();
    if (ckpt.meta.count("profile")) header["profile"] = ckpt.meta.at("profile");
    json kinds = json::array();
    for (auto k : ckpt.params.kinds()) kinds.push_back(std::string(to_string(k)));
    header["kinds"] = std::move(kinds);
    json words = json::object();
    for (std::size_t b = 0; b < ckpt.vocab.words.size(); ++b) {
        if (!ckpt.vocab.words[b].empty()) words[std::to_string(b)] = ckpt.vocab.words[b];
    }
    header["vocab_words"] = std::move(words);
    header["meta"] = ckpt.meta;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << header.dump() << '\n';
    static_assert(sizeof(double) == 8);
    out.write(reinterpret_cast<const char*>(ckpt.params.flat().data()),
              static_cast<std::streamsize>(ckpt.params.flat().size() * sizeof(double)));
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": missing checkpoint header");
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw ValidationError(path + ": malformed checkpoint header: " + e.what());
    }

    ActionSpaceProfile profile;
    profile.name = header.value("profile", "checkpoint");
    for (const auto& k : header.at("kinds")) {
        profile.allowed.push_back(action_kind_from_string(k.get<std::string>()));
    }
    int d_text = header.at("d_text").get<int>();
    int d_in = header.at("d_in").get<int>();
    int vocab = header.at("V").get<int>();

    Checkpoint ckpt;
    ckpt.params = ModelParams(profile, d_text, d_in - d_text, vocab);
    for (const auto& [key, value] : header.at("meta").items()) {
        ckpt.meta[key] = value.get<std::string>();
    }
    ckpt.vocab.size = vocab;
    ckpt.vocab.words.assign(static_cast<std::size_t>(vocab), "");
    for (const auto& [bucket, word] : header.at("vocab_words").items()) {
        ckpt.vocab.words[static_cast<std::size_t>(std::stoi(bucket))] = word.get<std::string>();
    }

    auto& data = ckpt.params.flat();
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(data.size() * sizeof(double))) {
        throw ValidationError(path + ": checkpoint payload shorter than the declared layout");
    }
    return ckpt;
}

}  // namespace fedgui
