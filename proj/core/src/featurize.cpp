#include "fedgui/featurize.hpp"

#include <cctype>
#include <cmath>

#include "fedgui/errors.hpp"
#include "fedgui/rng.hpp"

namespace fedgui {

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<double> text_features(std::string_view instruction, int d_text) {
    if (d_text < 1) throw ValidationError("d_text must be >= 1");
    std::vector<double> v(static_cast<std::size_t>(d_text), 0.0);
    for (const auto& tok : tokenize(instruction)) {
        std::uint64_t h = fnv1a64(tok);
        std::size_t cell = static_cast<std::size_t>(h % static_cast<std::uint64_t>(d_text));
        double sign = ((h >> 32) & 1u) ? 1.0 : -1.0;
        v[cell] += sign;
    }
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 > 0.0) {
        double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= inv;
    }
    return v;
}

std::vector<double> featurize(std::string_view instruction, const Screenshot& screenshot,
                              FeaturizeDims dims) {
    if (static_cast<int>(screenshot.features.size()) != dims.d) {
        throw ValidationError("screenshot feature length " +
                              std::to_string(screenshot.features.size()) +
                              " does not match configured d=" + std::to_string(dims.d));
    }
    std::vector<double> v = text_features(instruction, dims.d_text);
    v.insert(v.end(), screenshot.features.begin(), screenshot.features.end());
    return v;
}

}  // namespace fedgui
