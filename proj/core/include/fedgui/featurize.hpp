#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fedgui/episode.hpp"

namespace fedgui {

struct FeaturizeDims {
    int d_text = 64;  // hashed bag-of-words cells
    int d = 16;       // screenshot embedding length
};

/// Lowercase whitespace tokens of `s`, in order.
std::vector<std::string> tokenize(std::string_view s);

/// L2-normalized hashed bag-of-words. Cell = fnv1a64(token) % d_text, sign
/// from bit 32 of the same hash. Empty input gives the zero vector.
std::vector<double> text_features(std::string_view instruction, int d_text);

/// Concatenation [text_features(instruction, d_text) | screenshot.features].
/// The model input; length d_text + d.
std::vector<double> featurize(std::string_view instruction, const Screenshot& screenshot,
                              FeaturizeDims dims = {});

}  // namespace fedgui
