#pragma once

#include <stdexcept>
#include <string>

namespace fedgui {

/// Bad inputs: malformed files, invalid flags, violated invariants.
/// The CLI maps these to exit code 1; everything else exits 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fedgui
