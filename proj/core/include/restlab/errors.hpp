#pragma once

#include <stdexcept>
#include <string>

namespace restlab {

// A numerical precondition was violated (parameter out of range, resolution
// rule broken, degenerate construction).  The CLI maps this to exit code 3.
struct precondition_error : std::invalid_argument {
    explicit precondition_error(const std::string& what)
        : std::invalid_argument(what) {}
};

// Malformed input that is a usage problem rather than a numerics problem:
// unparseable recipe strings, missing files, bad flag combinations.
// The CLI maps this to exit code 2.
struct usage_error : std::invalid_argument {
    explicit usage_error(const std::string& what)
        : std::invalid_argument(what) {}
};

}  // namespace restlab
