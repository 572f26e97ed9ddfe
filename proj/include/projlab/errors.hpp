#pragma once

#include <stdexcept>
#include <string>

namespace projlab {

/// Bad caller input: dimension mismatches, out-of-range parameters, malformed JSON.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// A requested object cannot be built from the given data (dependent basis,
/// non-complementary spans, ...).
class construction_error : public std::runtime_error {
public:
    explicit construction_error(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative routine failed to converge within its cap, or a structural
/// assumption (e.g. semisimplicity) failed numerically.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace projlab
