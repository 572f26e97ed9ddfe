#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "projlab/errors.hpp"

namespace projlab {

/// The ambient normed space: complex l^p of a fixed finite dimension.
/// p = infinity() encodes the max-norm.
struct SpaceDescriptor {
    std::size_t dim = 0;
    double p = 2.0;

    static SpaceDescriptor lp(std::size_t dim, double p) {
        SpaceDescriptor s{dim, p};
        s.validate();
        return s;
    }
    static SpaceDescriptor linf(std::size_t dim) {
        return {dim, std::numeric_limits<double>::infinity()};
    }

    bool is_inf() const { return std::isinf(p); }

    /// Exponents with a closed-form induced operator norm.
    bool exact_norm() const { return p == 1.0 || p == 2.0 || is_inf(); }

    /// Dual space l^q, 1/p + 1/q = 1 (dual of l^1 is l^inf and vice versa).
    SpaceDescriptor dual() const {
        if (p == 1.0) return linf(dim);
        if (is_inf()) return {dim, 1.0};
        return {dim, p / (p - 1.0)};
    }

    void validate() const {
        if (dim < 1) throw input_error("space dimension must be at least 1");
        if (!(p >= 1.0)) throw input_error("norm exponent must satisfy p >= 1");
    }

    bool operator==(const SpaceDescriptor&) const = default;
};

} // namespace projlab
