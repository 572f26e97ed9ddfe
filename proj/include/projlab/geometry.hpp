#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "projlab/complex_matrix.hpp"
#include "projlab/sampling.hpp"
#include "projlab/space.hpp"

namespace projlab {

/// One-sided estimate of a geometric modulus of the space. `certifies`
/// records which side is trustworthy: "exact" (closed form),
/// "upper-bound-of-inf" (delta estimates) or "lower-bound-of-sup" (beta
/// estimates).
struct GeometryEstimate {
    double epsilon = 0.0;
    double value = 0.0;
    bool exact = false;
    std::string certifies;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/// Modulus of convexity delta_X(eps) = inf{1 - ||x+y||/2 : ||x||<=1,
/// ||y||<=1, ||x-y|| >= eps}. Closed form 1 - sqrt(1 - eps^2/4) for p = 2;
/// otherwise an upper bound of the infimum by seeded descent.
GeometryEstimate delta_modulus(const SpaceDescriptor& space, double epsilon,
                               std::uint64_t seed);

/// beta_X(eps) = sup{||x-y|| : ||x||<=1, ||y||<=1, ||x+y||/2 >= 1-eps}.
/// Lower bound of the supremum by multi-start ascent over feasible pairs.
/// eps = 0 is accepted as the degenerate boundary case.
GeometryEstimate beta_modulus(const SpaceDescriptor& space, double epsilon,
                              std::uint64_t seed);

/// Closed form of beta for Hilbert space: 2*sqrt(2*eps - eps^2).
double beta_hilbert(double epsilon);

} // namespace projlab
