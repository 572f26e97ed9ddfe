#pragma once

#include <optional>
#include <string>
#include <vector>

#include "projlab/complex_matrix.hpp"
#include "projlab/report.hpp"
#include "projlab/sampling.hpp"
#include "projlab/space.hpp"

namespace projlab {

/// Lower-bound estimate of the Halperin constant K(T): the least K with
/// ||x - Tx||^2 <= K (||x||^2 - ||Tx||^2).
struct HalperinEstimate {
    double value = 0.0;
    bool unbounded_evidence = false; // some ratio exceeded 1e6
    std::vector<cxd> maximizer;      // empty when the feasible set was empty
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

HalperinEstimate halperin_constant(const ComplexMatrix& t, const SpaceDescriptor& space,
                                   const SamplingConfig& cfg);

/// Certified subset of R(T) = { r in (0,1) : ||T - rI|| <= 1 - r }, found
/// through convexity of g(r) = ||T - rI|| + r - 1. `exact` is false when the
/// norm itself is only a lower-bound estimate (general p), in which case the
/// interval is evidence, not a certificate.
struct DInterval {
    bool empty = true;
    double lo = 0.0;
    double hi = 0.0;
    bool exact = true;

    bool contains(double r) const { return !empty && lo <= r && r <= hi; }
};

DInterval d_radius_interval(const ComplexMatrix& t, const SpaceDescriptor& space);

/// Exact pointwise membership test r in R(T) (up to 1e-10 on the norm).
bool d_certified(const ComplexMatrix& t, const SpaceDescriptor& space, double r);

/// Estimate of sup{ ||Tx - x|| : ||x|| = 1, ||Tx|| >= 1 - 1e-8 }; values
/// below 1e-6 are evidence of class (W'). In l^2 the near-isometric set is
/// exactly the top singular subspace, which is searched exactly.
double wprime_defect(const ComplexMatrix& t, const SpaceDescriptor& space,
                     const SamplingConfig& cfg);

/// Closure checks for a pair of contractions: Halperin constant under
/// products, and (D)-radius arithmetic under products and convex
/// combinations (certified radii r, s picked from the intervals).
struct ClosureReport {
    CheckResult k_product; // K(AB) <= 2 max(K(A), K(B)) + slack
    CheckResult d_product; // rs in R(AB)
    CheckResult d_convex;  // alpha r + (1-alpha) s in R(alpha A + (1-alpha) B)
    std::optional<double> r, s;
    HalperinEstimate ka, kb, kab;
};

ClosureReport closure_report(const ComplexMatrix& a, const ComplexMatrix& b, double alpha,
                             const SpaceDescriptor& space, const SamplingConfig& cfg);

} // namespace projlab
