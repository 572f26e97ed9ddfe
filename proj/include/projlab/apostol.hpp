#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "projlab/complex_matrix.hpp"
#include "projlab/report.hpp"
#include "projlab/sampling.hpp"
#include "projlab/space.hpp"

namespace projlab {

/// phi(eps)      = sup { ||x - Tx|| : ||x|| <= 1, ||x|| - ||Tx|| <= eps }
/// phi-tilde(eps)= sup { ||x - Tx|| : ||x||  = 1,   1 - ||Tx|| <= eps }
/// Both are nondecreasing in eps; their common limit at eps -> 0 is omega.
enum class PhiVariant { phi, phi_tilde };

/// Lower-bound estimate of a constrained supremum. The recorded maximizer is
/// feasible for the variant's constraint set within 1e-10, so the value is a
/// certificate, not just a sample statistic.
struct ModulusEstimate {
    double epsilon = 0.0;
    PhiVariant variant = PhiVariant::phi;
    double value = 0.0;
    std::vector<cxd> maximizer;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/// Feasible sampling + boundary-eigenvector seeding + projected ascent +
/// two-dimensional section search. phi-tilde requires a norm-one contraction.
ModulusEstimate apostol_phi(const ComplexMatrix& t, const SpaceDescriptor& space,
                            double epsilon, PhiVariant variant, const SamplingConfig& cfg);

/// phi-tilde on the dyadic grid eps = 2^-1 .. 2^-10 over one shared candidate
/// pool; `extrapolated` is the minimum observed value. A strict contraction
/// (norm < 1 - 1e-8) has omega = 0 by convention and the grid reports phi.
struct OmegaEstimate {
    std::vector<ModulusEstimate> values; // ascending eps
    double extrapolated = 0.0;
    bool norm_below_one = false;
};

OmegaEstimate omega(const ComplexMatrix& t, const SpaceDescriptor& space,
                    const SamplingConfig& cfg);

/// Asserts 0 <= omega <= phi-tilde(eps) <= phi(eps) <= ||I-T|| <= 2 with all
/// moduli evaluated on one shared candidate pool (including every refinement
/// point), which makes the one-sided estimates comparable link by link.
struct ChainReport {
    double epsilon = 0.0;
    double omega_value = 0.0;
    double phi_tilde_value = 0.0;
    double phi_value = 0.0;
    double norm_value = 0.0; // ||I - T||, exact for p in {1, 2, inf}
    bool norm_exact = true;
    std::vector<CheckResult> links;

    bool passed() const {
        for (const auto& l : links)
            if (!l.passed()) return false;
        return true;
    }
};

ChainReport check_modulus_chain(const ComplexMatrix& t, const SpaceDescriptor& space,
                                double epsilon, const SamplingConfig& cfg);

/// Composition calculus for phi-tilde:
///   product: phi~_{AB}(e) <= phi~_A(phi~_B(e) + e) + phi~_B(e)
///   convex:  phi~_{wA+(1-w)B}(e) <= w phi~_A(e/w) + (1-w) phi~_B(e/(1-w))
/// Right-hand sides run at the refined (doubled) budget plus cfg.slack;
/// arguments are clamped to (0,1]. ||AB|| < 1 or ||T|| < 1 make the
/// respective bound vacuous and are reported as such.
struct CompositionReport {
    CheckResult product;
    CheckResult convex;
};

CompositionReport check_composition_bounds(const ComplexMatrix& a, const ComplexMatrix& b,
                                           const std::vector<double>& weights,
                                           const SpaceDescriptor& space, double epsilon,
                                           const SamplingConfig& cfg);

/// General convex-combination bound (any number of terms); the pair version
/// above delegates here for its convex part.
CheckResult convex_composition_bound(const std::vector<ComplexMatrix>& ops,
                                     const std::vector<double>& weights,
                                     const SpaceDescriptor& space, double epsilon,
                                     const SamplingConfig& cfg);

/// phi~_P(eps) <= beta_X(eps) for orthoprojections of norm one. In l^2 the
/// right side is the closed form 2 sqrt(2 eps - eps^2); elsewhere it is a
/// lower-bound estimate run at a strictly larger budget, compared with slack.
/// A P that is not a norm-one orthoprojection yields verdict "vacuous"
/// ("not applicable").
CheckResult check_beta_bound(const ComplexMatrix& p, const SpaceDescriptor& space,
                             double epsilon, const SamplingConfig& cfg);

} // namespace projlab
