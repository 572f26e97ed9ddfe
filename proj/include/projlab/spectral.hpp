#pragma once

#include <optional>
#include <vector>

#include "projlab/complex_matrix.hpp"
#include "projlab/report.hpp"
#include "projlab/sampling.hpp"
#include "projlab/space.hpp"

namespace projlab {

/// Spectrum of a contraction with its boundary part (eigenvalues within
/// `band` of the unit circle), the amplitude a = max |lambda - 1| over the
/// boundary and its arc form tau = 2 arcsin(a/2). An empty boundary is a
/// distinguished state (amplitude unset, not 0): it certifies that some
/// power of T is a strict contraction. `primitive` means the boundary is
/// contained in {1} within band; an empty boundary qualifies.
struct SpectralReport {
    std::vector<cxd> spectrum;
    std::vector<double> residuals; // inverse-iteration certificates, per eigenvalue
    std::vector<cxd> boundary;
    bool boundary_empty = true;
    std::optional<double> amplitude_a;
    std::optional<double> tau;
    bool primitive = true;
    double band = 1e-8;
};

SpectralReport spectral_report(const ComplexMatrix& t, double band = 1e-8);

/// Decay-rate bound 2a / sqrt(4 - a^2) = 2 tan(tau/2) on
/// limsup ||T^n - T^(n+1)||, from the boundary-spectrum amplitude.
/// Undefined at a >= 2 (the power differences need not decay at all).
double kt_bound(double a);

/// Same formula driven by an omega estimate instead of the amplitude.
double kt_bound_from_omega(double w);

/// Constructive half of the amplitude/omega comparison: the omega estimator,
/// seeded with boundary eigenvectors, must reach a_T - cfg.slack. Vacuous
/// when the boundary spectrum is empty.
CheckResult check_amplitude_omega(const ComplexMatrix& t, const SpaceDescriptor& space,
                                  const SamplingConfig& cfg);

} // namespace projlab
