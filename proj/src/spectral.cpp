#include "projlab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "projlab/apostol.hpp"
#include "projlab/errors.hpp"
#include "projlab/linalg.hpp"

namespace projlab {

SpectralReport spectral_report(const ComplexMatrix& t, double band) {
    if (!t.square()) throw input_error("spectral_report: matrix not square");
    if (!(band > 0.0)) throw input_error("spectral_report: band must be positive");

    const EigenSystem eig = eigenvalues(t);
    if (!eig.converged) throw numerical_error("spectral_report: eigen solve did not converge");

    SpectralReport rep;
    rep.band = band;
    rep.spectrum = eig.values;
    rep.residuals = eig.residuals;
    for (const cxd lambda : eig.values)
        if (std::abs(std::abs(lambda) - 1.0) <= band) rep.boundary.push_back(lambda);
    rep.boundary_empty = rep.boundary.empty();
    if (!rep.boundary_empty) {
        double a = 0.0;
        for (const cxd lambda : rep.boundary) a = std::max(a, std::abs(lambda - 1.0));
        rep.amplitude_a = a;
        rep.tau = 2.0 * std::asin(std::clamp(a / 2.0, 0.0, 1.0));
        rep.primitive = true;
        for (const cxd lambda : rep.boundary)
            if (std::abs(lambda - 1.0) > band) rep.primitive = false;
    }
    return rep;
}

double kt_bound(double a) {
    if (!(a >= 0.0)) throw input_error("kt_bound: amplitude must be nonnegative");
    if (a >= 2.0)
        throw input_error("kt_bound: undefined at amplitude 2 (no decay in general)");
    return 2.0 * a / std::sqrt(4.0 - a * a);
}

double kt_bound_from_omega(double w) {
    if (!(w >= 0.0)) throw input_error("kt_bound_from_omega: omega must be nonnegative");
    if (w >= 2.0)
        throw input_error("kt_bound_from_omega: undefined at omega 2 (no decay in general)");
    return 2.0 * w / std::sqrt(4.0 - w * w);
}

CheckResult check_amplitude_omega(const ComplexMatrix& t, const SpaceDescriptor& space,
                                  const SamplingConfig& cfg) {
    if (!t.square() || t.rows() != space.dim)
        throw input_error("check_amplitude_omega: shape mismatch with space");
    const NormEstimate norm = operator_norm(t, space);
    if (std::abs(norm.value - 1.0) > 1e-8)
        throw input_error("check_amplitude_omega: requires a norm-one contraction");

    const SpectralReport spec = spectral_report(t);
    if (spec.boundary_empty)
        return CheckResult::vacuous("amplitude-omega", "a_T vs omega",
                                    "empty boundary spectrum: amplitude undefined");
    const OmegaEstimate om = omega(t, space, cfg);
    return CheckResult::compare("amplitude-omega", "a_T vs omega", *spec.amplitude_a,
                                om.extrapolated, cfg.slack,
                                "omega estimated from " + std::to_string(om.values.size()) +
                                    " grid points");
}

} // namespace projlab
