#pragma once

#include <optional>
#include <string>
#include <vector>

#include "projlab/complex_matrix.hpp"
#include "projlab/report.hpp"
#include "projlab/sampling.hpp"
#include "projlab/semigroup.hpp"
#include "projlab/space.hpp"

namespace projlab {

/// Power trajectory of a contraction. `diffs[n-1] = ||T^n - T^(n+1)||` and
/// `power_norms[n-1] = ||T^n||` in the exact induced norm. Convergence is
/// decided by the doubling Cauchy test ||T^n - T^(2n)|| <= tol together with
/// a small consecutive diff (consecutive diffs alone go to zero even for
/// some divergent iterations); in finite dimension the convergence is
/// automatically uniform. A strict-contraction exit (||T^n|| < 1 - 1e-6)
/// certifies geometric decay to the zero limit analytically.
struct IterationReport {
    std::vector<double> diffs;
    std::vector<double> power_norms;
    bool converged = false;
    std::size_t n_stop = 0;
    std::optional<ComplexMatrix> limit;
    double limit_residual = 0.0; // ||T^n - limit|| at stop
    ComplexMatrix cesaro_limit;  // mean of T^1..T^n at stop
    bool strict_contraction_exit = false;
    std::string notes;
};

/// `allow_strict_exit` disables only the early strict-contraction exit;
/// decay analysis needs the recorded diffs to reach the asymptotic regime.
IterationReport iterate(const ComplexMatrix& t, const SpaceDescriptor& space,
                        std::size_t n_max = 100000, double tol = 1e-10,
                        bool allow_strict_exit = true);

/// The projection onto Ker(I-T) along Ran(I-T), built from the two
/// null-space bases: E = U (W*U)^-1 W* with U spanning Ker(I-T) and W
/// spanning Ker(I-T*). Requires eigenvalue 1 to be semisimple; a defective
/// fixed space raises numerical_error. Satisfies E^2 = E, TE = ET = E
/// within 1e-8 (verified before returning).
ComplexMatrix ergodic_projection(const ComplexMatrix& t, double tol = 1e-8);

/// Fixed-space formula for semigroup elements over orthoprojections:
/// Ker(I-T) must equal the intersection of the generators' ranges over the
/// expression's index set, compared by principal angles. Hypothesis checks
/// (orthoprojection certification, the exact-isometry defect) are recorded
/// as notes; a failed hypothesis does not abort the comparison.
struct RangeFormulaReport {
    CheckResult check;
    std::size_t fixed_dim = 0;        // dim Ker(I-T)
    std::size_t intersection_dim = 0; // dim of the range intersection
    double angle = 0.0;               // max principal angle between the two
    std::vector<std::string> hypothesis_notes;
};

RangeFormulaReport check_range_formula(const SemigroupExpr& expr,
                                       const std::vector<ComplexMatrix>& generators,
                                       const SpaceDescriptor& space, double tol = 1e-6);

/// Tail-max of ||T^n - T^(n+1)|| over n in [n_max/2, n_max] (or up to the
/// convergence stop) against the amplitude bound 2a/sqrt(4-a^2) + 1e-6.
/// Amplitude 2 admits no decay bound: verdict "vacuous". The omega-driven
/// form of the bound is reported in the notes for context.
struct DecayReport {
    CheckResult check;
    double tail_max = 0.0;
    std::optional<double> amplitude; // unset when the boundary spectrum is empty
    std::optional<double> bound;     // kt_bound(amplitude), unset when vacuous
    std::size_t window_begin = 0;    // first n of the tail window
    std::size_t window_end = 0;      // last n of the tail window
};

DecayReport check_decay_bound(const ComplexMatrix& t, const SpaceDescriptor& space,
                              std::size_t n_max, const SamplingConfig& cfg = {});

/// T^n by binary powering; the audit reference for long iterations.
ComplexMatrix matrix_power(const ComplexMatrix& t, std::uint64_t n);

} // namespace projlab
