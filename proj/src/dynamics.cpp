#include "projlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "projlab/apostol.hpp"
#include "projlab/classes.hpp"
#include "projlab/errors.hpp"
#include "projlab/linalg.hpp"
#include "projlab/projections.hpp"
#include "projlab/spectral.hpp"

namespace projlab {

namespace {

constexpr std::size_t kAuditStride = 512; // re-anchor drift by binary powering

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

ComplexMatrix matrix_power(const ComplexMatrix& t, std::uint64_t n) {
    if (!t.square()) throw input_error("matrix_power: matrix not square");
    ComplexMatrix result = ComplexMatrix::identity(t.rows());
    ComplexMatrix base = t;
    while (n) {
        if (n & 1) result = compose(result, base);
        n >>= 1;
        if (n) base = compose(base, base);
    }
    return result;
}

IterationReport iterate(const ComplexMatrix& t, const SpaceDescriptor& space,
                        std::size_t n_max, double tol, bool allow_strict_exit) {
    if (!t.square() || t.rows() != space.dim)
        throw input_error("iterate: shape mismatch with space");
    if (n_max < 1) throw input_error("iterate: n_max must be at least 1");
    if (!space.exact_norm())
        throw input_error("iterate: diff tracking needs an exact norm (p in {1,2,inf})");
    if (operator_norm(t, space).value > 1.0 + 1e-8)
        throw input_error("iterate: operator is not a contraction");

    const std::size_t dim = t.rows();
    IterationReport rep;
    rep.diffs.reserve(std::min<std::size_t>(n_max, 1 << 20));
    rep.power_norms.reserve(rep.diffs.capacity());

    const ComplexMatrix t2 = compose(t, t);
    ComplexMatrix x = t;             // T^n
    ComplexMatrix y = t2;            // T^(2n)
    ComplexMatrix sum(dim, dim);     // running Cesaro numerator
    ComplexMatrix next(dim, dim);

    for (std::size_t n = 1; n <= n_max; ++n) {
        sum += x;
        next = compose(x, t);
        const double diff = operator_norm(x - next, space).value;
        const double xnorm = operator_norm(x, space).value;
        rep.diffs.push_back(diff);
        rep.power_norms.push_back(xnorm);
        rep.n_stop = n;

        if (allow_strict_exit && xnorm < 1.0 - 1e-6) {
            rep.converged = true;
            rep.strict_contraction_exit = true;
            rep.limit = ComplexMatrix(dim, dim);
            rep.limit_residual = xnorm;
            rep.notes = "||T^" + std::to_string(n) + "|| = " + fmt(xnorm) +
                        " < 1: strict contraction, so the powers decay geometrically "
                        "to zero";
            break;
        }
        const double cauchy = operator_norm(x - y, space).value;
        if (cauchy <= tol && diff <= tol) {
            rep.converged = true;
            rep.limit = y;
            rep.limit_residual = cauchy;
            rep.notes = "doubling test ||T^n - T^2n|| = " + fmt(cauchy) +
                        " at n = " + std::to_string(n) +
                        "; convergence is uniform (finite dimension, closed ranges)";
            break;
        }
        if (n == n_max) break;

        x = next;
        y = compose(compose(y, t), t);
        if (n % kAuditStride == 0) { // binary-powering audit fights drift
            x = matrix_power(t, n + 1);
            y = matrix_power(t, 2 * (n + 1));
        }
    }

    ComplexMatrix cesaro = sum;
    cesaro *= cxd{1.0 / static_cast<double>(rep.n_stop), 0.0};
    rep.cesaro_limit = std::move(cesaro);
    if (!rep.converged)
        rep.notes = "no convergence within " + std::to_string(n_max) + " iterations";
    return rep;
}

ComplexMatrix ergodic_projection(const ComplexMatrix& t, double tol) {
    if (!t.square()) throw input_error("ergodic_projection: matrix not square");
    const std::size_t n = t.rows();
    const ComplexMatrix id = ComplexMatrix::identity(n);
    const ComplexMatrix u = null_space(id - t, tol);        // Ker(I - T)
    const ComplexMatrix w = null_space(adjoint(id - t), tol); // Ker(I - T*)
    if (u.cols() == 0) return ComplexMatrix(n, n); // no fixed vectors: E = 0
    if (u.cols() != w.cols())
        throw numerical_error("ergodic_projection: eigenvalue 1 is defective "
                              "(fixed spaces of T and T* differ in dimension)");

    const ComplexMatrix gram = compose(adjoint(w), u); // W* U
    const LuFactorization lu = lu_factor(gram, 1e-12);
    if (lu.singular)
        throw numerical_error("ergodic_projection: eigenvalue 1 is defective "
                              "(fixed space meets the range of I - T)");
    // E = U (W*U)^-1 W*
    const ComplexMatrix e = compose(u, lu.solve(adjoint(w)));

    const double idem = spectral_norm(compose(e, e) - e);
    const double left = spectral_norm(compose(t, e) - e);
    const double right = spectral_norm(compose(e, t) - e);
    if (idem > 1e-8 || left > 1e-8 || right > 1e-8)
        throw numerical_error("ergodic_projection: projection identities violated "
                              "(idempotency " + fmt(idem) + ", TE " + fmt(left) +
                              ", ET " + fmt(right) + ")");
    return e;
}

RangeFormulaReport check_range_formula(const SemigroupExpr& expr,
                                       const std::vector<ComplexMatrix>& generators,
                                       const SpaceDescriptor& space, double tol) {
    if (generators.empty()) throw input_error("check_range_formula: no generators");
    const std::vector<Violation> bad = validate(expr, generators.size());
    if (!bad.empty())
        throw input_error("check_range_formula: invalid expression (" + bad.front().path +
                          ": " + bad.front().message + ")");
    const std::size_t dim = space.dim;
    for (const auto& g : generators)
        if (!g.square() || g.rows() != dim)
            throw input_error("check_range_formula: generator shape mismatch with space");

    RangeFormulaReport rep;
    // The formula is proved under "orthoprojection + exact isometric
    // fixing"; certify what we can and note the rest.
    const SamplingConfig hypo_cfg = SamplingConfig{}.with_samples(2000);
    for (std::size_t k = 0; k < generators.size(); ++k) {
        const OrthoReport ortho = is_orthoprojection(generators[k], space);
        if (!ortho.ortho)
            rep.hypothesis_notes.push_back("generator " + std::to_string(k + 1) +
                                           ": hypothesis not certified (not an "
                                           "orthoprojection; norm " +
                                           fmt(ortho.norm.value) + ")");
        if (ortho.norm.value <= 1.0 + 1e-8) { // wprime is defined for contractions only
            const double wd = wprime_defect(generators[k], space, hypo_cfg);
            if (wd > 1e-6)
                rep.hypothesis_notes.push_back("generator " + std::to_string(k + 1) +
                                               ": hypothesis not certified (near-isometric "
                                               "defect " + fmt(wd) + ")");
        }
    }

    const ComplexMatrix t = evaluate(expr, generators);
    const ComplexMatrix id = ComplexMatrix::identity(dim);
    const ComplexMatrix fixed = null_space(id - t, 1e-8);

    const std::set<std::size_t> indices = index_set(expr);
    ComplexMatrix stacked(indices.size() * dim, dim);
    std::size_t row = 0;
    for (const std::size_t k : indices) {
        const ComplexMatrix block = id - generators[k - 1];
        for (std::size_t i = 0; i < dim; ++i, ++row)
            for (std::size_t j = 0; j < dim; ++j) stacked(row, j) = block(i, j);
    }
    const ComplexMatrix intersection = null_space(stacked, 1e-8);

    rep.fixed_dim = fixed.cols();
    rep.intersection_dim = intersection.cols();
    rep.angle = max_principal_angle(fixed, intersection);
    std::string notes = "dim Ker(I-T) = " + std::to_string(rep.fixed_dim) +
                        ", dim intersection = " + std::to_string(rep.intersection_dim);
    for (const auto& h : rep.hypothesis_notes) notes += "; " + h;
    rep.check = CheckResult::compare("range-formula", "principal angle", rep.angle, tol,
                                     0.0, notes);
    return rep;
}

DecayReport check_decay_bound(const ComplexMatrix& t, const SpaceDescriptor& space,
                              std::size_t n_max, const SamplingConfig& cfg) {
    if (!t.square() || t.rows() != space.dim)
        throw input_error("check_decay_bound: shape mismatch with space");
    if (operator_norm(t, space).value > 1.0 + 1e-8)
        throw input_error("check_decay_bound: operator is not a contraction");

    DecayReport rep;
    const SpectralReport spec = spectral_report(t);
    double a = 0.0;
    std::string notes;
    if (spec.boundary_empty) {
        notes = "empty boundary spectrum: some power is a strict contraction; "
                "bound taken at amplitude 0";
    } else {
        a = *spec.amplitude_a;
        rep.amplitude = a;
    }

    const IterationReport run = iterate(t, space, n_max, 1e-14, false);
    const std::size_t n = run.n_stop;
    rep.window_begin = std::max<std::size_t>(1, n / 2);
    rep.window_end = n;
    double tail = 0.0;
    for (std::size_t i = rep.window_begin; i <= rep.window_end; ++i)
        tail = std::max(tail, run.diffs[i - 1]);
    rep.tail_max = tail;
    const std::string inst = "tail n in [" + std::to_string(rep.window_begin) + "," +
                             std::to_string(rep.window_end) + "]";

    if (a >= 2.0 - 1e-12) {
        rep.check = CheckResult::vacuous("decay-bound", inst,
                                         "amplitude 2: the power differences need not "
                                         "decay (tail-max " + fmt(tail) + ")");
        return rep;
    }
    rep.bound = kt_bound(a);

    // The omega-driven form, for context only: omega is estimated from
    // below, so its bound is not a certificate.
    const NormEstimate norm = operator_norm(t, space);
    if (norm.value >= 1.0 - 1e-8) {
        const double w = omega(t, space, cfg).extrapolated;
        if (!notes.empty()) notes += "; ";
        notes += w < 2.0 - 1e-12
                     ? "omega-based bound " + fmt(kt_bound_from_omega(w)) +
                           " (omega est " + fmt(w) + ")"
                     : "omega est 2: no omega-based bound";
    }
    rep.check = CheckResult::compare("decay-bound", inst, tail, *rep.bound, 1e-6, notes);
    return rep;
}

} // namespace projlab
