#include "projlab/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "projlab/errors.hpp"

namespace projlab {

namespace {

ComplexMatrix columns_from(const std::vector<std::vector<cxd>>& vecs, std::size_t dim,
                           const char* what) {
    ComplexMatrix m(dim, vecs.size());
    for (std::size_t j = 0; j < vecs.size(); ++j) {
        if (vecs[j].size() != dim)
            throw construction_error(std::string(what) + ": basis vector length mismatch");
        for (std::size_t i = 0; i < dim; ++i) m(i, j) = vecs[j][i];
    }
    return m;
}

} // namespace

ComplexMatrix make_projection(const ProjectionSpec& spec, const SpaceDescriptor& space) {
    space.validate();
    const std::size_t n = space.dim;

    ComplexMatrix p;
    switch (spec.kind) {
    case ProjectionKind::coordinate: {
        p = ComplexMatrix(n, n);
        for (std::size_t idx : spec.index_set) {
            if (idx >= n) throw construction_error("coordinate projection: index out of range");
            p(idx, idx) = cxd{1.0, 0.0};
        }
        break;
    }
    case ProjectionKind::hilbert_span: {
        if (spec.range_basis.empty())
            throw construction_error("hilbert-span projection: empty range basis");
        const ComplexMatrix b = columns_from(spec.range_basis, n, "hilbert-span");
        const ComplexMatrix q = orthonormal_columns(b);
        if (q.cols() != b.cols())
            throw construction_error("hilbert-span projection: dependent range basis");
        p = compose(q, adjoint(q));
        break;
    }
    case ProjectionKind::oblique: {
        const std::size_t r = spec.range_basis.size();
        const std::size_t k = spec.kernel_basis.size();
        if (r + k != n)
            throw construction_error(
                "oblique projection: range and kernel bases must jointly span the space");
        const ComplexMatrix rb = columns_from(spec.range_basis, n, "oblique range");
        const ComplexMatrix kb = columns_from(spec.kernel_basis, n, "oblique kernel");
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < r; ++j) m(i, j) = rb(i, j);
            for (std::size_t j = 0; j < k; ++j) m(i, r + j) = kb(i, j);
        }
        const LuFactorization f = lu_factor(m, 1e-12 * std::max(1.0, m.max_abs_entry()));
        if (f.singular)
            throw construction_error(
                "oblique projection: range and kernel do not split the space");
        const ComplexMatrix minv = f.solve(ComplexMatrix::identity(n));
        // P = [R | 0] M^{-1}: only the first r rows of M^{-1} contribute.
        p = ComplexMatrix(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                cxd acc{0.0, 0.0};
                for (std::size_t l = 0; l < r; ++l) acc += rb(i, l) * minv(l, j);
                p(i, j) = acc;
            }
        break;
    }
    }

    const double defect = spectral_norm(compose(p, p) - p);
    if (defect > 1e-10)
        throw construction_error("projection construction failed the idempotency check");
    return p;
}

OrthoReport is_orthoprojection(const ComplexMatrix& p, const SpaceDescriptor& space) {
    if (!p.square() || p.rows() != space.dim)
        throw input_error("is_orthoprojection: shape mismatch with space");
    OrthoReport rep;
    rep.idempotency_defect = spectral_norm(compose(p, p) - p);
    rep.norm = operator_norm(p, space);
    rep.norm_certified_exact = rep.norm.exact;
    const bool idempotent = rep.idempotency_defect <= 1e-10;
    const bool contractive =
        rep.norm.exact ? rep.norm.value <= 1.0 + 1e-10 : rep.norm.value <= 1.0 + 1e-8;
    rep.ortho = idempotent && contractive;
    return rep;
}

double hermitian_defect(const ComplexMatrix& t, const SpaceDescriptor& space,
                        std::span<const double> t_grid) {
    if (!t.square() || t.rows() != space.dim)
        throw input_error("hermitian_defect: shape mismatch with space");
    if (t_grid.empty()) throw input_error("hermitian_defect: empty grid");
    if (!space.exact_norm())
        throw input_error("hermitian_defect: requires an exact-norm exponent p in {1,2,inf}");

    const std::size_t n = t.rows();
    const bool idempotent = spectral_norm(compose(t, t) - t) <= 1e-10;
    const ComplexMatrix eye = ComplexMatrix::identity(n);

    double defect = 0.0;
    for (double tau : t_grid) {
        ComplexMatrix e;
        if (idempotent) {
            // exp(it P) = (I - P) + e^{it} P for idempotent P.
            const cxd w = std::exp(cxd{0.0, tau});
            ComplexMatrix scaled = t;
            scaled *= w;
            e = (eye - t) + scaled;
        } else {
            ComplexMatrix arg = t;
            arg *= cxd{0.0, tau};
            e = matrix_exponential(arg);
        }
        defect = std::max(defect, std::abs(operator_norm(e, space).value - 1.0));
    }
    return defect;
}

std::vector<double> default_hermitian_grid() {
    std::vector<double> grid(129);
    for (std::size_t k = 0; k < grid.size(); ++k)
        grid[k] = -std::numbers::pi + (2.0 * std::numbers::pi * k) / 128.0;
    return grid;
}

} // namespace projlab
