#pragma once

#include <span>
#include <vector>

#include "projlab/complex_matrix.hpp"
#include "projlab/linalg.hpp"
#include "projlab/space.hpp"

namespace projlab {

enum class ProjectionKind { hilbert_span, coordinate, oblique };

/// Declarative recipe for a projection matrix.
///  - hilbert-span: Euclidean orthoprojection onto span(range_basis)
///  - coordinate:   0/1 diagonal on index_set
///  - oblique:      range span(range_basis), kernel span(kernel_basis)
struct ProjectionSpec {
    ProjectionKind kind = ProjectionKind::coordinate;
    std::vector<std::vector<cxd>> range_basis;
    std::vector<std::vector<cxd>> kernel_basis;
    std::vector<std::size_t> index_set; // 0-based coordinates
};

ComplexMatrix make_projection(const ProjectionSpec& spec, const SpaceDescriptor& space);

struct OrthoReport {
    bool ortho = false;
    double idempotency_defect = 0.0; // ||P^2 - P|| (spectral norm)
    NormEstimate norm;
    /// True when the norm condition was decided by a closed form; for
    /// general p only "not falsified" is reported (a lower bound stayed
    /// at or below 1).
    bool norm_certified_exact = false;
};

/// Orthoprojection test: idempotent within 1e-10 and contractive in the
/// space norm. P = 0 and P = I count as orthoprojections.
OrthoReport is_orthoprojection(const ComplexMatrix& p, const SpaceDescriptor& space);

/// Grid falsification of the hermitian property ||exp(itT)|| = 1: returns
/// max_t | ||exp(itT)|| - 1 | over the grid. Exact-norm exponents only.
/// Idempotent T uses the closed form exp(itP) = (I-P) + e^{it} P.
double hermitian_defect(const ComplexMatrix& t, const SpaceDescriptor& space,
                        std::span<const double> t_grid);

/// 129 equispaced points covering [-pi, pi].
std::vector<double> default_hermitian_grid();

} // namespace projlab
