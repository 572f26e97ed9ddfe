#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "projlab/complex_matrix.hpp"
#include "projlab/projections.hpp"
#include "projlab/rng.hpp"
#include "projlab/space.hpp"

namespace testhelp {

using projlab::ComplexMatrix;
using projlab::cxd;

inline double entry_dist(const ComplexMatrix& a, const ComplexMatrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

// Euclidean orthoprojection onto the span of `rank` random Gaussian vectors,
// optionally through a planted vector (kept as the first basis vector).
inline ComplexMatrix random_ortho(std::size_t dim, std::size_t rank, projlab::Rng& rng,
                                  const std::vector<cxd>* planted = nullptr) {
    projlab::ProjectionSpec spec;
    spec.kind = projlab::ProjectionKind::hilbert_span;
    if (planted) spec.range_basis.push_back(*planted);
    while (spec.range_basis.size() < rank)
        spec.range_basis.push_back(rng.gaussian_vector(dim));
    return make_projection(spec, projlab::SpaceDescriptor::lp(dim, 2.0));
}

// Greedy multiset match: every expected value is claimed by a distinct
// computed value within tol.
inline bool multiset_close(std::vector<cxd> got, const std::vector<cxd>& want,
                           double tol) {
    if (got.size() != want.size()) return false;
    for (const cxd& w : want) {
        std::size_t best = got.size();
        double dist = tol;
        for (std::size_t i = 0; i < got.size(); ++i)
            if (std::abs(got[i] - w) <= dist) {
                dist = std::abs(got[i] - w);
                best = i;
            }
        if (best == got.size()) return false;
        got.erase(got.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return true;
}

} // namespace testhelp
