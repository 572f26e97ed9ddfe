#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "projlab/complex_matrix.hpp"
#include "projlab/space.hpp"

namespace projlab {

/// Carrier for a norm value. exact=true only for the closed-form exponents
/// p in {1, 2, inf}; otherwise value is a certified lower bound of the true
/// induced norm obtained by multi-start ascent.
struct NormEstimate {
    double value = 0.0;
    bool exact = false;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
};

/// l^p norm of a vector; max modulus when p = inf.
double vec_norm(std::span<const cxd> x, const SpaceDescriptor& space);

/// Normalize in the space norm. Throws input_error on the zero vector.
std::vector<cxd> normalized(std::span<const cxd> x, const SpaceDescriptor& space);

/// Induced operator norm. Exact for p in {1, 2, inf}; for other p a
/// lower-bound estimate via the dual-gauge power method from 32 seeded starts.
NormEstimate operator_norm(const ComplexMatrix& a, const SpaceDescriptor& space,
                           std::uint64_t seed = 0);

/// Largest singular value (= exact l^2 operator norm).
double spectral_norm(const ComplexMatrix& a);

/// All singular values, descending.
std::vector<double> singular_values(const ComplexMatrix& a);

// -------------------------------------------------------------------------
// Eigenvalues
// -------------------------------------------------------------------------

struct EigenSystem {
    std::vector<cxd> values;       // n eigenvalues with multiplicity
    std::vector<double> residuals; // ||A v - lambda v||_2 for a unit v, per value
    ComplexMatrix vectors;         // columns are the certifying vectors
    bool converged = true;
    std::size_t qr_iterations = 0;
};

/// Dense complex eigensolver: balance, Householder reduction to Hessenberg,
/// shifted QR with a hard cap of 100*n^2 steps; trailing 2x2 blocks go
/// through the quadratic formula. Residual certificates come from inverse
/// iteration on the original matrix. converged=false carries partial results.
EigenSystem eigenvalues(const ComplexMatrix& a, double tol = 1e-10);

double spectral_radius(const EigenSystem& eig);

/// Eigensystem of a hermitian matrix by cyclic complex Jacobi rotations:
/// real eigenvalues ascending, vectors unitary column-for-column.
struct HermitianEigen {
    std::vector<double> values;
    ComplexMatrix vectors;
};

HermitianEigen hermitian_eigensystem(const ComplexMatrix& h);

// -------------------------------------------------------------------------
// Factorizations / subspaces
// -------------------------------------------------------------------------

struct LuFactorization {
    ComplexMatrix lu;
    std::vector<std::size_t> perm;
    bool singular = false;

    std::vector<cxd> solve(std::span<const cxd> rhs) const;
    ComplexMatrix solve(const ComplexMatrix& rhs) const;
    cxd determinant() const;
};

LuFactorization lu_factor(const ComplexMatrix& a, double pivot_tol = 0.0);

/// Euclidean-orthonormal basis of the span of the given columns, by modified
/// Gram-Schmidt with reorthogonalization. Columns whose residual falls below
/// tol * original norm are dropped as dependent.
ComplexMatrix orthonormal_columns(const ComplexMatrix& basis, double tol = 1e-12);

/// Orthonormal (Euclidean) basis of the numerical null space: singular vectors
/// with singular value <= tol, as columns. Accepts rectangular input.
ComplexMatrix null_space(const ComplexMatrix& a, double tol = 1e-8);

/// Orthonormal basis of the column space: singular vectors with singular
/// value > tol.
ComplexMatrix column_space(const ComplexMatrix& a, double tol = 1e-8);

/// Largest principal angle between the spans of two orthonormal column
/// blocks, computed through residual sines so that tiny angles survive
/// rounding. Subspaces of different dimension report pi/2.
double max_principal_angle(const ComplexMatrix& q1, const ComplexMatrix& q2);

/// Matrix exponential by scaling-and-squaring with a (6,6) Pade approximant,
/// squaring depth chosen from the 1-norm.
ComplexMatrix matrix_exponential(const ComplexMatrix& a);

} // namespace projlab
