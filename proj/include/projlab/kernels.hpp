#pragma once

#include <complex>
#include <cstddef>

namespace projlab::kernels {

using cxd = std::complex<double>;

/// Data-parallel inner loops behind the matrix/vector layer. Every entry has
/// a scalar reference implementation; on x86 with AVX2+FMA a vectorized
/// variant is selected at runtime. The two variants are equivalence-tested
/// against each other (they may differ in the last bits because of fused
/// multiply-adds and reassociated sums).
///
/// Complex data is interleaved (std::complex layout), row-major for matrices.
/// Moduli are computed as sqrt(re*re + im*im); operands in this library are
/// O(1) contraction entries, so no overflow guard is needed.
struct Backend {
    const char* name;

    /// y = A x, A is m x n row-major.
    void (*matvec)(const cxd* a, const cxd* x, cxd* y, std::size_t m, std::size_t n);

    /// C = A B with A m x k, B k x n, C m x n, all row-major. C may not alias.
    void (*matmul)(const cxd* a, const cxd* b, cxd* c, std::size_t m, std::size_t k,
                   std::size_t n);

    double (*sum_abs)(const cxd* x, std::size_t n);  // sum |x_i|
    double (*sum_abs2)(const cxd* x, std::size_t n); // sum |x_i|^2
    double (*max_abs)(const cxd* x, std::size_t n);  // max |x_i|

    void (*axpy)(cxd alpha, const cxd* x, cxd* y, std::size_t n); // y += alpha x
    void (*scale)(cxd alpha, cxd* x, std::size_t n);              // x *= alpha
    cxd (*dot_conj)(const cxd* x, const cxd* y, std::size_t n);   // sum conj(x_i) y_i
};

const Backend& scalar_backend();

/// AVX2+FMA backend, or nullptr when the CPU (or build) lacks it.
const Backend* avx2_backend();

/// Backend in use. Picked once: AVX2 when available, overridable with
/// PROJLAB_KERNELS=scalar|avx2 (an unavailable request falls back to scalar).
const Backend& active();

} // namespace projlab::kernels
