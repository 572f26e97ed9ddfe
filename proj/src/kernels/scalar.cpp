#include "projlab/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace projlab::kernels {
namespace {

inline double abs2(cxd z) {
    return z.real() * z.real() + z.imag() * z.imag();
}

void matvec_scalar(const cxd* a, const cxd* x, cxd* y, std::size_t m, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        cxd acc{0.0, 0.0};
        const cxd* row = a + i * n;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

// i-k-j order with the row of B streamed in the inner loop; the AVX2 variant
// vectorizes this same loop so the accumulation structure matches.
void matmul_scalar(const cxd* a, const cxd* b, cxd* c, std::size_t m, std::size_t k,
                   std::size_t n) {
    std::fill(c, c + m * n, cxd{0.0, 0.0});
    for (std::size_t i = 0; i < m; ++i) {
        cxd* crow = c + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const cxd ail = a[i * k + l];
            const cxd* brow = b + l * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += ail * brow[j];
        }
    }
}

double sum_abs_scalar(const cxd* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::sqrt(abs2(x[i]));
    return s;
}

double sum_abs2_scalar(const cxd* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += abs2(x[i]);
    return s;
}

double max_abs_scalar(const cxd* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, abs2(x[i]));
    return std::sqrt(m);
}

void axpy_scalar(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(cxd alpha, cxd* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

cxd dot_conj_scalar(const cxd* x, const cxd* y, std::size_t n) {
    cxd acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

} // namespace

const Backend& scalar_backend() {
    static const Backend backend{
        "scalar",      matvec_scalar, matmul_scalar, sum_abs_scalar, sum_abs2_scalar,
        max_abs_scalar, axpy_scalar,   scale_scalar,  dot_conj_scalar,
    };
    return backend;
}

} // namespace projlab::kernels
