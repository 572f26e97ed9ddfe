// AVX2+FMA variants of the complex kernels. Two interleaved complex doubles
// per 256-bit register. Compiled with -mavx2 -mfma; only ever called after a
// runtime cpuid check in dispatch.cpp.
#include "projlab/kernels.hpp"

#ifdef PROJLAB_HAVE_AVX2

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace projlab::kernels {
namespace {

// [re0 im0 re1 im1] * (ar + i*ai) accumulated onto acc.
// Even lanes: ar*re - ai*im, odd lanes: ar*im + ai*re.
inline __m256d cmul_acc(__m256d acc, __m256d var, __m256d vai, __m256d vb) {
    const __m256d swapped = _mm256_permute_pd(vb, 0b0101);
    const __m256d t = _mm256_mul_pd(vai, swapped);
    return _mm256_add_pd(acc, _mm256_fmaddsub_pd(var, vb, t));
}

void matvec_avx2(const cxd* a, const cxd* x, cxd* y, std::size_t m, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const std::size_t n2 = n - n % 2;
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = reinterpret_cast<const double*>(a + i * n);
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < n2; j += 2) {
            const __m256d vx = _mm256_loadu_pd(xd + 2 * j);
            const __m256d va = _mm256_loadu_pd(row + 2 * j);
            // broadcast re/im of the two x entries is wrong way round: we
            // stream A's row against x, so broadcast nothing -- multiply the
            // packed pairs (a*x for two lanes at once).
            const __m256d are = _mm256_shuffle_pd(va, va, 0b0000); // [ar0 ar0 ar1 ar1]
            const __m256d aim = _mm256_shuffle_pd(va, va, 0b1111); // [ai0 ai0 ai1 ai1]
            acc = cmul_acc(acc, are, aim, vx);
        }
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, acc);
        cxd sum{lanes[0] + lanes[2], lanes[1] + lanes[3]};
        for (std::size_t j = n2; j < n; ++j) sum += a[i * n + j] * x[j];
        y[i] = sum;
    }
}

void matmul_avx2(const cxd* a, const cxd* b, cxd* c, std::size_t m, std::size_t k,
                 std::size_t n) {
    std::fill(c, c + m * n, cxd{0.0, 0.0});
    const std::size_t n2 = n - n % 2;
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = reinterpret_cast<double*>(c + i * n);
        for (std::size_t l = 0; l < k; ++l) {
            const cxd ail = a[i * k + l];
            const double* brow = reinterpret_cast<const double*>(b + l * n);
            const __m256d var = _mm256_set1_pd(ail.real());
            const __m256d vai = _mm256_set1_pd(ail.imag());
            for (std::size_t j = 0; j < n2; j += 2) {
                const __m256d vb = _mm256_loadu_pd(brow + 2 * j);
                const __m256d vc = _mm256_loadu_pd(crow + 2 * j);
                _mm256_storeu_pd(crow + 2 * j, cmul_acc(vc, var, vai, vb));
            }
            for (std::size_t j = n2; j < n; ++j) c[i * n + j] += ail * b[l * n + j];
        }
    }
}

// Per-complex |z|^2 for two lanes: [r0^2+i0^2, ., r1^2+i1^2, .] in lanes 0,2.
inline __m256d abs2_pairs(__m256d v) {
    const __m256d sq = _mm256_mul_pd(v, v);
    return _mm256_hadd_pd(sq, sq);
}

double sum_abs_avx2(const cxd* x, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const std::size_t n2 = n - n % 2;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d v = _mm256_loadu_pd(xd + 2 * i);
        acc = _mm256_add_pd(acc, _mm256_sqrt_pd(abs2_pairs(v)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = lanes[0] + lanes[2];
    for (std::size_t i = n2; i < n; ++i)
        s += std::sqrt(x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
    return s;
}

double sum_abs2_avx2(const cxd* x, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const std::size_t n4 = 2 * n - (2 * n) % 4;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d v = _mm256_loadu_pd(xd + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
    for (std::size_t i = n4; i < 2 * n; ++i) s += xd[i] * xd[i];
    return s;
}

double max_abs_avx2(const cxd* x, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const std::size_t n2 = n - n % 2;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d v = _mm256_loadu_pd(xd + 2 * i);
        acc = _mm256_max_pd(acc, abs2_pairs(v));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double m = std::max(lanes[0], lanes[2]);
    for (std::size_t i = n2; i < n; ++i)
        m = std::max(m, x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
    return std::sqrt(m);
}

void axpy_avx2(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    const __m256d var = _mm256_set1_pd(alpha.real());
    const __m256d vai = _mm256_set1_pd(alpha.imag());
    const std::size_t n2 = n - n % 2;
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
        const __m256d vy = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, cmul_acc(vy, var, vai, vx));
    }
    for (std::size_t i = n2; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(cxd alpha, cxd* x, std::size_t n) {
    double* xd = reinterpret_cast<double*>(x);
    const __m256d var = _mm256_set1_pd(alpha.real());
    const __m256d vai = _mm256_set1_pd(alpha.imag());
    const std::size_t n2 = n - n % 2;
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
        _mm256_storeu_pd(xd + 2 * i, cmul_acc(_mm256_setzero_pd(), var, vai, vx));
    }
    for (std::size_t i = n2; i < n; ++i) x[i] *= alpha;
}

cxd dot_conj_avx2(const cxd* x, const cxd* y, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    const std::size_t n2 = n - n % 2;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
        const __m256d vy = _mm256_loadu_pd(yd + 2 * i);
        // conj(x)*y: even lanes xr*yr + xi*yi, odd lanes xr*yi - xi*yr.
        const __m256d xre = _mm256_shuffle_pd(vx, vx, 0b0000);
        const __m256d xim = _mm256_shuffle_pd(vx, vx, 0b1111);
        const __m256d swapped = _mm256_permute_pd(vy, 0b0101);
        const __m256d t = _mm256_mul_pd(xim, swapped);
        acc = _mm256_add_pd(acc, _mm256_fmsubadd_pd(xre, vy, t));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    cxd sum{lanes[0] + lanes[2], lanes[1] + lanes[3]};
    for (std::size_t i = n2; i < n; ++i) sum += std::conj(x[i]) * y[i];
    return sum;
}

} // namespace

const Backend* avx2_backend_impl() {
    static const Backend backend{
        "avx2",       matvec_avx2, matmul_avx2, sum_abs_avx2, sum_abs2_avx2,
        max_abs_avx2, axpy_avx2,   scale_avx2,  dot_conj_avx2,
    };
    return &backend;
}

} // namespace projlab::kernels

#endif // PROJLAB_HAVE_AVX2
