#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "projlab/errors.hpp"
#include "projlab/kernels.hpp"
#include "projlab/linalg.hpp"
#include "projlab/rng.hpp"

namespace projlab {

namespace {

cxd phase(cxd z) {
    const double m = std::abs(z);
    return m == 0.0 ? cxd{1.0, 0.0} : z / m;
}

// Osborne balancing: diagonal similarity with powers of 2 (exact in binary
// floating point) that evens out row/column 1-norms. Eigenvalues unchanged.
void balance(ComplexMatrix& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0;
    bool again = true;
    while (again) {
        again = false;
        for (std::size_t i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            const double total = c + r;
            double f = 1.0;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * total) {
                again = true;
                const cxd fc{f, 0.0};
                const cxd inv{1.0 / f, 0.0};
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= fc;
            }
        }
    }
}

// Householder similarity reduction to upper Hessenberg form.
void to_hessenberg(ComplexMatrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<cxd> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m = n - k - 1; // length of the subcolumn
        double norm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = a(k + 1 + i, k);
            norm2 += std::norm(v[i]);
        }
        double below = 0.0;
        for (std::size_t i = 1; i < m; ++i) below += std::norm(v[i]);
        if (below == 0.0) continue;
        const double xnorm = std::sqrt(norm2);
        const cxd alpha = -phase(v[0]) * xnorm;
        v[0] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) vnorm2 += std::norm(v[i]);
        if (vnorm2 == 0.0) continue;
        const double beta = 2.0 / vnorm2;

        // Left: rows k+1..n-1 over all columns.
        for (std::size_t j = k; j < n; ++j) {
            cxd s{0.0, 0.0};
            for (std::size_t i = 0; i < m; ++i) s += std::conj(v[i]) * a(k + 1 + i, j);
            s *= beta;
            for (std::size_t i = 0; i < m; ++i) a(k + 1 + i, j) -= s * v[i];
        }
        // Right: columns k+1..n-1 over all rows.
        for (std::size_t i = 0; i < n; ++i) {
            cxd s{0.0, 0.0};
            for (std::size_t l = 0; l < m; ++l) s += a(i, k + 1 + l) * v[l];
            s *= beta;
            for (std::size_t l = 0; l < m; ++l) a(i, k + 1 + l) -= s * std::conj(v[l]);
        }
        a(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = cxd{0.0, 0.0};
    }
}

struct Givens {
    double c = 1.0;
    cxd s{0.0, 0.0};
};

Givens make_givens(cxd x, cxd y) {
    Givens g;
    const double ay = std::abs(y);
    if (ay == 0.0) return g;
    const double ax = std::abs(x);
    const double d = std::hypot(ax, ay);
    if (ax == 0.0) {
        g.c = 0.0;
        g.s = std::conj(y) / ay;
    } else {
        g.c = ax / d;
        g.s = phase(x) * std::conj(y) / d;
    }
    return g;
}

// Both roots of the 2x2 block, cancellation-safe: the larger root comes from
// the quadratic formula, the other from the product of roots.
std::pair<cxd, cxd> two_by_two(cxd a, cxd b, cxd c, cxd d) {
    const cxd half_tr = 0.5 * (a + d);
    const cxd det = a * d - b * c;
    const cxd disc = std::sqrt(half_tr * half_tr - det);
    const cxd l1 = half_tr + disc;
    const cxd l2 = half_tr - disc;
    const cxd big = std::abs(l1) >= std::abs(l2) ? l1 : l2;
    if (std::abs(big) == 0.0) return {cxd{0.0, 0.0}, cxd{0.0, 0.0}};
    return {big, det / big};
}

// Single-shift implicit QR sweep with deflation; fills `out` from the bottom
// of the spectrum upward. Returns false when the iteration cap is hit.
bool hessenberg_qr(ComplexMatrix& h, std::vector<cxd>& out, std::size_t& steps,
                   std::size_t cap) {
    const std::size_t n = h.rows();
    out.assign(n, cxd{0.0, 0.0});
    if (n == 0) return true;
    double hnorm = 0.0;
    for (const cxd& z : h.flat()) hnorm += std::abs(z);
    if (hnorm == 0.0) hnorm = 1.0;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    std::size_t ihi = n - 1;
    std::size_t since_deflation = 0;
    while (true) {
        // Locate the active block [lo..ihi].
        std::size_t lo = 0;
        for (std::size_t l = ihi; l >= 1; --l) {
            double tst = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (tst == 0.0) tst = hnorm;
            if (std::abs(h(l, l - 1)) <= eps * tst) {
                h(l, l - 1) = cxd{0.0, 0.0};
                lo = l;
                break;
            }
        }

        if (lo == ihi) {
            out[ihi] = h(ihi, ihi);
            since_deflation = 0;
            if (ihi == 0) return true;
            --ihi;
            continue;
        }
        if (lo + 1 == ihi) {
            const auto [l1, l2] =
                two_by_two(h(lo, lo), h(lo, ihi), h(ihi, lo), h(ihi, ihi));
            out[ihi] = l1;
            out[lo] = l2;
            since_deflation = 0;
            if (lo == 0) return true;
            ihi = lo - 1;
            continue;
        }

        if (steps >= cap) {
            // Best effort: report the diagonal of whatever is left.
            for (std::size_t i = 0; i <= ihi; ++i) out[i] = h(i, i);
            return false;
        }
        ++steps;
        ++since_deflation;

        cxd shift;
        if (since_deflation % 20 == 0) {
            // Exceptional shift to break symmetry-induced cycling.
            shift = h(ihi, ihi) + cxd{0.75 * std::abs(h(ihi, ihi - 1)), 0.0};
        } else {
            const auto [l1, l2] = two_by_two(h(ihi - 1, ihi - 1), h(ihi - 1, ihi),
                                             h(ihi, ihi - 1), h(ihi, ihi));
            shift = std::abs(l1 - h(ihi, ihi)) <= std::abs(l2 - h(ihi, ihi)) ? l1 : l2;
        }

        cxd x = h(lo, lo) - shift;
        cxd y = h(lo + 1, lo);
        for (std::size_t k = lo; k < ihi; ++k) {
            const Givens g = make_givens(x, y);
            const std::size_t jstart = k == lo ? lo : k - 1;
            for (std::size_t j = jstart; j <= ihi; ++j) {
                const cxd t1 = h(k, j), t2 = h(k + 1, j);
                h(k, j) = g.c * t1 + g.s * t2;
                h(k + 1, j) = -std::conj(g.s) * t1 + g.c * t2;
            }
            const std::size_t iend = std::min(k + 2, ihi);
            for (std::size_t i = lo; i <= iend; ++i) {
                const cxd t1 = h(i, k), t2 = h(i, k + 1);
                h(i, k) = g.c * t1 + std::conj(g.s) * t2;
                h(i, k + 1) = -g.s * t1 + g.c * t2;
            }
            if (k + 1 < ihi) {
                x = h(k + 1, k);
                y = h(k + 2, k);
            }
        }
    }
}

} // namespace

EigenSystem eigenvalues(const ComplexMatrix& a, double tol) {
    if (!a.square()) throw input_error("eigenvalues: matrix not square");
    if (!a.all_finite()) throw input_error("eigenvalues: non-finite entries");
    const std::size_t n = a.rows();
    EigenSystem sys;
    sys.vectors = ComplexMatrix(n, n);
    if (n == 0) return sys;

    ComplexMatrix work = a;
    balance(work);
    to_hessenberg(work);
    const std::size_t cap = 100 * n * n;
    sys.converged = hessenberg_qr(work, sys.values, sys.qr_iterations, cap);

    // Deterministic ordering: descending modulus, then lexicographic.
    std::sort(sys.values.begin(), sys.values.end(), [](cxd l, cxd r) {
        const double ml = std::abs(l), mr = std::abs(r);
        if (ml != mr) return ml > mr;
        if (l.real() != r.real()) return l.real() > r.real();
        return l.imag() > r.imag();
    });

    // Certify each eigenvalue by inverse iteration on the original matrix.
    sys.residuals.assign(n, std::numeric_limits<double>::infinity());
    const double scale = std::max(a.max_abs_entry(), 1.0);
    const SpaceDescriptor l2{n, 2.0};
    for (std::size_t k = 0; k < n; ++k) {
        const cxd lambda = sys.values[k];
        ComplexMatrix shifted = a;
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lambda;
        LuFactorization f = lu_factor(shifted, 1e-300);
        if (f.singular) {
            // Exact singularity: nudge off the spectrum so the solve exists.
            ComplexMatrix nudged = shifted;
            const cxd delta{1e-13 * scale, 1e-13 * scale};
            for (std::size_t i = 0; i < n; ++i) nudged(i, i) += delta;
            f = lu_factor(nudged, 1e-300);
        }

        std::vector<cxd> best;
        double best_res = std::numeric_limits<double>::infinity();
        for (std::uint64_t attempt = 0; attempt < 3 && best_res > tol; ++attempt) {
            Rng rng = Rng::substream(0xE16E, "inverse-iteration", k * 8 + attempt);
            std::vector<cxd> v = rng.gaussian_vector(n);
            for (int it = 0; it < 4; ++it) {
                double vn = vec_norm(v, l2);
                if (vn == 0.0) break;
                kernels::active().scale(cxd{1.0 / vn, 0.0}, v.data(), v.size());
                if (f.singular) break;
                std::vector<cxd> next = f.solve(v);
                const double nn = vec_norm(next, l2);
                if (!std::isfinite(nn) || nn == 0.0) break;
                v = std::move(next);
            }
            const double vn = vec_norm(v, l2);
            if (vn == 0.0 || !std::isfinite(vn)) continue;
            kernels::active().scale(cxd{1.0 / vn, 0.0}, v.data(), v.size());
            std::vector<cxd> res = projlab::apply(a, v);
            kernels::active().axpy(-lambda, v.data(), res.data(), n);
            const double r = vec_norm(res, l2);
            if (r < best_res) {
                best_res = r;
                best = v;
            }
        }
        sys.residuals[k] = best_res;
        if (!best.empty())
            for (std::size_t i = 0; i < n; ++i) sys.vectors(i, k) = best[i];
    }
    return sys;
}

double spectral_radius(const EigenSystem& eig) {
    double r = 0.0;
    for (const cxd& l : eig.values) r = std::max(r, std::abs(l));
    return r;
}

} // namespace projlab
