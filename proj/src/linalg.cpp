#include "projlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "projlab/errors.hpp"
#include "projlab/kernels.hpp"
#include "projlab/rng.hpp"

namespace projlab {

namespace {

cxd phase(cxd z) {
    const double m = std::abs(z);
    return m == 0.0 ? cxd{1.0, 0.0} : z / m;
}

} // namespace

double vec_norm(std::span<const cxd> x, const SpaceDescriptor& space) {
    if (x.size() != space.dim) throw input_error("vec_norm: dimension mismatch");
    if (x.empty()) return 0.0;
    if (space.is_inf()) return kernels::active().max_abs(x.data(), x.size());
    if (space.p == 1.0) return kernels::active().sum_abs(x.data(), x.size());
    if (space.p == 2.0) return std::sqrt(kernels::active().sum_abs2(x.data(), x.size()));
    // General p: scale by the max modulus so pow never overflows.
    const double m = kernels::active().max_abs(x.data(), x.size());
    if (m == 0.0) return 0.0;
    double acc = 0.0;
    for (const cxd& v : x) acc += std::pow(std::abs(v) / m, space.p);
    return m * std::pow(acc, 1.0 / space.p);
}

std::vector<cxd> normalized(std::span<const cxd> x, const SpaceDescriptor& space) {
    const double n = vec_norm(x, space);
    if (n <= 0.0) throw input_error("normalized: zero vector");
    std::vector<cxd> out(x.begin(), x.end());
    kernels::active().scale(cxd{1.0 / n, 0.0}, out.data(), out.size());
    return out;
}

// -------------------------------------------------------------------------
// Hermitian Jacobi eigensolver (workhorse behind all singular-value queries)
// -------------------------------------------------------------------------

// Cyclic complex Jacobi. Input must be hermitian; the rotation that kills
// h(p,q) is the classic real 2x2 Jacobi rotation conjugated by the phase of
// the off-diagonal entry.
HermitianEigen hermitian_eigensystem(const ComplexMatrix& input) {
    ComplexMatrix h = input;
    if (!h.square()) throw input_error("hermitian_eigensystem: matrix not square");
    const std::size_t n = h.rows();
    ComplexMatrix v = ComplexMatrix::identity(n);
    if (n == 0) return {{}, v};
    for (std::size_t i = 0; i < n; ++i) h(i, i) = cxd{h(i, i).real(), 0.0};

    double fro = 0.0;
    for (const cxd& z : h.flat()) fro += std::norm(z);
    fro = std::sqrt(fro);
    const double stop = 1e-15 * std::max(fro, 1e-300);

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * std::norm(h(p, q));
        if (std::sqrt(off) <= stop) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double r = std::abs(h(p, q));
                if (r <= 1e-300) {
                    h(p, q) = h(q, p) = cxd{0.0, 0.0};
                    continue;
                }
                const cxd u = h(p, q) / r;
                const double app = h(p, p).real();
                const double aqq = h(q, q).real();
                const double tau = (aqq - app) / (2.0 * r);
                // Small-magnitude root of t^2 - 2 tau t - 1 = 0: with this
                // rotation convention (J(p,q) = -s u) that root is what zeroes
                // the (p,q) entry; the opposite sign stagnates the sweep.
                const double t =
                    (tau >= 0.0 ? -1.0 : 1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const cxd hip = h(i, p), hiq = h(i, q);
                    h(i, p) = c * hip + s * std::conj(u) * hiq;
                    h(i, q) = -s * u * hip + c * hiq;
                    h(p, i) = std::conj(h(i, p));
                    h(q, i) = std::conj(h(i, q));
                }
                h(p, p) = cxd{c * c * app + 2.0 * c * s * r + s * s * aqq, 0.0};
                h(q, q) = cxd{s * s * app - 2.0 * c * s * r + c * c * aqq, 0.0};
                h(p, q) = h(q, p) = cxd{0.0, 0.0};

                for (std::size_t i = 0; i < n; ++i) {
                    const cxd vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip + s * std::conj(u) * viq;
                    v(i, q) = -s * u * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = h(i, i).real();
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });

    HermitianEigen out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = diag[order[k]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

std::vector<double> singular_values(const ComplexMatrix& a) {
    const HermitianEigen eig = hermitian_eigensystem(compose(adjoint(a), a));
    std::vector<double> sv(eig.values.size());
    for (std::size_t i = 0; i < sv.size(); ++i)
        sv[i] = std::sqrt(std::max(0.0, eig.values[sv.size() - 1 - i]));
    return sv;
}

double spectral_norm(const ComplexMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    const std::vector<double> sv = singular_values(a);
    return sv.empty() ? 0.0 : sv.front();
}

namespace {

// Singular values obtained as sqrt of Gram eigenvalues cannot be resolved
// below sqrt(n * eps) * sigma_max; a user cutoff tighter than that would
// split directions on rounding noise, so floor it at the resolution limit.
double sigma_cutoff(double tol, const std::vector<double>& gram_values,
                    std::size_t rows) {
    const double lmax = gram_values.empty() ? 0.0 : gram_values.back();
    const double floor_sq = static_cast<double>(std::max(rows, gram_values.size())) *
                            std::numeric_limits<double>::epsilon() *
                            std::max(0.0, lmax);
    return std::max(tol, std::sqrt(floor_sq));
}

} // namespace

ComplexMatrix null_space(const ComplexMatrix& a, double tol) {
    const std::size_t n = a.cols();
    const HermitianEigen eig = hermitian_eigensystem(compose(adjoint(a), a));
    const double cut = sigma_cutoff(tol, eig.values, a.rows());
    std::size_t k = 0;
    while (k < n && std::sqrt(std::max(0.0, eig.values[k])) <= cut) ++k;
    ComplexMatrix basis(n, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) basis(i, j) = eig.vectors(i, j);
    return basis;
}

ComplexMatrix column_space(const ComplexMatrix& a, double tol) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const HermitianEigen eig = hermitian_eigensystem(compose(adjoint(a), a));
    const double cut = sigma_cutoff(tol, eig.values, a.rows());
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < n; ++j)
        if (std::sqrt(std::max(0.0, eig.values[j])) > cut) keep.push_back(j);
    ComplexMatrix raw(m, keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c) {
        const double sigma = std::sqrt(eig.values[keep[c]]);
        for (std::size_t i = 0; i < m; ++i) {
            cxd acc{0.0, 0.0};
            for (std::size_t l = 0; l < n; ++l) acc += a(i, l) * eig.vectors(l, keep[c]);
            raw(i, c) = acc / sigma;
        }
    }
    return orthonormal_columns(raw);
}

ComplexMatrix orthonormal_columns(const ComplexMatrix& basis, double tol) {
    const std::size_t m = basis.rows();
    std::vector<std::vector<cxd>> kept;
    for (std::size_t j = 0; j < basis.cols(); ++j) {
        std::vector<cxd> v(m);
        for (std::size_t i = 0; i < m; ++i) v[i] = basis(i, j);
        const double orig = std::sqrt(kernels::active().sum_abs2(v.data(), m));
        if (orig <= 0.0) continue;
        // Modified Gram-Schmidt, run twice so nearly dependent columns do
        // not leak components of earlier ones back in.
        for (int pass = 0; pass < 2; ++pass) {
            for (const std::vector<cxd>& q : kept) {
                const cxd coeff = kernels::active().dot_conj(q.data(), v.data(), m);
                kernels::active().axpy(-coeff, q.data(), v.data(), m);
            }
        }
        const double res = std::sqrt(kernels::active().sum_abs2(v.data(), m));
        if (res <= tol * orig) continue;
        kernels::active().scale(cxd{1.0 / res, 0.0}, v.data(), m);
        kept.push_back(std::move(v));
    }
    ComplexMatrix q(m, kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j)
        for (std::size_t i = 0; i < m; ++i) q(i, j) = kept[j][i];
    return q;
}

double max_principal_angle(const ComplexMatrix& q1, const ComplexMatrix& q2) {
    if (q1.cols() == 0 && q2.cols() == 0) return 0.0;
    if (q1.cols() != q2.cols()) return std::numbers::pi / 2.0;
    if (q1.rows() != q2.rows()) throw input_error("max_principal_angle: ambient dims differ");
    // sin(theta_max) = || (I - Q1 Q1*) Q2 ||_2; evaluated both ways and the
    // worse taken, which keeps the answer symmetric under roundoff.
    const auto residual_sine = [](const ComplexMatrix& qa, const ComplexMatrix& qb) {
        const ComplexMatrix r = qb - compose(qa, compose(adjoint(qa), qb));
        return std::min(1.0, spectral_norm(r));
    };
    const double s = std::max(residual_sine(q1, q2), residual_sine(q2, q1));
    return std::asin(s);
}

// -------------------------------------------------------------------------
// Operator norms
// -------------------------------------------------------------------------

namespace {

double max_column_sum(const ComplexMatrix& a) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

double max_row_sum(const ComplexMatrix& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        best = std::max(best, kernels::active().sum_abs(r.data(), r.size()));
    }
    return best;
}

// Duality-map image: component-wise |y_i|^(p-1) * phase(y_i). Attains
// equality in Hoelder against y, which is what drives the ascent.
std::vector<cxd> gauge_image(std::span<const cxd> y, double p) {
    std::vector<cxd> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double m = std::abs(y[i]);
        z[i] = m == 0.0 ? cxd{0.0, 0.0} : std::pow(m, p - 1.0) * phase(y[i]);
    }
    return z;
}

} // namespace

NormEstimate operator_norm(const ComplexMatrix& a, const SpaceDescriptor& space,
                           std::uint64_t seed) {
    if (a.cols() != space.dim) throw input_error("operator_norm: dimension mismatch");
    NormEstimate est;
    est.seed = seed;
    if (a.rows() == 0 || a.cols() == 0) {
        est.exact = true;
        return est;
    }
    if (space.p == 1.0) {
        est.value = max_column_sum(a);
        est.exact = true;
        return est;
    }
    if (space.is_inf()) {
        est.value = max_row_sum(a);
        est.exact = true;
        return est;
    }
    if (space.p == 2.0) {
        est.value = spectral_norm(a);
        est.exact = true;
        return est;
    }

    // General p: power method through the duality maps of l^p and l^q.
    // Every iterate is feasible, so the running max is a true lower bound;
    // exact stays false because the ascent can stall at a local maximum.
    const double p = space.p;
    const double q = p / (p - 1.0);
    const SpaceDescriptor range{a.rows(), p};
    const ComplexMatrix astar = adjoint(a);
    constexpr std::size_t kStarts = 32;
    constexpr std::size_t kMaxIter = 200;

    for (std::size_t start = 0; start < kStarts; ++start) {
        std::vector<cxd> x(space.dim);
        if (start == 0) {
            std::fill(x.begin(), x.end(), cxd{1.0, 0.0});
        } else {
            Rng rng = Rng::substream(seed, "operator-norm", start);
            x = rng.gaussian_vector(space.dim);
        }
        double xn = vec_norm(x, space);
        if (xn == 0.0) continue;
        kernels::active().scale(cxd{1.0 / xn, 0.0}, x.data(), x.size());

        double prev = -1.0;
        for (std::size_t it = 0; it < kMaxIter; ++it) {
            const std::vector<cxd> y = projlab::apply(a, x);
            const double val = vec_norm(y, range);
            est.value = std::max(est.value, val);
            ++est.iterations;
            if (val <= prev + 1e-13 * std::max(1.0, val)) break;
            prev = val;
            if (val == 0.0) break;
            const std::vector<cxd> z = gauge_image(y, p);
            std::vector<cxd> w = projlab::apply(astar, z);
            std::vector<cxd> xn_vec = gauge_image(w, q);
            const double nn = vec_norm(xn_vec, space);
            if (nn == 0.0) break;
            kernels::active().scale(cxd{1.0 / nn, 0.0}, xn_vec.data(), xn_vec.size());
            x = std::move(xn_vec);
        }
    }
    return est;
}

// -------------------------------------------------------------------------
// LU
// -------------------------------------------------------------------------

LuFactorization lu_factor(const ComplexMatrix& a, double pivot_tol) {
    if (!a.square()) throw input_error("lu_factor: matrix not square");
    const std::size_t n = a.rows();
    LuFactorization f;
    f.lu = a;
    f.perm.resize(n);
    std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(f.lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = std::abs(f.lu(i, k));
            if (m > best) {
                best = m;
                piv = i;
            }
        }
        if (best <= pivot_tol) {
            f.singular = true;
            continue;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
        }
        const cxd d = f.lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cxd l = f.lu(i, k) / d;
            f.lu(i, k) = l;
            if (l == cxd{0.0, 0.0}) continue;
            for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= l * f.lu(k, j);
        }
    }
    return f;
}

std::vector<cxd> LuFactorization::solve(std::span<const cxd> rhs) const {
    const std::size_t n = perm.size();
    if (rhs.size() != n) throw input_error("lu solve: dimension mismatch");
    if (singular) throw numerical_error("lu solve: singular factorization");
    std::vector<cxd> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[perm[i]];
    for (std::size_t i = 1; i < n; ++i) {
        cxd acc = x[i];
        for (std::size_t j = 0; j < i; ++j) acc -= lu(i, j) * x[j];
        x[i] = acc;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        cxd acc = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= lu(ii, j) * x[j];
        x[ii] = acc / lu(ii, ii);
    }
    return x;
}

ComplexMatrix LuFactorization::solve(const ComplexMatrix& rhs) const {
    const std::size_t n = perm.size();
    if (rhs.rows() != n) throw input_error("lu solve: dimension mismatch");
    ComplexMatrix x(n, rhs.cols());
    std::vector<cxd> col(n);
    for (std::size_t j = 0; j < rhs.cols(); ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = rhs(i, j);
        const std::vector<cxd> sol = solve(col);
        for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
    }
    return x;
}

cxd LuFactorization::determinant() const {
    if (singular) return cxd{0.0, 0.0};
    // Permutation parity by cycle counting.
    std::vector<bool> seen(perm.size(), false);
    int sign = 1;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (seen[i]) continue;
        std::size_t len = 0;
        for (std::size_t j = i; !seen[j]; j = perm[j]) {
            seen[j] = true;
            ++len;
        }
        if (len % 2 == 0) sign = -sign;
    }
    cxd det{static_cast<double>(sign), 0.0};
    for (std::size_t i = 0; i < perm.size(); ++i) det *= lu(i, i);
    return det;
}

// -------------------------------------------------------------------------
// Matrix exponential: scaling and squaring around a (6,6) Pade approximant.
// -------------------------------------------------------------------------

ComplexMatrix matrix_exponential(const ComplexMatrix& a) {
    if (!a.square()) throw input_error("matrix_exponential: matrix not square");
    const std::size_t n = a.rows();
    if (n == 0) return a;

    const double norm1 = max_column_sum(a);
    int s = 0;
    if (norm1 > 0.5) s = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    ComplexMatrix b = a;
    b *= cxd{std::ldexp(1.0, -s), 0.0};

    static const double c[7] = {1.0,        1.0 / 2.0,     5.0 / 44.0, 1.0 / 66.0,
                                1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
    ComplexMatrix power = ComplexMatrix::identity(n);
    ComplexMatrix even = ComplexMatrix::identity(n); // c0 * I
    ComplexMatrix odd = ComplexMatrix::zero(n, n);
    for (int k = 1; k <= 6; ++k) {
        power = compose(power, b);
        ComplexMatrix term = power;
        term *= cxd{c[k], 0.0};
        if (k % 2 == 0)
            even += term;
        else
            odd += term;
    }
    const ComplexMatrix numer = even + odd;
    const ComplexMatrix denom = even - odd;
    ComplexMatrix x = lu_factor(denom, 1e-300).solve(numer);
    for (int k = 0; k < s; ++k) x = compose(x, x);
    return x;
}

} // namespace projlab
