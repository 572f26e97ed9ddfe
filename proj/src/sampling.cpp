#include "projlab/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "projlab/kernels.hpp"
#include "projlab/linalg.hpp"

namespace projlab {

std::size_t thread_budget() {
    if (const char* env = std::getenv("PROJLAB_THREADS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<std::size_t>(v);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return std::min<std::size_t>(hw == 0 ? 1 : hw, 16);
}

BestSample parallel_argmax(std::size_t count, const std::function<double(std::size_t)>& f) {
    BestSample best;
    if (count == 0) return best;

    const auto consider = [](BestSample& acc, double v, std::size_t i) {
        if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) return;
        if (!acc.any || v > acc.value) {
            acc.value = v;
            acc.index = i;
            acc.any = true;
        }
    };

    const std::size_t workers = std::min(thread_budget(), count);
    if (workers <= 1 || count < 256) {
        for (std::size_t i = 0; i < count; ++i) consider(best, f(i), i);
        return best;
    }

    // Fixed chunk grid; each chunk is scanned in index order and chunks are
    // merged in order, so the outcome is schedule-independent.
    constexpr std::size_t kChunks = 64;
    std::vector<BestSample> chunk_best(kChunks);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= kChunks) return;
            const std::size_t lo = c * count / kChunks;
            const std::size_t hi = (c + 1) * count / kChunks;
            for (std::size_t i = lo; i < hi; ++i) consider(chunk_best[c], f(i), i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();

    for (const BestSample& cb : chunk_best) {
        if (!cb.any) continue;
        if (!best.any || cb.value > best.value) best = cb;
    }
    return best;
}

std::vector<cxd> random_unit(Rng& rng, const SpaceDescriptor& space) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<cxd> x = rng.gaussian_vector(space.dim);
        const double n = vec_norm(x, space);
        if (n > 1e-12) {
            kernels::active().scale(cxd{1.0 / n, 0.0}, x.data(), x.size());
            return x;
        }
    }
    // Practically unreachable; fall back to a basis vector.
    std::vector<cxd> x(space.dim, cxd{0.0, 0.0});
    x[0] = cxd{1.0, 0.0};
    return x;
}

std::vector<std::vector<cxd>> structured_directions(const SpaceDescriptor& space) {
    const std::size_t n = space.dim;
    std::vector<std::vector<cxd>> out;
    auto push = [&](std::vector<cxd> v) {
        const double norm = vec_norm(v, space);
        if (norm <= 1e-12) return;
        kernels::active().scale(cxd{1.0 / norm, 0.0}, v.data(), v.size());
        out.push_back(std::move(v));
    };

    for (std::size_t i = 0; i < n; ++i) {
        std::vector<cxd> e(n, cxd{0.0, 0.0});
        e[i] = cxd{1.0, 0.0};
        push(std::move(e));
    }
    push(std::vector<cxd>(n, cxd{1.0, 0.0}));

    const std::size_t cap = std::min<std::size_t>(n, 12);
    for (std::size_t i = 0; i < cap; ++i) {
        for (std::size_t j = i + 1; j < cap; ++j) {
            std::vector<cxd> plus(n, cxd{0.0, 0.0}), minus(n, cxd{0.0, 0.0}),
                phased(n, cxd{0.0, 0.0});
            plus[i] = plus[j] = cxd{1.0, 0.0};
            minus[i] = cxd{1.0, 0.0};
            minus[j] = cxd{-1.0, 0.0};
            phased[i] = cxd{1.0, 0.0};
            phased[j] = cxd{0.0, 1.0};
            push(std::move(plus));
            push(std::move(minus));
            push(std::move(phased));
        }
    }
    return out;
}

std::vector<std::vector<cxd>> boundary_eigenvector_seeds(const ComplexMatrix& t,
                                                         const SpaceDescriptor& space,
                                                         double band) {
    std::vector<std::vector<cxd>> seeds;
    const EigenSystem eig = eigenvalues(t);
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        if (std::abs(eig.values[k]) < 1.0 - band) continue;
        if (eig.residuals[k] > 1e-6) continue;
        std::vector<cxd> v(t.rows());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = eig.vectors(i, k);
        const double n = vec_norm(v, space);
        if (n <= 1e-12) continue;
        kernels::active().scale(cxd{1.0 / n, 0.0}, v.data(), v.size());
        seeds.push_back(std::move(v));
    }
    return seeds;
}

AscentResult hill_climb(const AscentProblem& problem, std::vector<cxd> start,
                        double start_value, Rng& rng, std::size_t iterations) {
    AscentResult best{std::move(start), start_value};
    if (best.point.empty()) return best;
    double sigma = 0.5;
    const std::size_t n = best.point.size();
    for (std::size_t it = 0; it < iterations; ++it) {
        std::vector<cxd> probe = best.point;
        for (std::size_t i = 0; i < n; ++i) probe[i] += sigma * rng.complex_gaussian();
        std::vector<cxd> repaired = problem.repair(probe);
        if (!repaired.empty()) {
            const double v = problem.objective(repaired);
            if (v > best.value) {
                best.value = v;
                best.point = std::move(repaired);
                sigma = std::min(1.0, sigma * 1.25);
                continue;
            }
        }
        sigma = std::max(1e-7, sigma * 0.82);
    }
    return best;
}

} // namespace projlab
