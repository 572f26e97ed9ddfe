#include "projlab/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "projlab/errors.hpp"
#include "projlab/kernels.hpp"
#include "projlab/linalg.hpp"

namespace projlab {

namespace {

std::vector<cxd> axpy_combo(double a, std::span<const cxd> u, double b,
                            std::span<const cxd> v) {
    std::vector<cxd> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = a * u[i] + b * v[i];
    return out;
}

// Pair state for the delta/beta searches: [x ; y] concatenated.
struct Pair {
    std::vector<cxd> x, y;
};

Pair split(std::span<const cxd> xy) {
    const std::size_t n = xy.size() / 2;
    return {{xy.begin(), xy.begin() + n}, {xy.begin() + n, xy.end()}};
}

std::vector<cxd> join(const Pair& p) {
    std::vector<cxd> xy(p.x);
    xy.insert(xy.end(), p.y.begin(), p.y.end());
    return xy;
}

void clamp_to_ball(std::vector<cxd>& v, const SpaceDescriptor& space) {
    const double n = vec_norm(v, space);
    if (n > 1.0)
        kernels::active().scale(cxd{1.0 / n, 0.0}, v.data(), v.size());
}

} // namespace

double beta_hilbert(double epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) throw input_error("beta_hilbert: epsilon outside [0,1]");
    return 2.0 * std::sqrt(std::max(0.0, 2.0 * epsilon - epsilon * epsilon));
}

GeometryEstimate delta_modulus(const SpaceDescriptor& space, double epsilon,
                               std::uint64_t seed) {
    space.validate();
    if (!(epsilon > 0.0 && epsilon <= 2.0))
        throw input_error("delta_modulus: epsilon must lie in (0, 2]");

    GeometryEstimate est;
    est.epsilon = epsilon;
    est.seed = seed;
    if (space.p == 2.0) {
        est.value = 1.0 - std::sqrt(1.0 - epsilon * epsilon / 4.0);
        est.exact = true;
        est.certifies = "exact";
        return est;
    }
    est.certifies = "upper-bound-of-inf";

    // Midpoint-norm maximization = infimum objective minimization. The
    // repair step clamps both points to the ball and re-separates them to
    // ||x - y|| >= eps along their difference.
    const AscentProblem problem{
        [&](std::span<const cxd> xy) -> std::vector<cxd> {
            Pair p = split(xy);
            clamp_to_ball(p.x, space);
            clamp_to_ball(p.y, space);
            std::vector<cxd> d = axpy_combo(1.0, p.x, -1.0, p.y);
            double dn = vec_norm(d, space);
            if (dn < epsilon) {
                if (dn <= 1e-14) return {};
                const double push = (epsilon * (1.0 + 1e-12)) / dn - 1.0;
                for (std::size_t i = 0; i < d.size(); ++i) {
                    const cxd shift = 0.5 * push * d[i];
                    p.x[i] += shift;
                    p.y[i] -= shift;
                }
                clamp_to_ball(p.x, space);
                clamp_to_ball(p.y, space);
                d = axpy_combo(1.0, p.x, -1.0, p.y);
                dn = vec_norm(d, space);
                if (dn < epsilon - 1e-12) return {};
            }
            return join(p);
        },
        [&](std::span<const cxd> xy) {
            const Pair p = split(xy);
            const std::vector<cxd> s = axpy_combo(1.0, p.x, 1.0, p.y);
            return 0.5 * vec_norm(s, space) - 1.0; // maximize -> minimize 1 - ...
        }};

    const std::vector<std::vector<cxd>> pool = structured_directions(space);
    std::vector<std::vector<cxd>> starts;
    // Antipodal pairs are feasible for every eps <= 2 and anchor the search.
    for (const auto& u : pool) {
        std::vector<cxd> neg(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) neg[i] = -u[i];
        starts.push_back(join({u, neg}));
    }
    for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = 0; j < pool.size(); ++j)
            if (i != j) starts.push_back(join({pool[i], pool[j]}));
    Rng rng = Rng::substream(seed, "delta-modulus");
    for (std::size_t k = 0; k < 512; ++k) {
        const std::vector<cxd> x = random_unit(rng, space);
        std::vector<cxd> d = rng.gaussian_vector(space.dim);
        const double dn = vec_norm(d, space);
        std::vector<cxd> y(x);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] -= (epsilon / dn) * d[i];
        starts.push_back(join({x, y}));
    }

    double best = 0.0; // 1 - best_inner; objective here is inner - 1 in [-1, 0]
    bool found = false;
    double best_inner = -1.0;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        std::vector<cxd> repaired = problem.repair(starts[s]);
        if (repaired.empty()) continue;
        double v = problem.objective(repaired);
        Rng climb_rng = Rng::substream(seed, "delta-ascent", s);
        const AscentResult r =
            hill_climb(problem, std::move(repaired), v, climb_rng, 48);
        if (!found || r.value > best_inner) {
            best_inner = r.value;
            found = true;
        }
    }
    if (!found) throw numerical_error("delta_modulus: no feasible pair found");
    best = -best_inner; // = 1 - ||x+y||/2
    est.value = std::max(0.0, best);
    est.samples = starts.size();
    return est;
}

GeometryEstimate beta_modulus(const SpaceDescriptor& space, double epsilon,
                              std::uint64_t seed) {
    space.validate();
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw input_error("beta_modulus: epsilon must lie in [0, 1]");

    GeometryEstimate est;
    est.epsilon = epsilon;
    est.seed = seed;
    est.certifies = "lower-bound-of-sup";

    const std::size_t n = space.dim;
    Rng rng = Rng::substream(seed, "beta-modulus");

    // Section search: x = a*u1 + b*u2, y = a*u1 - b*u2 with unit u1, u2.
    // Then ||x+y||/2 = a and ||x-y|| = 2b; for each a >= 1-eps the largest
    // admissible b is found by bisection (the feasible b form an interval).
    const auto section_best = [&](std::span<const cxd> u1, std::span<const cxd> u2) {
        double best = 0.0;
        for (int ai = 0; ai <= 8; ++ai) {
            const double a = (1.0 - epsilon) + epsilon * ai / 8.0;
            const auto feasible = [&](double b) {
                const std::vector<cxd> x = axpy_combo(a, u1, b, u2);
                if (vec_norm(x, space) > 1.0) return false;
                const std::vector<cxd> y = axpy_combo(a, u1, -b, u2);
                return vec_norm(y, space) <= 1.0;
            };
            if (!feasible(0.0)) continue;
            double lo = 0.0, hi = 1.0;
            if (feasible(hi)) {
                lo = hi;
            } else {
                for (int it = 0; it < 50; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (feasible(mid) ? lo : hi) = mid;
                }
            }
            best = std::max(best, 2.0 * lo);
        }
        return best;
    };

    const std::vector<std::vector<cxd>> structured = structured_directions(space);
    std::vector<std::vector<cxd>> anchors = structured;
    for (std::size_t k = 0; k < 24; ++k) anchors.push_back(random_unit(rng, space));

    double best = 0.0;
    std::size_t evaluated = 0;
    for (const auto& u1 : anchors) {
        std::vector<std::vector<cxd>> mates;
        for (std::size_t k = 0; k < 8; ++k) {
            // Euclidean-orthogonal mate: in l^2 this parametrization attains
            // the true supremum 2*sqrt(2 eps - eps^2).
            std::vector<cxd> g = rng.gaussian_vector(n);
            const cxd overlap = kernels::active().dot_conj(u1.data(), g.data(), n);
            const double u1_sq = kernels::active().sum_abs2(u1.data(), n);
            kernels::active().axpy(-overlap / u1_sq, u1.data(), g.data(), n);
            const double gn = vec_norm(g, space);
            if (gn <= 1e-12) continue;
            kernels::active().scale(cxd{1.0 / gn, 0.0}, g.data(), n);
            mates.push_back(std::move(g));
        }
        for (const auto& s : structured) mates.push_back(s);
        for (const auto& u2 : mates) {
            best = std::max(best, section_best(u1, u2));
            ++evaluated;
        }
    }

    est.value = std::min(best, 2.0);
    est.samples = evaluated;
    return est;
}

} // namespace projlab
