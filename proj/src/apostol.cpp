#include "projlab/apostol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>
#include <utility>

#include "projlab/errors.hpp"
#include "projlab/geometry.hpp"
#include "projlab/kernels.hpp"
#include "projlab/linalg.hpp"
#include "projlab/projections.hpp"

namespace projlab {

namespace {

constexpr double kNormOneBand = 1e-8;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

/// Unit vector with its Apostol data cached: obj = ||x - Tx|| and
/// defect = 1 - ||Tx|| (clamped at 0). For a unit vector the two variants'
/// constraints coincide; phi additionally admits the scaled copies t*x,
/// whose defect and objective both scale linearly in t.
struct Candidate {
    std::vector<cxd> point;
    double obj = 0.0;
    double defect = 0.0;
};

Candidate make_candidate(const ComplexMatrix& t, const SpaceDescriptor& space,
                         std::vector<cxd> x) {
    Candidate c;
    std::vector<cxd> tx = projlab::apply(t, x);
    c.defect = std::max(0.0, 1.0 - vec_norm(tx, space));
    kernels::active().scale(cxd{-1.0, 0.0}, tx.data(), tx.size());
    kernels::active().axpy(cxd{1.0, 0.0}, x.data(), tx.data(), tx.size());
    c.obj = vec_norm(tx, space);
    c.point = std::move(x);
    return c;
}

/// Shared candidate pool: structured directions, boundary eigenvectors of T
/// (feasible anchors at every eps), and cfg.samples random unit vectors.
/// Slot-indexed parallel fill with per-index substreams keeps the result
/// independent of scheduling.
std::vector<Candidate> build_pool(const ComplexMatrix& t, const SpaceDescriptor& space,
                                  const SamplingConfig& cfg) {
    std::vector<std::vector<cxd>> starts = structured_directions(space);
    {
        auto seeds = boundary_eigenvector_seeds(t, space);
        starts.insert(starts.end(), std::make_move_iterator(seeds.begin()),
                      std::make_move_iterator(seeds.end()));
    }
    const std::size_t base = starts.size();
    const std::size_t total = base + cfg.samples;
    std::vector<Candidate> pool(total);
    const auto fill = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            std::vector<cxd> x;
            if (i < base) {
                x = starts[i];
            } else {
                Rng rng = Rng::substream(cfg.seed, "apostol", i);
                x = random_unit(rng, space);
            }
            pool[i] = make_candidate(t, space, std::move(x));
        }
    };
    const std::size_t workers = thread_budget();
    if (workers <= 1 || total < 512) {
        fill(0, total);
    } else {
        std::vector<std::thread> threads;
        const std::size_t chunk = (total + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(total, lo + chunk);
            if (lo >= hi) break;
            threads.emplace_back(fill, lo, hi);
        }
        for (auto& th : threads) th.join();
    }
    return pool;
}

struct PoolEval {
    double value = 0.0;
    std::ptrdiff_t index = -1;
    double scale = 1.0;
};

PoolEval eval_modulus(const std::vector<Candidate>& pool, double eps, PhiVariant variant) {
    PoolEval best;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const Candidate& c = pool[i];
        double scale = 1.0;
        if (variant == PhiVariant::phi_tilde) {
            if (c.defect > eps) continue;
        } else if (c.defect > eps) {
            scale = eps / c.defect;
        }
        const double value = scale * c.obj;
        if (value > best.value) {
            best.value = value;
            best.index = static_cast<std::ptrdiff_t>(i);
            best.scale = scale;
        }
    }
    return best;
}

/// Euclidean top singular direction of I - T: the objective's steepest
/// section partner (exact for orthoprojections, a good heuristic otherwise).
std::vector<cxd> top_diff_direction(const ComplexMatrix& t) {
    const std::size_t n = t.rows();
    const ComplexMatrix d = ComplexMatrix::identity(n) - t;
    const HermitianEigen eig = hermitian_eigensystem(compose(adjoint(d), d));
    std::vector<cxd> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = eig.vectors(i, n - 1);
    return v;
}

/// One-dimensional search over the section {cos(th) u + phase sin(th) w}:
/// all grid points join the pool, and for every requested eps a bisection
/// lands a candidate on the feasible side of the defect boundary, where the
/// constrained suprema of both variants live.
void add_section_candidates(std::vector<Candidate>& pool, const ComplexMatrix& t,
                            const SpaceDescriptor& space, std::span<const cxd> u,
                            std::span<const cxd> v, std::span<const double> eps_list) {
    const std::size_t n = u.size();
    if (v.size() != n) return;
    std::vector<cxd> w(v.begin(), v.end());
    cxd ip{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) ip += std::conj(u[i]) * w[i];
    double w2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] -= ip * u[i];
        w2 += std::norm(w[i]);
    }
    w2 = std::sqrt(w2);
    if (w2 < 1e-10) return;
    for (auto& z : w) z /= w2;

    static constexpr cxd kPhases[] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    constexpr int kGrid = 48;
    const double half_pi = std::numbers::pi / 2.0;

    for (const cxd phase : kPhases) {
        const auto at = [&](double theta) -> Candidate {
            std::vector<cxd> x(n);
            const double c = std::cos(theta), s = std::sin(theta);
            for (std::size_t i = 0; i < n; ++i) x[i] = c * u[i] + phase * s * w[i];
            const double nn = vec_norm(x, space);
            if (nn < 1e-14) return {};
            for (auto& z : x) z /= nn;
            return make_candidate(t, space, std::move(x));
        };
        std::vector<double> thetas(kGrid + 1);
        std::vector<double> defects(kGrid + 1);
        thetas[0] = 0.0;
        defects[0] = make_candidate(t, space, std::vector<cxd>(u.begin(), u.end())).defect;
        for (int j = 1; j <= kGrid; ++j) {
            thetas[j] = half_pi * j / kGrid;
            Candidate c = at(thetas[j]);
            defects[j] = c.point.empty() ? 0.0 : c.defect;
            if (!c.point.empty()) pool.push_back(std::move(c));
        }
        for (const double eps : eps_list) {
            for (int j = 0; j < kGrid; ++j) {
                const bool in0 = defects[j] <= eps, in1 = defects[j + 1] <= eps;
                if (in0 == in1) continue;
                double feas = in0 ? thetas[j] : thetas[j + 1];
                double infeas = in0 ? thetas[j + 1] : thetas[j];
                for (int it = 0; it < 45; ++it) {
                    const double mid = 0.5 * (feas + infeas);
                    const Candidate c = at(mid);
                    (c.point.empty() || c.defect <= eps ? feas : infeas) = mid;
                }
                Candidate c = at(feas);
                if (!c.point.empty()) pool.push_back(std::move(c));
            }
        }
    }
}

void add_sections(std::vector<Candidate>& pool, const ComplexMatrix& t,
                  const SpaceDescriptor& space, std::span<const double> eps_list) {
    std::vector<std::vector<cxd>> anchors = boundary_eigenvector_seeds(t, space);
    if (anchors.size() > 6) anchors.resize(6);
    if (anchors.empty()) {
        const PoolEval best = eval_modulus(pool, 1.0, PhiVariant::phi);
        if (best.index >= 0) anchors.push_back(pool[best.index].point);
    }
    if (anchors.empty()) return;
    const std::vector<cxd> vdir = top_diff_direction(t);
    for (const auto& u : anchors) add_section_candidates(pool, t, space, u, vdir, eps_list);
}

/// Projected stochastic ascent from the pool's best candidate; the refined
/// point (always unit and variant-feasible) joins the pool so later
/// evaluations at wider eps see it too.
void refine(const ComplexMatrix& t, const SpaceDescriptor& space, double eps,
            PhiVariant variant, const SamplingConfig& cfg, std::vector<Candidate>& pool) {
    const PoolEval start = eval_modulus(pool, eps, variant);
    if (start.index < 0) return;

    const auto unit_of = [&](std::span<const cxd> x) -> std::vector<cxd> {
        const double nn = vec_norm(x, space);
        if (nn <= 1e-14) return {};
        std::vector<cxd> u(x.begin(), x.end());
        kernels::active().scale(cxd{1.0 / nn, 0.0}, u.data(), u.size());
        return u;
    };
    AscentProblem prob;
    if (variant == PhiVariant::phi_tilde) {
        prob.repair = [&](std::span<const cxd> x) -> std::vector<cxd> {
            std::vector<cxd> u = unit_of(x);
            if (u.empty()) return {};
            const std::vector<cxd> tu = projlab::apply(t, u);
            if (1.0 - vec_norm(tu, space) > eps) return {};
            return u;
        };
        prob.objective = [&](std::span<const cxd> x) -> double {
            std::vector<cxd> tx = projlab::apply(t, x);
            kernels::active().scale(cxd{-1.0, 0.0}, tx.data(), tx.size());
            kernels::active().axpy(cxd{1.0, 0.0}, x.data(), tx.data(), tx.size());
            return vec_norm(tx, space);
        };
    } else {
        prob.repair = [&](std::span<const cxd> x) { return unit_of(x); };
        prob.objective = [&](std::span<const cxd> x) -> double {
            std::vector<cxd> tx = projlab::apply(t, x);
            const double defect = std::max(0.0, 1.0 - vec_norm(tx, space));
            kernels::active().scale(cxd{-1.0, 0.0}, tx.data(), tx.size());
            kernels::active().axpy(cxd{1.0, 0.0}, x.data(), tx.data(), tx.size());
            const double scale = defect > eps ? eps / defect : 1.0;
            return scale * vec_norm(tx, space);
        };
    }
    Rng climb = Rng::substream(cfg.seed,
                               variant == PhiVariant::phi ? "phi-ascent" : "phi-tilde-ascent",
                               std::bit_cast<std::uint64_t>(eps));
    AscentResult res = hill_climb(prob, pool[start.index].point, start.value, climb,
                                  cfg.ascent_iterations);
    if (!res.point.empty() && res.value > start.value)
        pool.push_back(make_candidate(t, space, std::move(res.point)));
}

ModulusEstimate read_estimate(const std::vector<Candidate>& pool, double eps,
                              PhiVariant variant, const SamplingConfig& cfg) {
    ModulusEstimate out;
    out.epsilon = eps;
    out.variant = variant;
    out.samples = pool.size();
    out.seed = cfg.seed;
    const PoolEval best = eval_modulus(pool, eps, variant);
    if (best.index < 0) return out;
    out.value = std::min(best.value, 2.0);
    out.maximizer = pool[best.index].point;
    if (best.scale != 1.0)
        kernels::active().scale(cxd{best.scale, 0.0}, out.maximizer.data(),
                                out.maximizer.size());
    return out;
}

void require_shape(const ComplexMatrix& t, const SpaceDescriptor& space, const char* who) {
    if (!t.square() || t.rows() != space.dim)
        throw input_error(std::string(who) + ": shape mismatch with space");
}

NormEstimate require_contraction(const ComplexMatrix& t, const SpaceDescriptor& space,
                                 const char* who) {
    const NormEstimate n = operator_norm(t, space);
    if (n.value > 1.0 + (n.exact ? 1e-10 : 1e-8))
        throw input_error(std::string(who) + ": operator is not a contraction");
    return n;
}

std::vector<double> dyadic_grid() {
    std::vector<double> grid;
    for (int k = 10; k >= 1; --k) grid.push_back(std::ldexp(1.0, -k));
    return grid; // ascending: 2^-10 .. 2^-1
}

double clamp_arg(double x) { return std::clamp(x, 1e-12, 1.0); }

} // namespace

ModulusEstimate apostol_phi(const ComplexMatrix& t, const SpaceDescriptor& space,
                            double epsilon, PhiVariant variant, const SamplingConfig& cfg) {
    require_shape(t, space, "apostol_phi");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw input_error("apostol_phi: epsilon must lie in (0,1]");
    const NormEstimate norm = require_contraction(t, space, "apostol_phi");
    if (variant == PhiVariant::phi_tilde && norm.value < 1.0 - kNormOneBand)
        throw input_error("apostol_phi: the phi-tilde modulus is defined only for "
                          "contractions of norm one");

    std::vector<Candidate> pool = build_pool(t, space, cfg);
    const double eps_list[] = {epsilon};
    add_sections(pool, t, space, eps_list);
    refine(t, space, epsilon, variant, cfg, pool);
    return read_estimate(pool, epsilon, variant, cfg);
}

OmegaEstimate omega(const ComplexMatrix& t, const SpaceDescriptor& space,
                    const SamplingConfig& cfg) {
    require_shape(t, space, "omega");
    const NormEstimate norm = require_contraction(t, space, "omega");

    OmegaEstimate out;
    out.norm_below_one = norm.value < 1.0 - kNormOneBand;
    const PhiVariant variant = out.norm_below_one ? PhiVariant::phi : PhiVariant::phi_tilde;

    std::vector<Candidate> pool = build_pool(t, space, cfg);
    const std::vector<double> grid = dyadic_grid();
    add_sections(pool, t, space, grid);
    for (const double eps : grid) { // ascending: the shared pool only grows,
        refine(t, space, eps, variant, cfg, pool); // so values are monotone
        out.values.push_back(read_estimate(pool, eps, variant, cfg));
    }
    if (!out.norm_below_one) {
        double lo = out.values.front().value;
        for (const auto& v : out.values) lo = std::min(lo, v.value);
        out.extrapolated = lo;
    }
    return out;
}

ChainReport check_modulus_chain(const ComplexMatrix& t, const SpaceDescriptor& space,
                                double epsilon, const SamplingConfig& cfg) {
    require_shape(t, space, "check_modulus_chain");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw input_error("check_modulus_chain: epsilon must lie in (0,1]");
    const NormEstimate norm = require_contraction(t, space, "check_modulus_chain");
    if (norm.value < 1.0 - kNormOneBand)
        throw input_error("check_modulus_chain: requires a norm-one contraction");

    ChainReport rep;
    rep.epsilon = epsilon;
    const std::string inst = "eps=" + fmt(epsilon);

    std::vector<Candidate> pool = build_pool(t, space, cfg);
    std::vector<double> grid = dyadic_grid();
    grid.push_back(epsilon);
    std::sort(grid.begin(), grid.end());
    add_sections(pool, t, space, grid);
    for (const double eps : grid) refine(t, space, eps, PhiVariant::phi_tilde, cfg, pool);
    refine(t, space, epsilon, PhiVariant::phi, cfg, pool);

    // Every refinement lives in the pool, so the four quantities below are
    // maxima/minima over one candidate set and the chain holds link by link
    // whenever the mathematics says it should.
    double omega_value = 2.0;
    for (const double eps : grid)
        omega_value = std::min(omega_value, eval_modulus(pool, eps, PhiVariant::phi_tilde).value);
    rep.omega_value = omega_value;
    rep.phi_tilde_value = eval_modulus(pool, epsilon, PhiVariant::phi_tilde).value;
    rep.phi_value = eval_modulus(pool, epsilon, PhiVariant::phi).value;

    const NormEstimate diff = operator_norm(ComplexMatrix::identity(t.rows()) - t, space);
    rep.norm_exact = diff.exact;
    rep.norm_value = diff.value;
    for (const Candidate& c : pool) rep.norm_value = std::max(rep.norm_value, c.obj);

    rep.links.push_back(
        CheckResult::compare("chain-omega-nonneg", inst, 0.0, rep.omega_value, 1e-12));
    rep.links.push_back(CheckResult::compare("chain-omega-le-phi-tilde", inst,
                                             rep.omega_value, rep.phi_tilde_value, 1e-12));
    rep.links.push_back(CheckResult::compare("chain-phi-tilde-le-phi", inst,
                                             rep.phi_tilde_value, rep.phi_value, 1e-12));
    rep.links.push_back(CheckResult::compare("chain-phi-le-diff-norm", inst, rep.phi_value,
                                             rep.norm_value, 1e-12,
                                             rep.norm_exact ? "" : "diff norm is an estimate"));
    rep.links.push_back(
        CheckResult::compare("chain-diff-norm-le-two", inst, rep.norm_value, 2.0, 1e-8));
    return rep;
}

CheckResult convex_composition_bound(const std::vector<ComplexMatrix>& ops,
                                     const std::vector<double>& weights,
                                     const SpaceDescriptor& space, double epsilon,
                                     const SamplingConfig& cfg) {
    if (ops.empty() || ops.size() != weights.size())
        throw input_error("convex_composition_bound: need one weight per operator");
    double sum = 0.0;
    for (const double w : weights) {
        if (!(w > 0.0)) throw input_error("convex_composition_bound: weights must be positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw input_error("convex_composition_bound: weights must sum to one");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw input_error("convex_composition_bound: epsilon must lie in (0,1]");

    std::string inst = "eps=" + fmt(epsilon) + " weights=(";
    for (std::size_t k = 0; k < weights.size(); ++k)
        inst += (k ? "," : "") + fmt(weights[k]);
    inst += ")";

    require_shape(ops.front(), space, "convex_composition_bound");
    ComplexMatrix mix = ops.front();
    mix *= cxd{weights.front(), 0.0};
    for (std::size_t k = 1; k < ops.size(); ++k) {
        require_shape(ops[k], space, "convex_composition_bound");
        ComplexMatrix term = ops[k];
        term *= cxd{weights[k], 0.0};
        mix += term;
    }
    for (const auto& op : ops) {
        const NormEstimate n = require_contraction(op, space, "convex_composition_bound");
        if (n.value < 1.0 - kNormOneBand)
            throw input_error("convex_composition_bound: every term must have norm one");
    }
    const NormEstimate mix_norm = operator_norm(mix, space);
    if (mix_norm.value < 1.0 - kNormOneBand)
        return CheckResult::vacuous("composition-convex", inst,
                                    "combination norm " + fmt(mix_norm.value) +
                                        " below one; the bound is vacuous");

    const double lhs =
        apostol_phi(mix, space, epsilon, PhiVariant::phi_tilde, cfg).value;
    double rhs = 0.0;
    std::string notes;
    for (std::size_t k = 0; k < ops.size(); ++k) {
        const double arg = clamp_arg(epsilon / weights[k]);
        const double term =
            apostol_phi(ops[k], space, arg, PhiVariant::phi_tilde, cfg.refined()).value;
        rhs += weights[k] * term;
        notes += (k ? "; " : "") + ("term" + std::to_string(k + 1)) + "(" + fmt(arg) +
                 ")=" + fmt(term);
    }
    return CheckResult::compare("composition-convex", inst, lhs, rhs, cfg.slack, notes);
}

CompositionReport check_composition_bounds(const ComplexMatrix& a, const ComplexMatrix& b,
                                           const std::vector<double>& weights,
                                           const SpaceDescriptor& space, double epsilon,
                                           const SamplingConfig& cfg) {
    require_shape(a, space, "check_composition_bounds");
    require_shape(b, space, "check_composition_bounds");
    if (weights.size() != 2)
        throw input_error("check_composition_bounds: expected two weights");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw input_error("check_composition_bounds: epsilon must lie in (0,1]");
    for (const ComplexMatrix* op : {&a, &b}) {
        const NormEstimate n = require_contraction(*op, space, "check_composition_bounds");
        if (n.value < 1.0 - kNormOneBand)
            throw input_error("check_composition_bounds: factors must have norm one");
    }

    CompositionReport rep;
    const std::string inst = "eps=" + fmt(epsilon);
    const ComplexMatrix ab = compose(a, b);
    const NormEstimate ab_norm = operator_norm(ab, space);
    if (ab_norm.value < 1.0 - kNormOneBand) {
        rep.product = CheckResult::vacuous("composition-product", inst,
                                           "product norm " + fmt(ab_norm.value) +
                                               " below one; the bound is vacuous");
    } else {
        const double lhs =
            apostol_phi(ab, space, epsilon, PhiVariant::phi_tilde, cfg).value;
        const double ptb =
            apostol_phi(b, space, epsilon, PhiVariant::phi_tilde, cfg.refined()).value;
        const double arg = clamp_arg(ptb + epsilon);
        const double pta =
            apostol_phi(a, space, arg, PhiVariant::phi_tilde, cfg.refined()).value;
        rep.product = CheckResult::compare("composition-product", inst, lhs, pta + ptb,
                                           cfg.slack,
                                           "phiB(" + fmt(epsilon) + ")=" + fmt(ptb) +
                                               "; phiA(" + fmt(arg) + ")=" + fmt(pta));
    }
    rep.convex = convex_composition_bound({a, b}, weights, space, epsilon, cfg);
    return rep;
}

CheckResult check_beta_bound(const ComplexMatrix& p, const SpaceDescriptor& space,
                             double epsilon, const SamplingConfig& cfg) {
    require_shape(p, space, "check_beta_bound");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw input_error("check_beta_bound: epsilon must lie in (0,1]");
    const std::string inst = "eps=" + fmt(epsilon);

    const OrthoReport rep = is_orthoprojection(p, space);
    if (!rep.ortho || rep.norm.value < 1.0 - kNormOneBand)
        return CheckResult::vacuous("beta-bound", inst,
                                    "not applicable: P is not a norm-one orthoprojection");

    const double lhs = apostol_phi(p, space, epsilon, PhiVariant::phi_tilde, cfg).value;
    if (space.p == 2.0)
        return CheckResult::compare("beta-bound", inst, lhs, beta_hilbert(epsilon), 1e-9,
                                    "closed-form beta");
    double rhs = 0.0;
    for (std::uint64_t shift = 0; shift < 3; ++shift)
        rhs = std::max(rhs,
                       beta_modulus(space, epsilon, cfg.seed + 0x9e3779b9u * (shift + 1)).value);
    return CheckResult::compare("beta-bound", inst, lhs, rhs, cfg.slack,
                                "beta is a lower-bound estimate (best of 3 seeds)");
}

} // namespace projlab
