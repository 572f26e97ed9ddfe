#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "projlab/complex_matrix.hpp"
#include "projlab/rng.hpp"
#include "projlab/space.hpp"

namespace projlab {

/// Budget and seed for every sampling-based estimator. Estimates are
/// one-sided (lower bounds of suprema unless stated otherwise); `slack` is
/// the allowance inequality checks grant the opposing side.
struct SamplingConfig {
    std::size_t samples = 10000;
    std::size_t ascent_iterations = 60;
    std::uint64_t seed = 0;
    double slack = 0.02;

    SamplingConfig with_samples(std::size_t n) const {
        SamplingConfig c = *this;
        c.samples = n;
        return c;
    }
    /// Larger-budget variant used when this side of an inequality must not
    /// be underestimated.
    SamplingConfig refined() const { return with_samples(samples * 2); }
};

struct BestSample {
    double value = -std::numeric_limits<double>::infinity();
    std::size_t index = 0;
    bool any = false;
};

/// Number of worker threads: PROJLAB_THREADS if set (min 1), else hardware
/// concurrency capped at 16.
std::size_t thread_budget();

/// Deterministic parallel maximization of f over [0, count). Work is split
/// into fixed chunks scanned in order inside each chunk and merged in chunk
/// order (max by value, ties to the lowest index), so the winner does not
/// depend on thread scheduling. f must be thread-safe; NaN values and
/// -infinity are treated as "no sample".
BestSample parallel_argmax(std::size_t count, const std::function<double(std::size_t)>& f);

/// Random direction with unit space-norm.
std::vector<cxd> random_unit(Rng& rng, const SpaceDescriptor& space);

/// Structured directions that hit the extreme points mattering in l^1 and
/// l^inf: basis vectors, the all-ones vector, pairwise combinations
/// e_i ± e_j and e_i + i·e_j (coordinate pairs capped for large dims).
/// All returned vectors have unit space-norm.
std::vector<std::vector<cxd>> structured_directions(const SpaceDescriptor& space);

/// Stochastic hill climb over a feasible set given by a repair map.
/// `repair` turns an arbitrary perturbed point into a feasible one (or
/// returns empty when it cannot); `objective` is maximized.
struct AscentProblem {
    std::function<std::vector<cxd>(std::span<const cxd>)> repair;
    std::function<double(std::span<const cxd>)> objective;
};

struct AscentResult {
    std::vector<cxd> point;
    double value = -std::numeric_limits<double>::infinity();
};

AscentResult hill_climb(const AscentProblem& problem, std::vector<cxd> start,
                        double start_value, Rng& rng, std::size_t iterations);

/// Eigenvectors of near-unimodular eigenvalues (|lambda| >= 1 - band),
/// normalized in the space norm. These are feasible for every Apostol-type
/// constraint set and anchor the suprema the estimators chase.
std::vector<std::vector<cxd>> boundary_eigenvector_seeds(const ComplexMatrix& t,
                                                         const SpaceDescriptor& space,
                                                         double band = 1e-6);

} // namespace projlab
