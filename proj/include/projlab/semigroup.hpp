#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "projlab/complex_matrix.hpp"

namespace projlab {

/// Expression tree over the convex multiplicative semigroup generated by
/// P_1..P_N: ordered products (projections do not commute; factors are never
/// reordered) and convex combinations with strictly positive weights summing
/// to one. Generator indices are 1-based.
struct SemigroupExpr {
    struct Leaf {
        std::size_t index = 0;
    };
    struct Product {
        std::vector<SemigroupExpr> factors;
    };
    struct Convex {
        std::vector<std::pair<double, SemigroupExpr>> terms;
    };

    std::variant<Leaf, Product, Convex> node;

    static SemigroupExpr leaf(std::size_t index) { return {Leaf{index}}; }
    static SemigroupExpr product(std::vector<SemigroupExpr> factors) {
        return {Product{std::move(factors)}};
    }
    static SemigroupExpr convex(std::vector<std::pair<double, SemigroupExpr>> terms) {
        return {Convex{std::move(terms)}};
    }
};

struct Violation {
    std::string path; // e.g. "root.product[1].convex[0]"
    std::string message;
};

/// Checks every structural invariant: indices within 1..N, products
/// nonempty, weights >= 1e-9 (tiny weights poison the eps arithmetic of the
/// convex composition bound) and summing to 1 within 1e-12. Violations are
/// data, not exceptions.
std::vector<Violation> validate(const SemigroupExpr& expr, std::size_t n_generators);

/// Recursive evaluation; products compose left-to-right in list order.
ComplexMatrix evaluate(const SemigroupExpr& expr,
                       const std::vector<ComplexMatrix>& generators);

/// Union of leaf indices (the index set F of the expression).
std::set<std::size_t> index_set(const SemigroupExpr& expr);

/// Random valid expression tree: Leaf/Product/Convex with odds 0.4/0.3/0.3,
/// product length 2..4, convex arity 2..3 with flat Dirichlet weights;
/// depth 1 forces a Leaf. Deterministic in seed.
SemigroupExpr random_element(std::size_t n_generators, std::size_t depth,
                             std::uint64_t seed);

/// Radius arithmetic along the tree: leaves take the given certified radii,
/// products multiply, convex nodes average. The result is a predicted
/// certified radius for the evaluated expression.
double predicted_d_radius(const SemigroupExpr& expr, const std::vector<double>& radii);

} // namespace projlab
