#include "projlab/semigroup.hpp"

#include <cmath>

#include "projlab/errors.hpp"
#include "projlab/rng.hpp"

namespace projlab {

namespace {

constexpr double kMinWeight = 1e-9;

void validate_node(const SemigroupExpr& expr, std::size_t n, const std::string& path,
                   std::vector<Violation>& out) {
    if (const auto* leaf = std::get_if<SemigroupExpr::Leaf>(&expr.node)) {
        if (leaf->index < 1 || leaf->index > n)
            out.push_back({path, "generator index " + std::to_string(leaf->index) +
                                     " outside 1.." + std::to_string(n)});
        return;
    }
    if (const auto* prod = std::get_if<SemigroupExpr::Product>(&expr.node)) {
        if (prod->factors.empty()) {
            out.push_back({path, "empty product"});
            return;
        }
        for (std::size_t i = 0; i < prod->factors.size(); ++i)
            validate_node(prod->factors[i], n, path + ".product[" + std::to_string(i) + "]",
                          out);
        return;
    }
    const auto& conv = std::get<SemigroupExpr::Convex>(expr.node);
    if (conv.terms.empty()) {
        out.push_back({path, "empty convex combination"});
        return;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < conv.terms.size(); ++i) {
        const double w = conv.terms[i].first;
        const std::string child = path + ".convex[" + std::to_string(i) + "]";
        if (!(w >= kMinWeight))
            out.push_back({child, "weight " + std::to_string(w) + " below 1e-9"});
        sum += w;
        validate_node(conv.terms[i].second, n, child, out);
    }
    if (std::abs(sum - 1.0) > 1e-12)
        out.push_back({path, "convex weights sum to " + std::to_string(sum)});
}

} // namespace

std::vector<Violation> validate(const SemigroupExpr& expr, std::size_t n_generators) {
    std::vector<Violation> out;
    validate_node(expr, n_generators, "root", out);
    return out;
}

ComplexMatrix evaluate(const SemigroupExpr& expr,
                       const std::vector<ComplexMatrix>& generators) {
    if (generators.empty()) throw input_error("evaluate: no generators");
    const std::size_t dim = generators.front().rows();
    for (const auto& g : generators)
        if (!g.square() || g.rows() != dim)
            throw input_error("evaluate: generators must be square and equal-sized");

    if (const auto* leaf = std::get_if<SemigroupExpr::Leaf>(&expr.node)) {
        if (leaf->index < 1 || leaf->index > generators.size())
            throw input_error("evaluate: generator index out of range");
        return generators[leaf->index - 1];
    }
    if (const auto* prod = std::get_if<SemigroupExpr::Product>(&expr.node)) {
        if (prod->factors.empty()) throw input_error("evaluate: empty product");
        ComplexMatrix result = evaluate(prod->factors.front(), generators);
        for (std::size_t i = 1; i < prod->factors.size(); ++i)
            result = compose(result, evaluate(prod->factors[i], generators));
        return result;
    }
    const auto& conv = std::get<SemigroupExpr::Convex>(expr.node);
    if (conv.terms.empty()) throw input_error("evaluate: empty convex combination");
    ComplexMatrix result(dim, dim);
    for (const auto& [w, child] : conv.terms) {
        ComplexMatrix term = evaluate(child, generators);
        term *= cxd{w, 0.0};
        result += term;
    }
    return result;
}

std::set<std::size_t> index_set(const SemigroupExpr& expr) {
    std::set<std::size_t> out;
    if (const auto* leaf = std::get_if<SemigroupExpr::Leaf>(&expr.node)) {
        out.insert(leaf->index);
    } else if (const auto* prod = std::get_if<SemigroupExpr::Product>(&expr.node)) {
        for (const auto& f : prod->factors) out.merge(index_set(f));
    } else {
        for (const auto& [w, child] : std::get<SemigroupExpr::Convex>(expr.node).terms)
            out.merge(index_set(child));
    }
    return out;
}

namespace {

SemigroupExpr random_node(std::size_t n, std::size_t depth, Rng& rng) {
    const auto leaf = [&] {
        return SemigroupExpr::leaf(static_cast<std::size_t>(rng.integer(1, n)));
    };
    if (depth <= 1) return leaf();
    const double u = rng.uniform();
    if (u < 0.4) return leaf();
    if (u < 0.7) {
        const std::size_t len = static_cast<std::size_t>(rng.integer(2, 4));
        std::vector<SemigroupExpr> factors;
        factors.reserve(len);
        for (std::size_t i = 0; i < len; ++i) factors.push_back(random_node(n, depth - 1, rng));
        return SemigroupExpr::product(std::move(factors));
    }
    const std::size_t arity = static_cast<std::size_t>(rng.integer(2, 3));
    std::vector<double> weights(arity);
    for (;;) { // flat Dirichlet via normalized exponentials; retry if any
        double sum = 0.0; // weight lands below the validation floor
        for (auto& w : weights) {
            w = -std::log1p(-rng.uniform());
            sum += w;
        }
        bool ok = sum > 0.0;
        for (auto& w : weights) {
            w /= sum;
            ok = ok && w >= kMinWeight;
        }
        if (ok) break;
    }
    std::vector<std::pair<double, SemigroupExpr>> terms;
    terms.reserve(arity);
    for (std::size_t i = 0; i < arity; ++i)
        terms.emplace_back(weights[i], random_node(n, depth - 1, rng));
    return SemigroupExpr::convex(std::move(terms));
}

} // namespace

SemigroupExpr random_element(std::size_t n_generators, std::size_t depth,
                             std::uint64_t seed) {
    if (n_generators < 1) throw input_error("random_element: need at least one generator");
    if (depth < 1) throw input_error("random_element: depth must be at least 1");
    Rng rng = Rng::substream(seed, "semigroup-expr");
    return random_node(n_generators, depth, rng);
}

double predicted_d_radius(const SemigroupExpr& expr, const std::vector<double>& radii) {
    if (const auto* leaf = std::get_if<SemigroupExpr::Leaf>(&expr.node)) {
        if (leaf->index < 1 || leaf->index > radii.size())
            throw input_error("predicted_d_radius: generator index out of range");
        return radii[leaf->index - 1];
    }
    if (const auto* prod = std::get_if<SemigroupExpr::Product>(&expr.node)) {
        double r = 1.0;
        for (const auto& f : prod->factors) r *= predicted_d_radius(f, radii);
        return r;
    }
    double r = 0.0;
    for (const auto& [w, child] : std::get<SemigroupExpr::Convex>(expr.node).terms)
        r += w * predicted_d_radius(child, radii);
    return r;
}

} // namespace projlab
