#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "projlab/apostol.hpp"
#include "projlab/errors.hpp"
#include "projlab/linalg.hpp"
#include "projlab/rng.hpp"

#include "common.hpp"

using namespace projlab;

namespace {

// Brute-force phi for a real diagonal contraction in a real 2-dim slice:
// x = s (cos t, sin t), feasibility ||x|| - ||Tx|| <= eps, objective
// ||x - Tx||. For the operators below the supremum is attained on this
// slice, which makes it an independent oracle.
double phi_brute_force(double d0, double d1, double eps) {
    double best = 0.0;
    const int nt = 2000, ns = 40;
    for (int i = 0; i <= nt; ++i) {
        const double t = 3.14159265358979 * i / nt;
        for (int j = 1; j <= ns; ++j) {
            const double s = double(j) / ns;
            const double x0 = s * std::cos(t), x1 = s * std::sin(t);
            const double nx = std::hypot(x0, x1);
            const double ntx = std::hypot(d0 * x0, d1 * x1);
            if (nx - ntx > eps + 1e-12) continue;
            best = std::max(best, std::hypot((1.0 - d0) * x0, (1.0 - d1) * x1));
        }
    }
    return best;
}

ComplexMatrix coordinate(std::size_t dim, std::initializer_list<std::size_t> idx) {
    ComplexMatrix p = ComplexMatrix::zero(dim, dim);
    for (std::size_t i : idx) p(i, i) = 1.0;
    return p;
}

} // namespace

TEST_CASE("apostol_phi: rank-one orthoprojection matches sqrt(2 eps - eps^2)") {
    const SpaceDescriptor l2{2, 2.0};
    const ComplexMatrix p = coordinate(2, {0});
    for (double eps : {0.05, 0.1, 0.2}) {
        // On the unit sphere the constraint pins |x_1| >= 1 - eps, leaving
        // |x_2| <= sqrt(2 eps - eps^2); the brute-force slice agrees.
        const double closed = std::sqrt(2.0 * eps - eps * eps);
        const double brute = phi_brute_force(1.0, 0.0, eps);
        CHECK(brute == doctest::Approx(closed).epsilon(1e-3));

        const ModulusEstimate est = apostol_phi(p, l2, eps, PhiVariant::phi, SamplingConfig{});
        CHECK(est.value <= closed + 1e-9);
        CHECK(est.value >= closed - 1e-3);
        CHECK(est.value >= brute - 1e-3);
    }
}

TEST_CASE("apostol_phi: identity and precondition failures") {
    const SpaceDescriptor l2{2, 2.0};
    const ComplexMatrix id = ComplexMatrix::identity(2);
    CHECK(apostol_phi(id, l2, 0.3, PhiVariant::phi, SamplingConfig{}).value == 0.0);

    // phi-tilde demands a norm-one contraction.
    CHECK_THROWS_AS(apostol_phi(0.5 * id, l2, 0.3, PhiVariant::phi_tilde, SamplingConfig{}),
                    input_error);
    // Non-contractions are rejected for either variant.
    CHECK_THROWS_AS(apostol_phi(2.0 * id, l2, 0.3, PhiVariant::phi, SamplingConfig{}),
                    input_error);
    CHECK_THROWS_AS(apostol_phi(id, l2, 0.0, PhiVariant::phi, SamplingConfig{}), input_error);
}

TEST_CASE("apostol_phi: the L-projection identity phi(eps) = eps in l^1") {
    const SpaceDescriptor l1{4, 1.0};
    const ComplexMatrix p = coordinate(4, {0, 1});

    // Oracle vector: x = (1-eps) e_1 + eps e_3 is feasible with
    // ||x - Px||_1 = eps; the norm split makes eps an upper bound too.
    for (double eps : {0.3, 0.7}) {
        std::vector<cxd> x(4, cxd{0.0, 0.0});
        x[0] = 1.0 - eps;
        x[2] = eps;
        const std::vector<cxd> px = projlab::apply(p, x);
        std::vector<cxd> res(4);
        for (std::size_t i = 0; i < 4; ++i) res[i] = x[i] - px[i];
        CHECK(vec_norm(x, l1) - vec_norm(px, l1) == doctest::Approx(eps).epsilon(1e-12));
        CHECK(vec_norm(res, l1) == doctest::Approx(eps).epsilon(1e-12));

        const ModulusEstimate est = apostol_phi(p, l1, eps, PhiVariant::phi, SamplingConfig{});
        CHECK(est.value >= eps - 1e-3);
        CHECK(est.value <= eps + 1e-9);
    }
}

TEST_CASE("apostol_phi maximizers are feasible certificates") {
    Rng rng(211);
    const std::size_t dim = 4;
    const SpaceDescriptor space{dim, 2.0};
    const ComplexMatrix t =
        compose(testhelp::random_ortho(dim, 3, rng), testhelp::random_ortho(dim, 2, rng));

    for (PhiVariant variant : {PhiVariant::phi, PhiVariant::phi_tilde}) {
        const ModulusEstimate est = apostol_phi(t, space, 0.2, variant, SamplingConfig{});
        CHECK(est.value <= 2.0 + 1e-12);
        REQUIRE_FALSE(est.maximizer.empty());
        const double nx = vec_norm(est.maximizer, space);
        const double ntx = vec_norm(projlab::apply(t, est.maximizer), space);
        if (variant == PhiVariant::phi) {
            CHECK(nx <= 1.0 + 1e-10);
            CHECK(nx - ntx <= 0.2 + 1e-10);
        } else {
            CHECK(nx == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(1.0 - ntx <= 0.2 + 1e-10);
        }
        // The reported value is the objective at the maximizer.
        std::vector<cxd> diff(est.maximizer);
        const std::vector<cxd> tx = projlab::apply(t, est.maximizer);
        for (std::size_t i = 0; i < dim; ++i) diff[i] -= tx[i];
        CHECK(vec_norm(diff, space) == doctest::Approx(est.value).epsilon(1e-10));
    }
}

TEST_CASE("phi estimates are monotone in eps within estimator noise") {
    Rng rng(223);
    const std::size_t dim = 4;
    const SpaceDescriptor space{dim, 2.0};
    std::vector<cxd> v0 = normalized(rng.gaussian_vector(dim), space);
    const ComplexMatrix t = compose(testhelp::random_ortho(dim, 3, rng, &v0),
                                    testhelp::random_ortho(dim, 2, rng, &v0));
    double prev = -1.0;
    for (double eps : {0.05, 0.1, 0.2, 0.4}) {
        const double v = apostol_phi(t, space, eps, PhiVariant::phi, SamplingConfig{}).value;
        CHECK(v >= prev - 1e-3);
        prev = v;
    }
}

TEST_CASE("omega: identity, isometry, and a strict contraction") {
    const SpaceDescriptor l2{2, 2.0};
    const OmegaEstimate id = omega(ComplexMatrix::identity(2), l2, SamplingConfig{});
    CHECK(id.extrapolated == doctest::Approx(0.0).epsilon(1e-10));

    // diag(i, 1) is an isometry: the eigenvector e_1 is feasible at every
    // eps and gives ||x - Tx|| = |1 - i| = sqrt(2) = ||I - T||.
    ComplexMatrix iso(2, 2);
    iso(0, 0) = cxd{0.0, 1.0};
    iso(1, 1) = 1.0;
    const OmegaEstimate w = omega(iso, l2, SamplingConfig{});
    CHECK(w.extrapolated == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    REQUIRE_FALSE(w.values.empty());
    for (std::size_t i = 1; i < w.values.size(); ++i)
        CHECK(w.values[i - 1].epsilon <= w.values[i].epsilon);

    const OmegaEstimate strict = omega(0.5 * ComplexMatrix::identity(2), l2, SamplingConfig{});
    CHECK(strict.norm_below_one);
    CHECK(strict.extrapolated == 0.0);
}

TEST_CASE("modulus chain links hold and hit the known counterexample values") {
    // T = [[0,1],[0,-1]] in the max norm: omega = phi-tilde = phi = 2 and
    // ||I - T|| = 2 (row sums of [[1,-1],[0,2]]).
    const ComplexMatrix t = {{0.0, 1.0}, {0.0, -1.0}};
    const ChainReport rep =
        check_modulus_chain(t, SpaceDescriptor::linf(2), 0.1, SamplingConfig{});
    CHECK(rep.passed());
    CHECK(rep.omega_value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep.phi_tilde_value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep.phi_value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep.norm_value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.norm_exact);
    REQUIRE(rep.links.size() == 5);
}

TEST_CASE("modulus chain on a random orthoprojection product") {
    Rng rng(227);
    const std::size_t dim = 4;
    const SpaceDescriptor space{dim, 2.0};
    std::vector<cxd> v0 = normalized(rng.gaussian_vector(dim), space);
    const ComplexMatrix t = compose(testhelp::random_ortho(dim, 2, rng, &v0),
                                    testhelp::random_ortho(dim, 3, rng, &v0));
    const ChainReport rep = check_modulus_chain(t, space, 0.25, SamplingConfig{});
    CHECK(rep.passed());
    CHECK(rep.omega_value <= rep.phi_tilde_value + 1e-12);
    CHECK(rep.phi_tilde_value <= rep.phi_value + 1e-12);
    CHECK(rep.phi_value <= rep.norm_value + 1e-12);
    CHECK(rep.norm_value <= 2.0 + 1e-12);

    // T = I collapses the whole chain to zero.
    const ChainReport triv =
        check_modulus_chain(ComplexMatrix::identity(2), SpaceDescriptor::lp(2, 2.0), 0.1,
                            SamplingConfig{});
    CHECK(triv.passed());
    CHECK(triv.omega_value == 0.0);
    CHECK(triv.norm_value == 0.0);
}

TEST_CASE("composition bounds for products and convex combinations") {
    Rng rng(229);
    const std::size_t dim = 4;
    const SpaceDescriptor space{dim, 2.0};
    std::vector<cxd> v0 = normalized(rng.gaussian_vector(dim), space);
    const ComplexMatrix a = testhelp::random_ortho(dim, 3, rng, &v0);
    const ComplexMatrix b = testhelp::random_ortho(dim, 2, rng, &v0);

    const CompositionReport rep =
        check_composition_bounds(a, b, {0.5, 0.5}, space, 0.05, SamplingConfig{});
    CHECK(rep.product.passed());
    CHECK(rep.convex.passed());
    CHECK(rep.product.verdict == "pass"); // ||AB|| = 1 via the planted vector
    CHECK(rep.convex.verdict == "pass");

    const ComplexMatrix id = ComplexMatrix::identity(dim);
    const CompositionReport triv =
        check_composition_bounds(id, id, {0.5, 0.5}, space, 0.1, SamplingConfig{});
    CHECK(triv.product.passed());
    CHECK(triv.convex.passed());

    // Norm-one factors with disjoint ranges: AB = 0 and the mixture has norm
    // 1/2, so both bounds are vacuous rather than errors.
    const CompositionReport vac =
        check_composition_bounds(coordinate(dim, {0}), coordinate(dim, {1}), {0.5, 0.5},
                                 space, 0.1, SamplingConfig{});
    CHECK(vac.product.verdict == "vacuous");
    CHECK(vac.convex.verdict == "vacuous");

    // Strict-contraction factors are a contract violation, not a vacuous row.
    CHECK_THROWS_AS(check_composition_bounds(0.5 * id, 0.5 * id, {0.5, 0.5}, space, 0.1,
                                             SamplingConfig{}),
                    input_error);
}

TEST_CASE("convex composition bound with three coordinate projections") {
    const SpaceDescriptor l2{3, 2.0};
    const std::vector<ComplexMatrix> ops = {coordinate(3, {0, 1}), coordinate(3, {1, 2}),
                                            coordinate(3, {0, 1, 2})};
    const CheckResult row = convex_composition_bound(ops, {0.2, 0.3, 0.5}, l2, 0.1,
                                                     SamplingConfig{});
    CHECK(row.passed());
}

TEST_CASE("beta bound for orthoprojections, identity, and zero") {
    const SpaceDescriptor l2{3, 2.0};
    Rng rng(233);
    const ComplexMatrix p = testhelp::random_ortho(3, 2, rng);
    const CheckResult row = check_beta_bound(p, l2, 0.1, SamplingConfig{});
    CHECK(row.verdict == "pass");
    // In l^2 the right side is the closed form 2 sqrt(2 eps - eps^2).
    CHECK(row.rhs == doctest::Approx(2.0 * std::sqrt(0.19)).epsilon(1e-12));

    CHECK(check_beta_bound(ComplexMatrix::identity(3), l2, 0.1, SamplingConfig{}).passed());

    const CheckResult zero = check_beta_bound(ComplexMatrix::zero(3, 3), l2, 0.1,
                                              SamplingConfig{});
    CHECK(zero.verdict == "vacuous");
}
