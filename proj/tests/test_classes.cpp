#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "projlab/classes.hpp"
#include "projlab/errors.hpp"
#include "projlab/linalg.hpp"
#include "projlab/rng.hpp"

#include "common.hpp"

using namespace projlab;

namespace {

ComplexMatrix coordinate(std::size_t dim, std::initializer_list<std::size_t> idx) {
    ComplexMatrix p = ComplexMatrix::zero(dim, dim);
    for (std::size_t i : idx) p(i, i) = 1.0;
    return p;
}

} // namespace

TEST_CASE("halperin_constant: orthoprojections sit at K = 1") {
    Rng rng(101);
    const SamplingConfig cfg{};
    for (std::size_t trial = 0; trial < 4; ++trial) {
        const std::size_t dim = 3 + trial;
        const ComplexMatrix p = testhelp::random_ortho(dim, 1 + trial % (dim - 1), rng);
        const HalperinEstimate est = halperin_constant(p, SpaceDescriptor::lp(dim, 2.0), cfg);
        CHECK(est.value >= 0.99);
        CHECK(est.value <= 1.0 + 1e-9);
        CHECK_FALSE(est.unbounded_evidence);
    }
}

TEST_CASE("halperin_constant conventions and closed ratios") {
    const SamplingConfig cfg{};
    const SpaceDescriptor l2{2, 2.0};

    // T = I: the feasible set is empty, value 0 by convention.
    const HalperinEstimate id = halperin_constant(ComplexMatrix::identity(2), l2, cfg);
    CHECK(id.value == 0.0);
    CHECK(id.maximizer.empty());

    // T = I/2: the ratio is (||x||/2)^2 / (3||x||^2/4) = 1/3 for every x.
    const HalperinEstimate half =
        halperin_constant(0.5 * ComplexMatrix::identity(2), l2, cfg);
    CHECK(half.value == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

    // Non-contraction input violates the precondition.
    CHECK_THROWS_AS(halperin_constant(2.0 * ComplexMatrix::identity(2), l2, cfg),
                    input_error);
}

TEST_CASE("halperin_constant flags unbounded evidence near an isometric flip") {
    // T = diag(-1, 0): x = (1, d) has ratio (4 + d^2) / d^2 -> infinity.
    ComplexMatrix flip(2, 2);
    flip(0, 0) = -1.0;
    const HalperinEstimate est =
        halperin_constant(flip, SpaceDescriptor::lp(2, 2.0), SamplingConfig{});
    CHECK(est.unbounded_evidence);
    CHECK(est.value > 1e6);
}

TEST_CASE("halperin estimate dominates freshly sampled ratios where the ratio is flat") {
    // For an orthoprojection the feasible ratio is identically 1, so any
    // fresh sample must respect the fitted constant.
    Rng rng(103);
    const std::size_t dim = 5;
    const SpaceDescriptor space{dim, 2.0};
    const ComplexMatrix p = testhelp::random_ortho(dim, 3, rng);
    const HalperinEstimate est = halperin_constant(p, space, SamplingConfig{});
    for (int k = 0; k < 64; ++k) {
        const std::vector<cxd> x = rng.gaussian_vector(dim);
        const std::vector<cxd> px = projlab::apply(p, x);
        std::vector<cxd> res(dim);
        for (std::size_t i = 0; i < dim; ++i) res[i] = x[i] - px[i];
        const double nx = vec_norm(x, space), np = vec_norm(px, space);
        const double den = nx * nx - np * np;
        if (den <= 1e-12) continue;
        const double num = vec_norm(res, space);
        CHECK(num * num <= est.value * den + 1e-9);
    }
}

TEST_CASE("d_radius_interval: hermitian projection, identity, minus identity") {
    const SpaceDescriptor l3{3, 2.0};
    const ComplexMatrix p = coordinate(3, {0});

    // ||P - I/2|| = 1/2 exactly (eigenvalues +-1/2).
    ComplexMatrix shifted = p;
    for (std::size_t i = 0; i < 3; ++i) shifted(i, i) -= 0.5;
    CHECK(spectral_norm(shifted) == doctest::Approx(0.5).epsilon(1e-12));

    const DInterval iv = d_radius_interval(p, l3);
    REQUIRE_FALSE(iv.empty);
    CHECK(iv.exact);
    CHECK(iv.lo <= 1e-6);
    CHECK(iv.hi >= 0.5 - 1e-6);
    CHECK(iv.hi <= 0.5 + 1e-9);
    CHECK(d_certified(p, l3, 0.25));
    CHECK(d_certified(p, l3, 0.5));
    CHECK_FALSE(d_certified(p, l3, 0.75));

    // ||T - rI|| = 1 - r exactly at certified r for norm-one T.
    const double mid = 0.5 * (iv.lo + iv.hi);
    ComplexMatrix at_mid = p;
    for (std::size_t i = 0; i < 3; ++i) at_mid(i, i) -= mid;
    CHECK(spectral_norm(at_mid) == doctest::Approx(1.0 - mid).epsilon(1e-9));

    const DInterval full = d_radius_interval(ComplexMatrix::identity(3), l3);
    REQUIRE_FALSE(full.empty);
    CHECK(full.lo <= 1e-6);
    CHECK(full.hi >= 1.0 - 1e-6);

    CHECK(d_radius_interval(cxd{-1.0, 0.0} * ComplexMatrix::identity(3), l3).empty);
}

TEST_CASE("certified radii keep the spectrum in the disc around r") {
    Rng rng(107);
    const std::size_t dim = 4;
    const SpaceDescriptor space{dim, 2.0};
    const ComplexMatrix a = testhelp::random_ortho(dim, 2, rng);
    const ComplexMatrix b = testhelp::random_ortho(dim, 3, rng);
    ComplexMatrix mix = 0.5 * a;
    mix += 0.5 * b;

    const DInterval iv = d_radius_interval(mix, space);
    REQUIRE_FALSE(iv.empty);
    for (double r : {iv.lo, 0.5 * (iv.lo + iv.hi), iv.hi}) {
        const EigenSystem e = eigenvalues(mix);
        for (const cxd& lambda : e.values) CHECK(std::abs(lambda - r) <= 1.0 - r + 1e-8);
    }
}

TEST_CASE("wprime_defect: orthoprojection, flip, strict contraction") {
    Rng rng(109);
    const SamplingConfig cfg{};
    const ComplexMatrix p = testhelp::random_ortho(5, 2, rng);
    CHECK(wprime_defect(p, SpaceDescriptor::lp(5, 2.0), cfg) <= 1e-6);

    ComplexMatrix flip(2, 2);
    flip(0, 0) = -1.0;
    CHECK(wprime_defect(flip, SpaceDescriptor::lp(2, 2.0), cfg) ==
          doctest::Approx(2.0).epsilon(1e-9));

    const ComplexMatrix strict = 0.9 * ComplexMatrix::identity(2);
    CHECK(wprime_defect(strict, SpaceDescriptor::lp(2, 2.0), cfg) == 0.0);
}

TEST_CASE("closure_report on random orthoprojection pairs") {
    Rng rng(113);
    const std::size_t dim = 4;
    const SpaceDescriptor space{dim, 2.0};
    const ComplexMatrix a = testhelp::random_ortho(dim, 2, rng);
    const ComplexMatrix b = testhelp::random_ortho(dim, 2, rng);

    const ClosureReport rep = closure_report(a, b, 0.5, space, SamplingConfig{});
    CHECK(rep.k_product.passed());
    CHECK(rep.d_product.passed());
    CHECK(rep.d_convex.passed());
    REQUIRE(rep.r.has_value());
    REQUIRE(rep.s.has_value());
    CHECK(*rep.r > 0.0);
    CHECK(*rep.s > 0.0);
}

TEST_CASE("closure_report trivial and exact-commuting cases") {
    const SpaceDescriptor l4{4, 2.0};
    const ComplexMatrix id = ComplexMatrix::identity(4);
    const ClosureReport triv = closure_report(id, id, 0.5, l4, SamplingConfig{});
    CHECK(triv.k_product.passed());
    CHECK(triv.d_product.passed());
    CHECK(triv.d_convex.passed());

    // Commuting coordinate projections: r = s = 1/2 certified, and
    // rs = 1/4 lies in R(AB) exactly (AB is again a coordinate projection,
    // ||AB - I/4|| = 3/4 = 1 - 1/4).
    const ComplexMatrix p = coordinate(4, {0, 1});
    const ComplexMatrix q = coordinate(4, {1, 2});
    CHECK(d_certified(compose(p, q), l4, 0.25));
    const ClosureReport rep = closure_report(p, q, 0.5, l4, SamplingConfig{});
    CHECK(rep.d_product.passed());
    CHECK(rep.d_convex.passed());
    CHECK(*rep.r == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(*rep.s == doctest::Approx(0.5).epsilon(1e-6));
}
