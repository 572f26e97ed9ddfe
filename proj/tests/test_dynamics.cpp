#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "projlab/dynamics.hpp"
#include "projlab/errors.hpp"
#include "projlab/linalg.hpp"
#include "projlab/rng.hpp"
#include "projlab/semigroup.hpp"
#include "projlab/spectral.hpp"

#include "common.hpp"

using namespace projlab;

namespace {

ComplexMatrix coordinate(std::size_t dim, std::initializer_list<std::size_t> idx) {
    ComplexMatrix p = ComplexMatrix::zero(dim, dim);
    for (std::size_t i : idx) p(i, i) = 1.0;
    return p;
}

// P_{e1} P_{span(1,1)} in l^inf: powers alternate exactly, T^n = (-1)^(n+1) T.
const ComplexMatrix kAlternating{{0.0, 1.0}, {0.0, -1.0}};

} // namespace

TEST_CASE("matrix_power: binary powering is exact on the audit cases") {
    CHECK(testhelp::entry_dist(matrix_power(kAlternating, 0), ComplexMatrix::identity(2)) ==
          0.0);
    for (std::uint64_t n = 1; n <= 50; ++n) {
        ComplexMatrix want = kAlternating;
        want *= cxd{n % 2 == 0 ? -1.0 : 1.0, 0.0};
        CHECK(testhelp::entry_dist(matrix_power(kAlternating, n), want) == 0.0);
    }

    const ComplexMatrix m{{0.75, 0.25}, {0.25, 0.25}};
    ComplexMatrix slow = ComplexMatrix::identity(2);
    for (int i = 0; i < 13; ++i) slow = compose(slow, m);
    CHECK(testhelp::entry_dist(matrix_power(m, 13), slow) <= 1e-13);

    CHECK_THROWS_AS(matrix_power(ComplexMatrix(2, 3), 2), input_error);
}

TEST_CASE("iterate: a projection is its own limit at n = 1") {
    const ComplexMatrix p = coordinate(3, {0, 1});
    const IterationReport rep = iterate(p, SpaceDescriptor::lp(3, 2.0));
    CHECK(rep.converged);
    CHECK_FALSE(rep.strict_contraction_exit);
    CHECK(rep.n_stop == 1);
    REQUIRE(rep.limit.has_value());
    CHECK(testhelp::entry_dist(*rep.limit, p) <= 1e-12);
    CHECK(rep.limit_residual <= 1e-12);
    CHECK(testhelp::entry_dist(rep.cesaro_limit, p) <= 1e-12);
}

TEST_CASE("iterate: alternating product never converges, Cesaro means do") {
    // T^n - T^(2n) vanishes at even n, so the doubling gap alone would
    // declare convergence; the consecutive diff stays at 2 and must veto it.
    CHECK(spectral_norm(matrix_power(kAlternating, 2) - matrix_power(kAlternating, 4)) ==
          0.0);

    const IterationReport rep =
        iterate(kAlternating, SpaceDescriptor::linf(2), 100, 1e-10, true);
    CHECK_FALSE(rep.converged);
    CHECK_FALSE(rep.limit.has_value());
    CHECK(rep.n_stop == 100);
    REQUIRE(rep.diffs.size() == 100);
    for (std::size_t i = 0; i < rep.diffs.size(); ++i) {
        CHECK(rep.diffs[i] == 2.0);
        CHECK(rep.power_norms[i] == 1.0);
    }
    // At even n the partial sums cancel exactly.
    CHECK(testhelp::entry_dist(rep.cesaro_limit, ComplexMatrix::zero(2, 2)) == 0.0);
    CHECK_FALSE(rep.notes.empty());
}

TEST_CASE("iterate: strict contractions certify a zero limit") {
    // 0.5 P_{e1} + 0.5 P_{span(1,1)} is hermitian with eigenvalues
    // (1 +- sqrt(1/2))/2 (trace 1, det 1/8), both strictly inside the disc.
    const ComplexMatrix m{{0.75, 0.25}, {0.25, 0.25}};
    const double rho = (1.0 + std::sqrt(0.5)) / 2.0;
    CHECK(spectral_norm(m) == doctest::Approx(rho).epsilon(1e-12));

    const SpaceDescriptor l2 = SpaceDescriptor::lp(2, 2.0);
    const IterationReport early = iterate(m, l2);
    CHECK(early.converged);
    CHECK(early.strict_contraction_exit);
    CHECK(early.n_stop == 1);
    REQUIRE(early.limit.has_value());
    CHECK(testhelp::entry_dist(*early.limit, ComplexMatrix::zero(2, 2)) == 0.0);

    const IterationReport full = iterate(m, l2, 2000, 1e-10, false);
    CHECK(full.converged);
    CHECK_FALSE(full.strict_contraction_exit);
    REQUIRE(full.limit.has_value());
    CHECK(testhelp::entry_dist(*full.limit, ComplexMatrix::zero(2, 2)) <= 1e-9);
    CHECK(full.diffs.back() <= 1e-10);
    CHECK(full.power_norms.front() > full.power_norms.back());
}

TEST_CASE("iterate: input validation") {
    const SpaceDescriptor l2 = SpaceDescriptor::lp(2, 2.0);
    CHECK_THROWS_AS(iterate(ComplexMatrix::identity(2), SpaceDescriptor::lp(3, 2.0)),
                    input_error);
    CHECK_THROWS_AS(iterate(ComplexMatrix::identity(2), l2, 0), input_error);
    CHECK_THROWS_AS(iterate(ComplexMatrix::identity(2), SpaceDescriptor::lp(2, 3.0)),
                    input_error);
    ComplexMatrix two = ComplexMatrix::identity(2);
    two *= cxd{2.0, 0.0};
    CHECK_THROWS_AS(iterate(two, l2), input_error);
}

TEST_CASE("ergodic_projection: fixed-space projections by hand") {
    // An orthoprojection is its own ergodic projection.
    Rng rng(404);
    const ComplexMatrix p = testhelp::random_ortho(5, 2, rng);
    CHECK(testhelp::entry_dist(ergodic_projection(p), p) <= 1e-8);

    // Diagonal contraction: only the unit eigenvalue survives.
    ComplexMatrix d = ComplexMatrix::zero(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 0.5;
    d(2, 2) = -0.3;
    CHECK(testhelp::entry_dist(ergodic_projection(d), coordinate(3, {0})) <= 1e-10);

    // Commuting coordinate projections: Ker(I - PQ) = Ran P intersect Ran Q.
    const ComplexMatrix pq = compose(coordinate(3, {0, 1}), coordinate(3, {1, 2}));
    CHECK(testhelp::entry_dist(pq, coordinate(3, {1})) == 0.0);
    CHECK(testhelp::entry_dist(ergodic_projection(pq), coordinate(3, {1})) <= 1e-10);

    // No fixed vectors at all: E = 0.
    ComplexMatrix half = ComplexMatrix::identity(2);
    half *= cxd{0.5, 0.0};
    CHECK(testhelp::entry_dist(ergodic_projection(half), ComplexMatrix::zero(2, 2)) == 0.0);

    // A Jordan block at 1 has no ergodic projection.
    CHECK_THROWS_AS(ergodic_projection(ComplexMatrix{{1.0, 1.0}, {0.0, 1.0}}),
                    numerical_error);
}

TEST_CASE("check_range_formula: fixed space equals the range intersection") {
    const std::vector<ComplexMatrix> gens{coordinate(3, {0, 1}), coordinate(3, {1, 2})};
    const SpaceDescriptor l2 = SpaceDescriptor::lp(3, 2.0);

    const RangeFormulaReport prod = check_range_formula(
        SemigroupExpr::product({SemigroupExpr::leaf(1), SemigroupExpr::leaf(2)}), gens, l2);
    CHECK(prod.check.passed());
    CHECK(prod.fixed_dim == 1);
    CHECK(prod.intersection_dim == 1);
    CHECK(prod.angle <= 1e-8);
    CHECK(prod.hypothesis_notes.empty());

    const RangeFormulaReport leaf =
        check_range_formula(SemigroupExpr::leaf(1), gens, l2);
    CHECK(leaf.check.passed());
    CHECK(leaf.fixed_dim == 2);
    CHECK(leaf.intersection_dim == 2);

    const RangeFormulaReport convex = check_range_formula(
        SemigroupExpr::convex({{0.5, SemigroupExpr::leaf(1)}, {0.5, SemigroupExpr::leaf(2)}}),
        gens, l2);
    CHECK(convex.check.passed());
    CHECK(convex.fixed_dim == 1);
    CHECK(convex.intersection_dim == 1);

    // Random orthoprojections with a planted common vector.
    Rng rng(505);
    std::vector<cxd> v0 = rng.gaussian_vector(5);
    v0 = normalized(v0, SpaceDescriptor::lp(5, 2.0));
    const std::vector<ComplexMatrix> planted{testhelp::random_ortho(5, 3, rng, &v0),
                                             testhelp::random_ortho(5, 2, rng, &v0)};
    const RangeFormulaReport rnd = check_range_formula(
        SemigroupExpr::product(
            {SemigroupExpr::leaf(1), SemigroupExpr::leaf(2), SemigroupExpr::leaf(1)}),
        planted, SpaceDescriptor::lp(5, 2.0));
    CHECK(rnd.check.passed());
    CHECK(rnd.intersection_dim >= 1);
    CHECK(rnd.fixed_dim == rnd.intersection_dim);
    CHECK(rnd.hypothesis_notes.empty());
}

TEST_CASE("check_range_formula: failed hypotheses annotate, never abort") {
    const SpaceDescriptor l2 = SpaceDescriptor::lp(2, 2.0);

    // Oblique projection with norm sqrt(2): not even a contraction, yet the
    // comparison itself still runs (and holds, trivially, against itself).
    const std::vector<ComplexMatrix> oblique{ComplexMatrix{{1.0, -1.0}, {0.0, 0.0}}};
    const RangeFormulaReport ob = check_range_formula(SemigroupExpr::leaf(1), oblique, l2);
    CHECK_FALSE(ob.hypothesis_notes.empty());
    CHECK(ob.check.passed());
    CHECK(ob.fixed_dim == 1);
    CHECK(ob.intersection_dim == 1);

    // A contraction that is not a projection: empty fixed space both ways.
    ComplexMatrix shrunk = ComplexMatrix::identity(2);
    shrunk *= cxd{0.8, 0.0};
    const RangeFormulaReport sh =
        check_range_formula(SemigroupExpr::leaf(1), {shrunk}, l2);
    CHECK_FALSE(sh.hypothesis_notes.empty());
    CHECK(sh.check.passed());
    CHECK(sh.fixed_dim == 0);
    CHECK(sh.intersection_dim == 0);

    CHECK_THROWS_AS(check_range_formula(SemigroupExpr::leaf(1), {}, l2), input_error);
    CHECK_THROWS_AS(check_range_formula(SemigroupExpr::leaf(2), oblique, l2), input_error);
    CHECK_THROWS_AS(
        check_range_formula(SemigroupExpr::leaf(1), oblique, SpaceDescriptor::lp(3, 2.0)),
        input_error);
}

TEST_CASE("check_decay_bound: rotation block pins the tail exactly") {
    // T = diag(e^{0.3 i}, 0.5): a = |1 - e^{0.3 i}| = 2 sin(0.15) and the
    // diff plateau equals a itself once the strict block has died out.
    ComplexMatrix t = ComplexMatrix::zero(2, 2);
    t(0, 0) = std::polar(1.0, 0.3);
    t(1, 1) = 0.5;
    const double a = 2.0 * std::sin(0.15);

    const DecayReport rep = check_decay_bound(t, SpaceDescriptor::lp(2, 2.0), 1000);
    CHECK(rep.check.passed());
    CHECK(rep.check.verdict == "pass");
    CHECK(rep.window_begin == 500);
    CHECK(rep.window_end == 1000);
    REQUIRE(rep.amplitude.has_value());
    CHECK(*rep.amplitude == doctest::Approx(a).epsilon(1e-12));
    CHECK(rep.tail_max == doctest::Approx(a).epsilon(1e-9));
    REQUIRE(rep.bound.has_value());
    CHECK(*rep.bound == doctest::Approx(kt_bound(a)).epsilon(1e-12));
    CHECK(rep.tail_max <= *rep.bound + 1e-6);
}

TEST_CASE("check_decay_bound: degenerate amplitudes") {
    const SpaceDescriptor l2 = SpaceDescriptor::lp(2, 2.0);

    // Identity: amplitude 0, converges instantly, zero tail.
    const DecayReport id = check_decay_bound(ComplexMatrix::identity(2), l2, 100);
    CHECK(id.check.passed());
    REQUIRE(id.amplitude.has_value());
    CHECK(*id.amplitude == 0.0);
    CHECK(id.tail_max == 0.0);
    CHECK(*id.bound == 0.0);

    // Strict contraction: empty boundary spectrum, amplitude unset, bound 0.
    ComplexMatrix half = ComplexMatrix::identity(2);
    half *= cxd{0.5, 0.0};
    const DecayReport sc = check_decay_bound(half, l2, 200);
    CHECK(sc.check.passed());
    CHECK_FALSE(sc.amplitude.has_value());
    REQUIRE(sc.bound.has_value());
    CHECK(*sc.bound == 0.0);
    CHECK(sc.tail_max <= 1e-6);
    CHECK(sc.window_begin >= 1);
    CHECK(sc.window_end >= sc.window_begin);

    // Amplitude 2 admits no bound at all.
    const DecayReport ce = check_decay_bound(kAlternating, SpaceDescriptor::linf(2), 64);
    CHECK(ce.check.verdict == "vacuous");
    REQUIRE(ce.amplitude.has_value());
    CHECK(*ce.amplitude == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(ce.bound.has_value());
    CHECK(ce.tail_max == 2.0);
}

TEST_CASE("check_decay_bound: primitive planted product decays fast") {
    Rng rng(606);
    std::vector<cxd> v0 = rng.gaussian_vector(4);
    v0 = normalized(v0, SpaceDescriptor::lp(4, 2.0));
    const ComplexMatrix t = compose(testhelp::random_ortho(4, 2, rng, &v0),
                                    testhelp::random_ortho(4, 2, rng, &v0));
    // Deterministic seed; confirm the subdominant eigenvalue is well inside
    // the disc so the n = 400 window is deep in the geometric regime.
    double second = 0.0;
    for (const cxd& lam : eigenvalues(t).values)
        if (std::abs(lam) < 1.0 - 1e-8) second = std::max(second, std::abs(lam));
    REQUIRE(second <= 0.9);
    const DecayReport rep = check_decay_bound(t, SpaceDescriptor::lp(4, 2.0), 400);
    CHECK(rep.check.passed());
    REQUIRE(rep.amplitude.has_value());
    CHECK(*rep.amplitude <= 1e-8); // only eigenvalue on the circle is 1
    CHECK(rep.tail_max <= 1e-6);
}
