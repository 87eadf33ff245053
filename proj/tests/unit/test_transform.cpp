#include "support.hpp"

#include "crnforge/classify.hpp"
#include "crnforge/dynamics.hpp"
#include "crnforge/errors.hpp"
#include "crnforge/homoclinic.hpp"
#include "crnforge/transform.hpp"

#include <doctest.h>

#include <cmath>

using namespace crnforge;

namespace {

// P1 = x1 - 2 x2, P2 = 1 - x2
PolySystem small() {
    return PolySystem::from_terms({"x1", "x2"}, {{{1, {1, 0}}, {-2, {0, 1}}}, {{1, {0, 0}}, {-1, {0, 1}}}});
}

}  // namespace

TEST_SUITE("transform") {

TEST_CASE("x-factorization multiplies selected equations") {
    const auto s = small();
    const auto x = x_factorize(s, {1});
    CHECK(x.equation(0) == s.equation(0));
    CHECK(x.equation(1) == Polynomial(s.variable_list(), {{1, {0, 1}}, {-1, {0, 2}}}));
    const auto full = x_factorize(s, all_indices(2));
    CHECK(full.degree() == s.degree() + 1);
    CHECK(is_kinetic(full));
    CHECK(check_x_factorable(full).fully);
    CHECK_THROWS_AS(x_factorize(s, {2}), DimensionMismatch);
    CHECK_THROWS(x_factorize(s, {}));
}

TEST_CASE("qssa embedding against hand expansion") {
    QssaSpec q;
    q.targets = {{0, {0, 1}}};
    q.omega = {0.5};
    q.mu = 0.1;
    const auto t = qssa_embed(small(), q);
    REQUIRE(t.dimension() == 3);
    CHECK(t.variables()[2] == "y1");
    const auto& v = t.variable_list();
    CHECK(t.equation(0) == Polynomial(v, {{1, {1, 0, 0}}, {-4, {1, 1, 1}}}));
    CHECK(t.equation(1) == Polynomial(v, {{1, {0, 0, 0}}, {-1, {0, 1, 0}}}));
    CHECK(t.equation(2).max_coeff_diff(Polynomial(v, {{5, {0, 0, 0}}, {-10, {1, 0, 1}}})) < 1e-15);
    CHECK(is_kinetic(t));

    // On the slow manifold the x-components reproduce the original field.
    const double x[2] = {0.7, 0.3};
    const auto y = qssa_slow_manifold(small(), q, x);
    REQUIRE(y.size() == 1);
    CHECK(y[0] == doctest::Approx(0.5 / 0.7));
    const double full[3] = {x[0], x[1], y[0]};
    const auto f = t.evaluate(full);
    const auto g = small().evaluate(x);
    CHECK(f[0] == doctest::Approx(g[0]));
    CHECK(f[2] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("qssa rejects bad selections") {
    QssaSpec q;
    q.targets = {{0, {1, 0}}};
    q.omega = {1.0};
    CHECK_THROWS_AS(qssa_embed(small(), q), TermNotCrossNegative);
    q.targets = {{0, {0, 1}}};
    q.p = {Polynomial(small().variable_list(), {{1, {1, 0}}, {-1, {0, 0}}})};
    CHECK_THROWS_AS(qssa_embed(small(), q), PNotPositive);
    q.p.clear();
    q.omega = {};
    CHECK_THROWS(qssa_embed(small(), q));
    q.omega = {1.0};
    q.mu = 0.0;
    CHECK_THROWS(qssa_embed(small(), q));
}

TEST_CASE("transformation specs run in application order") {
    Eigen::VectorXd t(2);
    t << 1.0, 2.0;
    const TransformStep shift = AffineStep{AffineMap::translation_only(t)};
    const TransformStep xf = XFactorStep{{0, 1}};
    const auto spec = TransformSpec::from_composition({xf, shift});
    REQUIRE(spec.steps.size() == 2);
    CHECK(step_kind(spec.steps[0]) == "affine");
    const auto r = apply(spec, small());
    CHECK(r.system == x_factorize(substitute_affine(small(), AffineMap::translation_only(t)), {0, 1}));
    REQUIRE(r.ledger.size() == 2);
    CHECK(r.ledger[1].degree_before == 1);
    CHECK(r.ledger[1].degree_after == 2);
    CHECK(r.ledger[0].dimension_after == 2);
}

TEST_CASE("constraint sets") {
    ConstraintSet c("demo");
    c.add("a>0", [](const ParamBundle& p) { return p.at("a"); });
    c.add("b>=1", [](const ParamBundle& p) { return p.at("b") - 1; }, false);
    CHECK(c.satisfied({{"a", 1}, {"b", 1}}));
    CHECK_FALSE(c.satisfied({{"a", 0}, {"b", 1}}));
    try {
        c.require({{"a", -1}, {"b", 0}});
        FAIL("expected ConstraintViolation");
    } catch (const ConstraintViolation& e) {
        CHECK(e.failed() == std::vector<std::string>{"a>0", "b>=1"});
    }
}

TEST_CASE("property: x-factorized Jacobian at interior fixed points is diag(x) J") {
    testing::Rng rng(51);
    int checked = 0;
    for (int i = 0; i < 300 && checked < 60; ++i) {
        // P = J (x - x*) plus a quadratic that vanishes at x*
        const double c1 = testing::uniform(rng, 0.2, 2), c2 = testing::uniform(rng, 0.2, 2);
        Eigen::Matrix2d j;
        j << testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2),
            testing::uniform(rng, -2, 2);
        if (std::abs(j.determinant()) < 0.1) continue;
        const double q = testing::uniform(rng, -1, 1);
        const auto s = PolySystem::from_terms(
            {"x1", "x2"},
            {{{j(0, 0), {1, 0}}, {j(0, 1), {0, 1}}, {-j(0, 0) * c1 - j(0, 1) * c2, {0, 0}}},
             {{j(1, 0), {1, 0}}, {j(1, 1), {0, 1}}, {-j(1, 0) * c1 - j(1, 1) * c2 - q * c1 * c1, {0, 0}}, {q, {2, 0}}}});
        const double pt[2] = {c1, c2};
        const auto before = analyze_fixed_point(s, pt);
        const auto after = analyze_fixed_point(x_factorize(s, {0, 1}), pt);
        CHECK(before.residual < 1e-12);
        const Eigen::MatrixXd want = Eigen::Vector2d(c1, c2).asDiagonal() * before.jacobian;
        CHECK((after.jacobian - want).norm() < 1e-12);
        // saddles stay saddles
        if (before.type == FixedPointType::saddle) CHECK(after.type == FixedPointType::saddle);
        // J11 J22 >= 0 and J12 J21 >= 0 preserve stability and type
        const auto& b = before.jacobian;
        if (b(0, 0) * b(1, 1) >= 0 && b(0, 1) * b(1, 0) >= 0 && before.type != FixedPointType::degenerate &&
            after.type != FixedPointType::degenerate)
            CHECK(is_stable(after.type) == is_stable(before.type));
        ++checked;
    }
    CHECK(checked >= 30);
}

TEST_CASE("x-factorization audit on a spiral") {
    // P1 = 2 - x1 - x2, P2 = x1 - x2; fixed point (1, 1) is a stable spiral.
    const auto s = PolySystem::from_terms({"x1", "x2"}, {{{2, {0, 0}}, {-1, {1, 0}}, {-1, {0, 1}}},
                                                       {{1, {1, 0}}, {-1, {0, 1}}}});
    const auto a = xfact_fixed_point_audit(s, {{1.0, 1.0}});
    REQUIRE(a.interior.size() == 1);
    const auto& in = a.interior[0];
    CHECK(in.sign_pattern == std::array<int, 4>{-1, -1, 1, -1});
    CHECK(in.type_before == FixedPointType::stable_spiral);
    CHECK(in.type_after == FixedPointType::stable_spiral);
    CHECK(in.stability_condition);
    CHECK_FALSE(in.type_condition);
    CHECK(in.stability_preserved);
    // origin: λ = (P1(0), P2(0)) = (2, 0) degenerate; axis: x1 = 2 on x2 = 0, x2 = 0 on x1 = 0 (origin again)
    bool axis = false;
    for (const auto& b : a.boundary) {
        if (b.origin) {
            CHECK(b.origin_eigenvalues[0] == 2.0);
            CHECK(b.origin_eigenvalues[1] == 0.0);
        } else if (b.point[1] == 0.0 && std::abs(b.point[0] - 2.0) < 1e-12) {
            axis = true;
            CHECK(b.in_nonnegative_orthant);
            CHECK(b.criterion_agrees);
        }
    }
    CHECK(axis);
}

TEST_CASE("affine search") {
    SUBCASE("a kinetic system is its own witness") {
        const auto r = affine_kinetic_search(casestudy::base_system(-0.8), ConstraintSet{});
        CHECK(r.found);
        REQUIRE(r.witness);
        const auto mapped = substitute_affine(casestudy::base_system(-0.8), *r.witness);
        CHECK(is_kinetic(mapped, 1e-12));
    }
    SUBCASE("the perturbed loop system has no admissible kinetic frame on the grid") {
        AffineSearchOptions o;
        o.angle_steps = 90;
        o.grid = 20;
        const auto r = affine_kinetic_search(casestudy::perturbed_system(-0.8, 0.0), casestudy::translated_constraints(), o);
        CHECK_FALSE(r.found);
        CHECK(r.heuristic);
        CHECK(r.evaluations > 0);
    }
    SUBCASE("budget") {
        AffineSearchOptions o;
        o.budget = 100;
        const auto r = affine_kinetic_search(casestudy::perturbed_system(-0.8, 0.0), casestudy::translated_constraints(), o);
        CHECK(r.budget_exhausted);
        CHECK(r.evaluations <= 100);
    }
}

}
