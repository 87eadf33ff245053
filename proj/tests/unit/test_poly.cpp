#include "support.hpp"

#include "crnforge/errors.hpp"
#include "crnforge/poly.hpp"

#include <doctest.h>

#include <cmath>

using namespace crnforge;

TEST_SUITE("poly") {

TEST_CASE("graded lex order") {
    GradedLex lt;
    CHECK(lt({0, 0}, {1, 0}));
    CHECK(lt({1, 0}, {0, 1}));
    CHECK(lt({2, 0}, {1, 1}));
    CHECK(lt({1, 1}, {0, 2}));
    CHECK_FALSE(lt({0, 2}, {2, 0}));
    CHECK(lt({0, 2}, {3, 0}));
}

TEST_CASE("terms merge and sort") {
    Polynomial p({"x", "y"}, {{1.0, {0, 2}}, {2.0, {1, 0}}, {-1.0, {0, 2}}, {3.0, {0, 0}}, {0.0, {5, 0}}});
    REQUIRE(p.terms().size() == 2);
    CHECK(p.terms()[0].exponents == Exponents{0, 0});
    CHECK(p.coefficient({1, 0}) == 2.0);
    CHECK(p.coefficient({0, 2}) == 0.0);
    CHECK(p.degree() == 1);
    CHECK(Polynomial({"x"}).degree() == 0);
}

TEST_CASE("arithmetic against hand expansion") {
    auto v = make_variables({"x", "y"});
    const auto x = Polynomial::variable(v, 0), y = Polynomial::variable(v, 1);
    const auto one = Polynomial::constant(v, 1.0);
    // (x + y + 1)^2
    const Polynomial sq = (x + y + one).pow(2);
    const Polynomial expect(v, {{1, {2, 0}}, {2, {1, 1}}, {1, {0, 2}}, {2, {1, 0}}, {2, {0, 1}}, {1, {0, 0}}});
    CHECK(sq == expect);
    CHECK((sq - expect).is_zero());
    CHECK(sq.evaluate({0.5, -2.0}) == doctest::Approx(0.25));
    CHECK((2.0 * x * y).coefficient({1, 1}) == 2.0);
}

TEST_CASE("mixing variable lists throws") {
    Polynomial a({"x"}, {{1.0, {1}}});
    Polynomial b({"y"}, {{1.0, {1}}});
    CHECK_THROWS_AS(a + b, DimensionMismatch);
}

TEST_CASE("derivative, restrict, compose") {
    auto v = make_variables({"x", "y"});
    Polynomial p(v, {{3, {2, 1}}, {-1, {0, 3}}, {5, {0, 0}}});
    CHECK(p.derivative(0) == Polynomial(v, {{6, {1, 1}}}));
    CHECK(p.derivative(1) == Polynomial(v, {{3, {2, 0}}, {-3, {0, 2}}}));
    CHECK(p.restrict(0, 2.0) == Polynomial(v, {{12, {0, 1}}, {-1, {0, 3}}, {5, {0, 0}}}));
    // x -> y, y -> x
    const Polynomial swapped = p.compose({Polynomial::variable(v, 1), Polynomial::variable(v, 0)});
    CHECK(swapped == Polynomial(v, {{3, {1, 2}}, {-1, {3, 0}}, {5, {0, 0}}}));
    CHECK(p.degree_in(1) == 3);
}

TEST_CASE("property: evaluation is a ring homomorphism") {
    testing::Rng rng(11);
    auto v = make_variables({"x", "y", "z"});
    for (int i = 0; i < 200; ++i) {
        const auto p = testing::random_poly(rng, v, 3, 5), q = testing::random_poly(rng, v, 3, 5);
        const double pt[3] = {testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1)};
        CHECK((p * q).evaluate(pt) == doctest::Approx(p.evaluate(pt) * q.evaluate(pt)).epsilon(1e-10));
        CHECK((p + q).evaluate(pt) == doctest::Approx(p.evaluate(pt) + q.evaluate(pt)).epsilon(1e-10));
    }
}

TEST_CASE("property: derivative matches finite differences") {
    testing::Rng rng(12);
    auto v = make_variables({"x", "y"});
    for (int i = 0; i < 100; ++i) {
        const auto p = testing::random_poly(rng, v, 4, 6);
        const double x = testing::uniform(rng, -1, 1), y = testing::uniform(rng, -1, 1), h = 1e-6;
        const double fd = (p.evaluate({x + h, y}) - p.evaluate({x - h, y})) / (2 * h);
        CHECK(p.derivative(0).evaluate({x, y}) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("system jacobian") {
    const auto s = PolySystem::from_terms({"x", "y"}, {{{1, {1, 1}}}, {{2, {2, 0}}, {-1, {0, 1}}}});
    const double pt[2] = {2.0, 3.0};
    const auto j = jacobian_at(s, pt);
    CHECK(j(0, 0) == 3.0);
    CHECK(j(0, 1) == 2.0);
    CHECK(j(1, 0) == 8.0);
    CHECK(j(1, 1) == -1.0);
    CHECK(s.degree() == 2);
    CHECK(s.term_count() == 3);
}

TEST_CASE("affine substitution against hand expansion") {
    const auto s = PolySystem::from_terms({"x"}, {{{1.0, {2}}}});
    Eigen::MatrixXd a(1, 1);
    a << 2.0;
    Eigen::VectorXd t(1);
    t << 1.0;
    // x̄ = x + 1: dx̄/dt = (x̄ - 1)^2
    const auto tr = substitute_affine(s, AffineMap::translation_only(t));
    CHECK(tr.equation(0) == Polynomial(tr.variable_list(), {{1, {2}}, {-2, {1}}, {1, {0}}}));
    // x̄ = 2 (x + 1): x = x̄/2 - 1, dx̄/dt = 2 (x̄/2 - 1)^2
    const auto pf = substitute_affine(s, AffineMap{a, t}, SubstitutionMode::perturbation_frame);
    CHECK(pf.equation(0).max_coeff_diff(Polynomial(pf.variable_list(), {{0.5, {2}}, {-2, {1}}, {2, {0}}})) < 1e-15);
}

TEST_CASE("property: affine substitution inverts") {
    testing::Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        const auto s = testing::random_poly_system(rng, 2, 3, 5);
        Eigen::MatrixXd a(2, 2);
        a << testing::uniform(rng, 0.5, 2), testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1),
            testing::uniform(rng, 0.5, 2);
        if (std::abs(a.determinant()) < 0.2) continue;
        Eigen::VectorXd t(2);
        t << testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2);
        const AffineMap m{a, t};
        const auto there = substitute_affine(s, m);
        const auto back = substitute_affine(there, m.inverse());
        CHECK(back.max_coeff_diff(s) < 1e-9);
        // Flow conjugacy: the new field at x̄ equals A P(x).
        const double x[2] = {testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1)};
        const Eigen::Vector2d xbar = a * Eigen::Vector2d(x[0], x[1]) + t;
        const auto px = s.evaluate(x);
        const Eigen::Vector2d want = a * Eigen::Vector2d(px[0], px[1]);
        const double xb[2] = {xbar[0], xbar[1]};
        const auto got = there.evaluate(xb);
        CHECK(got[0] == doctest::Approx(want[0]).epsilon(1e-9).scale(1.0));
        CHECK(got[1] == doctest::Approx(want[1]).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("singular affine map is rejected") {
    const auto s = PolySystem::from_terms({"x", "y"}, {{{1, {1, 0}}}, {{1, {0, 1}}}});
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(substitute_affine(s, AffineMap::linear(a)), SingularMatrix);
}

}
