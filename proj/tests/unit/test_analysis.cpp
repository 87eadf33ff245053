#include "support.hpp"

#include "crnforge/dynamics.hpp"
#include "crnforge/errors.hpp"
#include "crnforge/homoclinic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace crnforge;
namespace cs = crnforge::casestudy;

TEST_SUITE("analysis") {

TEST_CASE("fixed point finder on the loop system") {
    const auto sys = cs::perturbed_system(-0.8, 0.0);
    const auto r = find_fixed_points(sys, SearchBox::square(2, -1.0, 1.0));
    REQUIRE(r.points.size() == 3);
    CHECK_FALSE(r.degenerate_system);
    for (const auto& c : cs::fixed_points_closed_form(-0.8)) {
        const bool hit = std::any_of(r.points.begin(), r.points.end(), [&](const FixedPointReport& f) {
            return std::hypot(f.location[0] - c.point[0], f.location[1] - c.point[1]) < 1e-10 && f.type == c.type;
        });
        CHECK(hit);
    }
    // trace/det/disc bookkeeping at the saddle
    const double o[2] = {0.0, 0.0};
    const auto s = analyze_fixed_point(sys, o);
    CHECK(s.trace == doctest::Approx(-1.6));
    CHECK(s.det == doctest::Approx(0.64 - 1.0));
    CHECK(s.disc == doctest::Approx(s.trace * s.trace - 4 * s.det));
    CHECK(s.boundary);
}

TEST_CASE("non-isolated fixed points are flagged") {
    const auto line = PolySystem::from_terms({"x", "y"}, {{{1, {1, 0}}, {-1, {0, 1}}}, {{1, {1, 0}}, {-1, {0, 1}}}});
    CHECK(find_fixed_points(line, SearchBox::square(2, -1, 1)).degenerate_system);
}

TEST_CASE("property: every reported fixed point is a zero inside the box") {
    testing::Rng rng(81);
    for (int i = 0; i < 60; ++i) {
        const auto s = testing::random_poly_system(rng, 2, 2, 4);
        const auto r = find_fixed_points(s, SearchBox::square(2, -2, 2));
        for (const auto& f : r.points) {
            CHECK(f.residual < 1e-9);
            CHECK(std::abs(f.location[0]) <= 2.0);
            CHECK(std::abs(f.location[1]) <= 2.0);
        }
    }
}

TEST_CASE("Melnikov integral") {
    const auto m = melnikov_at_zero(-0.8);
    // regression value, two independent routes
    CHECK(m.value == doctest::Approx(-0.954959776139).epsilon(1e-9));
    CHECK(m.relative_disagreement < 1e-8);
    CHECK(m.min_phi > 0);
    CHECK(m.max_h_drift < 1e-9);

    // a = 0: phi = 1 and M(0) = -(loop area) = -8/15
    const auto z = melnikov_at_zero(0.0);
    CHECK(std::abs(z.value + 8.0 / 15.0) < 1e-6);
    CHECK(std::abs(z.route2_value + 8.0 / 15.0) < 1e-9);

    // other perturbation directions
    const auto v = cs::planar_variables();
    const auto c = melnikov_at_zero(-0.8, Polynomial(v, {{1.0, {3, 0}}}));
    CHECK(c.relative_disagreement < 1e-6);
    CHECK(c.value < 0);

    CHECK_THROWS_AS(melnikov_at_zero(0.5), RegimeError);
}

TEST_CASE("property: M(0) and the splitting agree in sign") {
    for (double a : {-0.9, -0.6, -0.3}) {
        const auto m = melnikov_at_zero(a);
        CHECK(m.relative_disagreement < 1e-6);
        const double s = homoclinic_split(a, 1e-3);
        // first-order splitting ~ alpha * M(0) / (normalization) shares the sign of M
        CHECK((s > 0) == (m.value > 0));
        CHECK((homoclinic_split(a, -1e-3) > 0) != (s > 0));
    }
}

TEST_CASE("Andronov-Leontovich audit") {
    const auto r = andronov_leontovich_audit(-0.8);
    CHECK(r.saddle_condition);
    CHECK(r.lambda1 == doctest::Approx(-1.8));
    CHECK(r.lambda2 == doctest::Approx(0.2));
    CHECK(r.sigma0 == -1.6);
    CHECK(r.nondegenerate);
    CHECK(r.loop_closes);
    CHECK(r.transversal);
    CHECK(r.all_hold);
    CHECK(r.tag == "supercritical");
}

TEST_CASE("limit cycle on the stable side only") {
    auto run = [](double alpha) {
        cs::CaseStudyParams p;
        p.alpha = alpha;
        const auto b = cs::build_variant(p, cs::Variant::xfact);
        const double a = p.a;
        Section s{{p.t1 + 2 * a / 9, p.t2 - 2.0 / 3.0}, {-2 * a / 9, -1.0 / 3.0}};
        LimitCycleOptions o;
        o.r_max = 1.05 * std::hypot(2 * a / 9, 1.0 / 3.0);
        return detect_limit_cycle(b.system, s, o);
    };
    const auto minus = run(-0.01);
    CHECK(minus.found);
    CHECK(minus.stable);
    CHECK(std::abs(minus.multiplier) < 1);
    CHECK(minus.reentry_error < 1e-6);
    CHECK(minus.period > 0);
    CHECK_FALSE(run(0.01).found);
}

TEST_CASE("a center is reported as degenerate") {
    const auto s = PolySystem::from_terms({"x", "y"}, {{{1.0, {0, 1}}}, {{-1.0, {1, 0}}}});
    const auto r = detect_limit_cycle(s, Section{{0, 0}, {1, 0}}, LimitCycleOptions{0.1, 2.0});
    CHECK(r.degenerate);
    CHECK_FALSE(r.found);
}

TEST_CASE("Hopf-type cycle of known radius") {
    // r' = r (1 - r^2) in Cartesian form: the unit circle is a stable cycle with multiplier e^{-4 pi}
    const auto s = PolySystem::from_terms(
        {"x", "y"}, {{{1, {1, 0}}, {-1, {0, 1}}, {-1, {3, 0}}, {-1, {1, 2}}},
                     {{1, {1, 0}}, {1, {0, 1}}, {-1, {2, 1}}, {-1, {0, 3}}}});
    const auto r = detect_limit_cycle(s, Section{{0, 0}, {1, 0}}, LimitCycleOptions{0.2, 3.0});
    REQUIRE(r.found);
    CHECK(r.radius == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.period == doctest::Approx(2 * M_PI).epsilon(1e-7));
    CHECK(r.stable);
    CHECK(r.multiplier == doctest::Approx(std::exp(-4 * M_PI)).epsilon(1e-3).scale(1e-5));
}

TEST_CASE("Dulac test") {
    const auto good = PolySystem::from_terms({"x1", "x2"}, {{{1, {0, 0}}, {-1, {1, 1}}}, {{1, {0, 0}}, {-1, {1, 1}}}});
    const auto r = dulac_no_limit_cycle_test(good);
    CHECK(r.hypotheses_hold);
    CHECK(r.verdict == DulacVerdict::no_limit_cycles);
    CHECK(r.dbar_min_sampled >= -1e-12);

    // positive k11^1 violates the hypotheses
    const auto bad = PolySystem::from_terms({"x1", "x2"}, {{{1, {0, 0}}, {1, {2, 0}}}, {{1, {0, 0}}}});
    const auto b = dulac_no_limit_cycle_test(bad);
    CHECK(b.verdict == DulacVerdict::inapplicable);
    CHECK_FALSE(b.reason.empty());

    const auto three = PolySystem::from_terms({"x", "y", "z"}, {{{1, {0, 0, 0}}}, {{1, {0, 0, 0}}}, {{1, {0, 0, 0}}}});
    CHECK(dulac_no_limit_cycle_test(three).verdict == DulacVerdict::inapplicable);
}

TEST_CASE("QSSA convergence") {
    const auto r = qssa_convergence_test(cs::CaseStudyParams{});
    REQUIRE(r.rows.size() == 3);
    CHECK(r.monotone);
    CHECK(r.rows[2].sup_error < 1e-2);
    // error roughly linear in mu
    CHECK(r.rows[1].sup_error / r.rows[2].sup_error == doctest::Approx(10).epsilon(0.2));
}

}
