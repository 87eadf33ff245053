#include "support.hpp"

#include "crnforge/classify.hpp"

#include <doctest.h>

#include <cmath>

using namespace crnforge;

namespace {

PolySystem ex_cnt(double k) {
    return PolySystem::from_terms({"x1", "x2"}, {{{1.0, {0, 0}}, {1.0, {2, 0}}, {2.0 * k, {0, 1}}, {1.0, {0, 2}}},
                                                 {{1.0, {0, 0}}}});
}

}  // namespace

TEST_SUITE("classify") {

TEST_CASE("cross-negative terms") {
    const auto s = PolySystem::from_terms({"x", "y"}, {{{-1, {0, 1}}, {-2, {1, 0}}, {3, {0, 0}}},
                                                     {{-1, {1, 0}}, {-1, {0, 1}}}});
    const auto c = find_cross_negative_terms(s);
    REQUIRE(c.size() == 2);
    CHECK(c[0].equation == 0);
    CHECK(c[0].term.exponents == Exponents{0, 1});
    CHECK(c[1].equation == 1);
    CHECK(c[1].term.exponents == Exponents{1, 0});
    CHECK_FALSE(is_kinetic(s));
    CHECK(find_cross_negative_terms(s, 1.5).empty());
}

TEST_CASE("k-family table") {
    const auto k1 = classify(ex_cnt(1.0));
    CHECK(k1.kinetic);
    CHECK(k1.nonnegative == Nonnegativity::nonnegative);

    // 1 - x2 + x2^2 > 0 on the face x1 = 0
    const auto kh = classify(ex_cnt(-0.5));
    CHECK_FALSE(kh.kinetic);
    CHECK(kh.nonnegative == Nonnegativity::nonnegative);
    CHECK(kh.nonnegativity_exact);
    CHECK(kh.cross_negative_effect_witnesses.empty());

    // 1 - 4 x2 + x2^2 < 0 for x2 in (2 - sqrt3, 2 + sqrt3)
    const auto k2 = classify(ex_cnt(-2.0));
    CHECK(k2.nonnegative == Nonnegativity::negative);
    REQUIRE(k2.cross_negative_effect_witnesses.size() == 1);
    const auto& w = k2.cross_negative_effect_witnesses[0];
    REQUIRE(w.interval);
    CHECK(w.interval->first == doctest::Approx(2 - std::sqrt(3.0)).epsilon(1e-12));
    CHECK(w.interval->second == doctest::Approx(2 + std::sqrt(3.0)).epsilon(1e-12));
    CHECK(w.point[0] == 0.0);
    CHECK(w.value == doctest::Approx(1 - 4 * w.point[1] + w.point[1] * w.point[1]));
    CHECK(w.value < 0);
}

TEST_CASE("negative on the far face only") {
    // P2(x1, 0) = x1 - 3 is negative on [0, 3)
    const auto s = PolySystem::from_terms({"x1", "x2"}, {{{1, {1, 0}}}, {{1, {1, 0}}, {-3, {0, 0}}}});
    const auto r = check_cross_negative_effect(s);
    CHECK(r.verdict == Nonnegativity::negative);
    REQUIRE(r.witnesses.size() == 1);
    CHECK(r.witnesses[0].component == 1);
    CHECK(r.witnesses[0].interval->first == doctest::Approx(0.0));
    CHECK(r.witnesses[0].interval->second == doctest::Approx(3.0));
}

TEST_CASE("three variables are undetermined unless sampling finds a witness") {
    const auto pos = PolySystem::from_terms(
        {"x", "y", "z"}, {{{1, {0, 0, 0}}, {-1, {0, 1, 0}}, {1, {0, 2, 0}}}, {{1, {0, 0, 0}}}, {{1, {0, 0, 0}}}});
    const auto r = check_cross_negative_effect(pos);
    CHECK(r.verdict == Nonnegativity::undetermined);
    CHECK_FALSE(r.exact);
    const auto neg = PolySystem::from_terms(
        {"x", "y", "z"}, {{{1, {0, 0, 0}}, {-4, {0, 1, 0}}, {1, {0, 2, 0}}}, {{1, {0, 0, 0}}}, {{1, {0, 0, 0}}}});
    const auto n = check_cross_negative_effect(neg);
    CHECK(n.verdict == Nonnegativity::negative);
    REQUIRE_FALSE(n.witnesses.empty());
    CHECK(n.witnesses[0].value < 0);
    CHECK(n.witnesses[0].point[0] == 0.0);
}

TEST_CASE("x-factorability") {
    const auto s = PolySystem::from_terms({"x", "y"}, {{{1, {1, 0}}, {-1, {1, 1}}}, {{1, {1, 0}}, {1, {0, 1}}}});
    const auto f = check_x_factorable(s);
    CHECK(f.factorable == std::set<std::size_t>{0});
    CHECK_FALSE(f.fully);
}

TEST_CASE("univariate coefficients") {
    Polynomial p({"x", "y"}, {{2, {0, 2}}, {-1, {0, 0}}});
    const auto c = univariate_coefficients(p, 1);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == -1);
    CHECK(c[1] == 0);
    CHECK(c[2] == 2);
}

TEST_CASE("property: kinetic implies nonnegative in the plane") {
    testing::Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        auto s = testing::random_poly_system(rng, 2, 3, 5);
        std::vector<Polynomial> eqs;
        for (std::size_t k = 0; k < 2; ++k) {
            auto t = s.equation(k).terms();
            for (auto& m : t)
                if (m.coeff < 0 && m.exponents[k] == 0) m.coeff = -m.coeff;
            eqs.emplace_back(s.variable_list(), t);
        }
        const PolySystem kin(s.variable_list(), eqs);
        const auto r = classify(kin);
        CHECK(r.kinetic);
        CHECK(r.nonnegative == Nonnegativity::nonnegative);
    }
}

TEST_CASE("property: witnesses are genuine") {
    testing::Rng rng(32);
    int seen = 0;
    for (int i = 0; i < 300; ++i) {
        const auto s = testing::random_poly_system(rng, 2, 2, 4);
        const auto r = check_cross_negative_effect(s);
        for (const auto& w : r.witnesses) {
            ++seen;
            CHECK(w.point[w.component] == 0.0);
            CHECK(s.equation(w.component).evaluate(w.point) < 0);
            CHECK(w.point[1 - w.component] >= 0);
        }
        if (r.verdict == Nonnegativity::nonnegative) {
            // spot-check the faces
            for (double v = 0; v < 50; v += 0.37) {
                CHECK(s.equation(0).evaluate({0.0, v}) >= -1e-9);
                CHECK(s.equation(1).evaluate({v, 0.0}) >= -1e-9);
            }
        }
    }
    CHECK(seen > 0);
}

}
