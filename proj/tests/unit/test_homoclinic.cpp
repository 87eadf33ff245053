#include "support.hpp"

#include "crnforge/classify.hpp"
#include "crnforge/crn.hpp"
#include "crnforge/dynamics.hpp"
#include "crnforge/errors.hpp"
#include "crnforge/homoclinic.hpp"

#include <doctest.h>

#include <cmath>

using namespace crnforge;
namespace cs = crnforge::casestudy;

namespace {

Exponents exps(const std::string& name) {
    const std::string sub = name.substr(1, name.find('^') - 1);
    Exponents e{0, 0};
    if (sub != "0")
        for (char c : sub) e[c - '1'] += 1;
    return e;
}

std::size_t eq_of(const std::string& name) { return name.back() - '1'; }

// Every record entry equals the matching coefficient of sys.
void check_record(const cs::CoefficientRecord& rec, const PolySystem& sys, double tol) {
    for (const auto& [n, v] : rec) {
        INFO(n);
        CHECK(std::abs(sys.equation(eq_of(n)).coefficient(exps(n)) - v) <= tol);
    }
    CHECK(sys.term_count() <= rec.size());
}

}  // namespace

TEST_SUITE("homoclinic") {

TEST_CASE("closed-form fixed points are zeros with the stated types") {
    for (double a : {-0.95, -0.8, -0.5, -0.2}) {
        const auto sys = cs::base_system(a);
        const auto fps = cs::fixed_points_closed_form(a);
        REQUIRE(fps.size() == 3);
        for (const auto& f : fps) {
            const auto r = analyze_fixed_point(sys, f.point);
            CHECK(r.residual < 1e-11);
            CHECK(r.type == f.type);
        }
    }
    CHECK(cs::saddle_quantity(-0.8) == -1.6);
    CHECK_THROWS_AS(cs::base_system(1.0), RegimeError);
}

TEST_CASE("alpha curve branches lie on H = 0") {
    const auto h = cs::alpha_curve();
    for (double x2 = -1.0; x2 <= 2.0; x2 += 0.125) {
        CHECK(std::abs(h.evaluate({cs::alpha_branch_plus(x2), x2})) < 1e-12);
        CHECK(std::abs(h.evaluate({cs::alpha_branch_minus(x2), x2})) < 1e-12);
    }
}

TEST_CASE("translated coefficients at the oracle point") {
    const auto rec = cs::translated_coefficients(-0.8, 0.0, 1.0, 1.5);
    const std::vector<std::pair<std::string, double>> want{
        {"k0^1", 0.875}, {"k0^2", -1.6}, {"k1^1", 1.0}, {"k1^2", 1.0}, {"k2^1", -2.3},
        {"k2^2", 1.6},   {"k12^1", -1.2}, {"k22^1", 1.5}, {"k22^2", -0.8}};
    for (const auto& [n, v] : want) {
        INFO(n);
        CHECK(std::abs(cs::lookup(rec, n) - v) < 1e-12);
    }
}

TEST_CASE("property: coefficient records match generic substitution") {
    testing::Rng rng(61);
    for (int i = 0; i < 50; ++i) {
        const double a = testing::uniform(rng, -0.99, -0.01), al = testing::uniform(rng, -0.1, 0.1);
        const double t1 = testing::uniform(rng, 0, 3), t2 = testing::uniform(rng, 1, 3), t = testing::uniform(rng, 1, 3);
        Eigen::VectorXd tr(2);
        tr << t1, t2;
        const auto start = cs::perturbed_system(a, al);
        check_record(cs::translated_coefficients(a, al, t1, t2),
                     substitute_affine(start, AffineMap::translation_only(tr), SubstitutionMode::state_change, 0.0),
                     1e-11);
        check_record(cs::sheared_coefficients(a, al, t),
                     substitute_affine(start, cs::sheared_map(a, t), SubstitutionMode::state_change, 0.0), 1e-11);
    }
}

TEST_CASE("constraint sets") {
    cs::CaseStudyParams p;
    CHECK(cs::xfact_constraints().satisfied(p.bundle()));
    CHECK(cs::translated_constraints().satisfied(p.bundle()));
    p.t1 = 0.3;  // below 2 sqrt3 / 9
    CHECK_FALSE(cs::xfact_constraints().satisfied(p.bundle()));
    CHECK_THROWS_AS(cs::build_variant(p, cs::Variant::xfact), ConstraintViolation);

    cs::CaseStudyParams s;
    s.a = -0.75;
    s.t = 2.2;
    CHECK(cs::sheared_constraints().satisfied(s.bundle()));
    s.t = 2.4;  // above 2.3333
    CHECK_FALSE(cs::sheared_constraints().satisfied(s.bundle()));
    s.t = 1.5;  // below 1.5556
    CHECK_FALSE(cs::sheared_constraints().satisfied(s.bundle()));
    CHECK(cs::translation_constraints().failures({{"t1", 1.0}, {"t2", 1.0}}) == std::vector<std::string>{"T2>1"});
}

TEST_CASE("variants are kinetic where expected") {
    cs::CaseStudyParams p;
    const auto tr = cs::build_variant(p, cs::Variant::translated);
    CHECK_FALSE(is_kinetic(tr.system));
    CHECK(find_cross_negative_terms(tr.system).size() == 2);
    for (auto v : {cs::Variant::xfact, cs::Variant::qssa, cs::Variant::hybrid}) {
        const auto b = cs::build_variant(p, v);
        INFO(cs::to_string(v));
        CHECK(is_kinetic(b.system));
        CHECK(apply(b.spec, cs::perturbed_system(p.a, p.alpha)).system.max_coeff_diff(b.system) < 1e-12);
    }
    CHECK(cs::build_variant(p, cs::Variant::qssa).system.dimension() == 4);
    CHECK(cs::build_variant(p, cs::Variant::hybrid).system.dimension() == 3);
    p.a = -0.75;
    const auto sh = cs::build_variant(p, cs::Variant::sheared_xfact);
    CHECK(is_kinetic(sh.system));
    for (auto v : {cs::Variant::translated, cs::Variant::xfact, cs::Variant::sheared_xfact, cs::Variant::qssa,
                   cs::Variant::hybrid})
        CHECK(cs::variant_from_string(cs::to_string(v)) == v);
}

TEST_CASE("published networks induce the variant systems") {
    cs::CaseStudyParams p;
    const auto xf = cs::published_network(p, cs::PublishedNetwork::xfact);
    CHECK(xf.size() == 9);
    CHECK(induce_kinetics(xf).max_coeff_diff(cs::build_variant(p, cs::Variant::xfact).system) < 1e-12);

    const auto hyb = cs::published_network(p, cs::PublishedNetwork::hybrid);
    CHECK(induce_kinetics(hyb).max_coeff_diff(cs::build_variant(p, cs::Variant::hybrid).system) < 1e-12);

    p.a = -0.75;
    const auto sh = cs::published_network(p, cs::PublishedNetwork::sheared_xfact);
    CHECK(sh.size() == 12);
    CHECK(induce_kinetics(sh).max_coeff_diff(cs::build_variant(p, cs::Variant::sheared_xfact).system) < 1e-12);

    cs::CaseStudyParams bad;
    bad.t2 = 0.5;
    CHECK_THROWS_AS(cs::published_network(bad, cs::PublishedNetwork::xfact), ConstraintViolation);
}

TEST_CASE("degenerate parameters drop reactions") {
    // k0^1 = 0 at T1 = -T2 / a
    cs::CaseStudyParams p;
    p.t1 = -p.t2 / p.a;
    const auto net = cs::published_network(p, cs::PublishedNetwork::xfact, false);
    CHECK(net.size() == 8);
    // k1^2 = 0 at T = -(2/3)(2 + 3a)^-1
    cs::CaseStudyParams s;
    s.a = -0.8;
    s.t = -(2.0 / 3.0) / (2.0 + 3.0 * s.a);
    CHECK(std::abs(cs::lookup(cs::sheared_coefficients(s.a, 0.0, s.t), "k1^2")) < 1e-12);
}

}
