#include "support.hpp"

#include "crnforge/classify.hpp"
#include "crnforge/crn.hpp"
#include "crnforge/errors.hpp"

#include <doctest.h>

using namespace crnforge;

namespace {

Reaction rx(std::string id, std::vector<unsigned> c, std::vector<unsigned> d, double k) {
    return {std::move(id), {std::move(c)}, {std::move(d)}, k};
}

}  // namespace

TEST_SUITE("crn") {

TEST_CASE("mass action induction by hand") {
    // x1 + x2 -> 2 x2 (k), x2 -> 0 (m)
    const ReactionNetwork net({"x1", "x2"}, {rx("a", {1, 1}, {0, 2}, 0.7), rx("b", {0, 1}, {0, 0}, 0.3)});
    const auto s = induce_kinetics(net);
    CHECK(s.equation(0) == Polynomial(s.variable_list(), {{-0.7, {1, 1}}}));
    CHECK(s.equation(1) == Polynomial(s.variable_list(), {{0.7, {1, 1}}, {-0.3, {0, 1}}}));
}

TEST_CASE("x1 + x2 -> 2 x2 maps to the two-reaction canonical network") {
    const ReactionNetwork rn({"x1", "x2"}, {rx("r", {1, 1}, {0, 2}, 2.5)});
    const auto cn = canonicalize(induce_kinetics(rn));
    REQUIRE(cn.size() == 2);
    for (const auto& r : cn.reactions()) {
        CHECK(r.reactant.stoichiometry == std::vector<unsigned>{1, 1});
        CHECK(r.rate == 2.5);
    }
    CHECK(cn.reactions()[0].product.stoichiometry == std::vector<unsigned>{0, 1});
    CHECK(cn.reactions()[1].product.stoichiometry == std::vector<unsigned>{1, 2});
}

TEST_CASE("canonicalize rejects nonkinetic and empty systems") {
    const auto bad = PolySystem::from_terms({"x", "y"}, {{{-1, {0, 1}}}, {{1, {1, 0}}}});
    try {
        (void)canonicalize(bad);
        FAIL("expected NotKinetic");
    } catch (const NotKinetic& e) {
        REQUIRE(e.offenders().size() == 1);
        CHECK(e.offenders()[0].equation == 0);
        CHECK(e.offenders()[0].exponents == std::vector<unsigned>{0, 1});
    }
    const PolySystem zero({"x"}, {Polynomial({"x"})});
    CHECK_THROWS_AS(canonicalize(zero), EmptySystem);
}

TEST_CASE("duplicate reactions merge") {
    const ReactionNetwork net({"x"}, {rx("a", {1}, {2}, 1.0), rx("b", {1}, {2}, 0.5)});
    REQUIRE(net.size() == 1);
    CHECK(net.reactions()[0].id == "a");
    CHECK(net.reactions()[0].rate == 1.5);
}

TEST_CASE("invalid networks") {
    CHECK_THROWS_AS(ReactionNetwork({"x"}, {rx("a", {1}, {2}, 0.0)}), InvalidNetwork);
    CHECK_THROWS_AS(ReactionNetwork({"x"}, {rx("a", {1}, {2}, -1.0)}), InvalidNetwork);
    CHECK_THROWS_AS(ReactionNetwork({"x"}, {rx("a", {1, 0}, {2}, 1.0)}), InvalidNetwork);
}

TEST_CASE("text format") {
    const auto net = parse_network("species x1, x2\n"
                                   "# comment\n"
                                   "r1: x1 + x2 -> 2 x2 ; k = 0.5\n"
                                   "r2: x2 -> 0 ; k = 1e-3\n");
    REQUIRE(net.size() == 2);
    CHECK(net.species() == std::vector<std::string>{"x1", "x2"});
    CHECK(net.reactions()[0].product.stoichiometry == std::vector<unsigned>{0, 2});
    CHECK(net.reactions()[1].product.is_zero());
    CHECK(net.reactions()[1].rate == 1e-3);
    CHECK(parse_network(serialize_network(net)) == net);
}

TEST_CASE("parse errors carry positions") {
    try {
        (void)parse_network("r1: x1 -> 2 x1 ; k = 1\nr2: x1 -> ; k = 1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_network("r1: x1 -> x2 ; k = -1\n"), Error);
    CHECK_THROWS_AS(parse_network("r1 x1 -> x2 ; k = 1\n"), ParseError);
}

TEST_CASE("property: canonical round trip is exact") {
    testing::Rng rng(41);
    for (int i = 0; i < 200; ++i) {
        const auto raw = testing::random_poly_system(rng, 3, 3, 6);
        std::vector<Polynomial> eqs;
        for (std::size_t k = 0; k < 3; ++k) {
            auto t = raw.equation(k).terms();
            for (auto& m : t)
                if (m.coeff < 0 && m.exponents[k] == 0) m.coeff = -m.coeff;
            eqs.emplace_back(raw.variable_list(), t);
        }
        const PolySystem s(raw.variable_list(), eqs);
        if (s.is_zero()) continue;
        const auto net = canonicalize(s);
        CHECK(net.size() == s.term_count());
        for (const auto& r : net.reactions()) {
            // unit change in one species
            int diff = 0;
            for (std::size_t j = 0; j < 3; ++j)
                diff += std::abs(int(r.product.stoichiometry[j]) - int(r.reactant.stoichiometry[j]));
            CHECK(diff == 1);
        }
        CHECK(induce_kinetics(net).max_coeff_diff(s) <= 1e-12);
        CHECK(parse_network(serialize_network(net)) == net);
    }
}

TEST_CASE("property: induced systems are kinetic") {
    testing::Rng rng(42);
    std::uniform_int_distribution<unsigned> st(0, 2);
    for (int i = 0; i < 200; ++i) {
        std::vector<Reaction> rs;
        for (int j = 0; j < 4; ++j) {
            std::vector<unsigned> c{st(rng), st(rng)}, d{st(rng), st(rng)};
            if (c == d) d[0] += 1;
            rs.push_back(rx("r" + std::to_string(j), c, d, testing::uniform(rng, 0.1, 3)));
        }
        const ReactionNetwork net({"x", "y"}, rs);
        const auto s = induce_kinetics(net);
        CHECK(find_cross_negative_terms(s).empty());
    }
}

}
