#include "support.hpp"

#include "crnforge/homoclinic.hpp"
#include "crnforge/io/json.hpp"
#include "crnforge/verify/generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace crnforge;

TEST_SUITE("io") {

TEST_CASE("system JSON round trip is bit exact") {
    crnforge::verify::Rng rng(91);
    for (int i = 0; i < 100; ++i) {
        auto s = crnforge::verify::random_system(rng, 3, 3);
        // awkward doubles
        std::vector<Polynomial> eqs;
        for (const auto& e : s.equations()) {
            auto t = e.terms();
            for (auto& m : t) m.coeff = m.coeff / 3.0 + 1e-17 * i;
            eqs.emplace_back(s.variable_list(), t);
        }
        const PolySystem w(s.variable_list(), eqs, {{"k", 0.1}});
        const auto back = io::system_from_json(io::parse(io::dump(io::to_json(w))));
        CHECK(back == w);
        CHECK(back.param_meta() == w.param_meta());
    }
}

TEST_CASE("format errors") {
    CHECK_THROWS_AS(io::parse("{"), io::FormatError);
    CHECK_THROWS_AS(io::system_from_json(io::parse(R"({"variables": ["x"]})")), io::FormatError);
    CHECK_THROWS_AS(io::system_from_json(io::parse(R"({"variables": ["x"], "equations": [[{"coeff": 1, "exponents": [1, 2]}]]})")),
                    io::FormatError);
    CHECK_THROWS_AS(io::read_file("/nonexistent/file.json"), io::FormatError);
}

TEST_CASE("non-finite numbers become null") {
    io::Json j{{"a", std::nan("")}, {"b", 0.1}};
    CHECK(io::dump(j, 0) == R"({"a":null,"b":0.10000000000000001})");
}

TEST_CASE("transform spec from JSON") {
    const auto vars = casestudy::planar_variables();
    const auto spec = io::spec_from_json(io::parse(R"({"steps": [
        {"kind": "affine", "matrix": [[1, 0], [0, 1]], "translation": [1, 1.5]},
        {"kind": "xfactor"}]})"), vars);
    REQUIRE(spec.steps.size() == 2);
    const auto r = apply(spec, casestudy::perturbed_system(-0.8, 0.0));
    casestudy::CaseStudyParams p;
    CHECK(r.system.max_coeff_diff(casestudy::build_variant(p, casestudy::Variant::xfact).system) < 1e-12);
    const auto again = io::spec_from_json(io::to_json(spec), vars);
    CHECK(apply(again, casestudy::perturbed_system(-0.8, 0.0)).system == r.system);
}

TEST_CASE("trajectory CSV") {
    TrajectoryRecord tr;
    tr.times = {0.0, 0.5};
    tr.states = {{1.0, 2.0}, {0.25, 1.0 / 3.0}};
    const auto csv = io::trajectory_csv(tr, {"x1", "x2"});
    CHECK(csv == "t,x1,x2\n0,1,2\n0.5,0.25,0.33333333333333331\n");
}

}
