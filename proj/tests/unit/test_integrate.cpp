#include "support.hpp"

#include "crnforge/dynamics.hpp"

#include <doctest.h>

#include <cmath>

using namespace crnforge;

TEST_SUITE("integrate") {

TEST_CASE("exponential decay") {
    const auto s = PolySystem::from_terms({"x"}, {{{-1.0, {1}}}});
    const double x0[1] = {1.0};
    IntegrationOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    const auto tr = integrate(s, x0, 0.0, 1.0, o);
    CHECK(tr.status == IntegrationStatus::completed);
    CHECK(std::abs(tr.final_state[0] - std::exp(-1.0)) < 1e-9);
    CHECK(tr.final_time == 1.0);
    CHECK(tr.times.front() == 0.0);
    for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
}

TEST_CASE("error shrinks with tolerance at fifth order") {
    const auto s = PolySystem::from_terms({"x"}, {{{-1.0, {1}}}});
    const double x0[1] = {1.0};
    auto err = [&](double tol) {
        IntegrationOptions o;
        o.rtol = tol;
        o.atol = tol * 1e-3;
        return std::abs(integrate(s, x0, 0.0, 5.0, o).final_state[0] - std::exp(-5.0));
    };
    const double e1 = err(1e-6), e2 = err(1e-7);
    CHECK(e2 < e1);
    const double ratio = e1 / e2;
    CHECK(ratio >= 5.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("harmonic oscillator keeps its energy") {
    const auto s = PolySystem::from_terms({"x", "y"}, {{{1.0, {0, 1}}}, {{-1.0, {1, 0}}}});
    const double x0[2] = {1.0, 0.0};
    IntegrationOptions o;
    o.rtol = 1e-11;
    o.atol = 1e-13;
    const auto tr = integrate(s, x0, 0.0, 20 * M_PI, o);
    CHECK(std::abs(tr.final_state[0] - 1.0) < 1e-8);
    CHECK(std::abs(tr.final_state[1]) < 1e-8);
}

TEST_CASE("output times and backward integration") {
    const auto s = PolySystem::from_terms({"x"}, {{{1.0, {1}}}});
    const double x0[1] = {1.0};
    IntegrationOptions o;
    o.output_times = {0.0, 0.25, 0.5, 1.0};
    const auto tr = integrate(s, x0, 0.0, 1.0, o);
    REQUIRE(tr.times.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(tr.states[i][0] - std::exp(tr.times[i])) < 1e-8);
    const auto back = integrate(s, x0, 0.0, -1.0);
    CHECK(std::abs(back.final_state[0] - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("events") {
    // x' = 1, y' = 0: crosses x = 0.5
    const auto s = PolySystem::from_terms({"x", "y"}, {std::vector<Monomial>{{1.0, {0, 0}}}, std::vector<Monomial>{}});
    const double x0[2] = {0.0, 1.0};
    std::vector<Event> ev{Event::plane({1.0, 0.0}, 0.5, +1, true)};
    const auto tr = integrate(s, x0, 0.0, 10.0, {}, ev);
    CHECK(tr.status == IntegrationStatus::terminated_by_event);
    REQUIRE(tr.events.size() == 1);
    CHECK(std::abs(tr.events[0].t - 0.5) < 1e-10);
    CHECK(std::abs(tr.final_time - 0.5) < 1e-10);

    // Direction filter: a decreasing-only plane never fires.
    std::vector<Event> ev2{Event::plane({1.0, 0.0}, 0.5, -1, true)};
    CHECK(integrate(s, x0, 0.0, 1.0, {}, ev2).status == IntegrationStatus::completed);

    // Ball around (2, 1)
    std::vector<Event> ev3{Event::ball({2.0, 1.0}, 0.1)};
    const auto tb = integrate(s, x0, 0.0, 10.0, {}, ev3);
    CHECK(std::abs(tb.final_time - 1.9) < 1e-9);
}

TEST_CASE("blow-up is reported as divergence") {
    // x' = x^2 from 1 blows up at t = 1
    const auto s = PolySystem::from_terms({"x"}, {{{1.0, {2}}}});
    const double x0[1] = {1.0};
    IntegrationOptions o;
    o.divergence_norm = 1e8;
    const auto tr = integrate(s, x0, 0.0, 2.0, o);
    CHECK(tr.status == IntegrationStatus::diverged);
    CHECK(tr.final_time < 1.0);
}

TEST_CASE("stiff problem switches methods") {
    // x' = -1e5 (x - cos t)
    VectorField f = [](std::span<const double> x, std::span<double> dx) { dx[0] = -1e5 * (x[0] - std::cos(x[1])), dx[1] = 1.0; };
    JacobianFn j = [](std::span<const double> x, Eigen::MatrixXd& m) {
        m.resize(2, 2);
        m << -1e5, -1e5 * std::sin(x[1]), 0, 0;
    };
    const double x0[2] = {1.0, 0.0};
    IntegrationOptions o;
    o.rtol = 1e-6;
    o.atol = 1e-9;
    const auto tr = integrate(f, x0, 0.0, 10.0, o, {}, j);
    CHECK(tr.status == IntegrationStatus::completed);
    CHECK(tr.used_stiff_fallback);
    CHECK(std::abs(tr.final_state[0] - std::cos(10.0)) < 1e-4);
    CHECK(tr.accepted < 200000);
}

TEST_CASE("max steps") {
    const auto s = PolySystem::from_terms({"x", "y"}, {{{1.0, {0, 1}}}, {{-1.0, {1, 0}}}});
    const double x0[2] = {1.0, 0.0};
    IntegrationOptions o;
    o.max_steps = 10;
    CHECK(integrate(s, x0, 0.0, 1000.0, o).status == IntegrationStatus::max_steps);
}

TEST_CASE("property: compiled system agrees with evaluation") {
    testing::Rng rng(71);
    for (int i = 0; i < 100; ++i) {
        const auto s = testing::random_poly_system(rng, 3, 3, 6);
        CompiledSystem c(s);
        const double x[3] = {testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2)};
        double dx[3];
        c(x, dx);
        const auto want = s.evaluate(x);
        Eigen::MatrixXd jc;
        c.jacobian(x, jc);
        const auto jw = jacobian_at(s, x);
        for (int k = 0; k < 3; ++k) CHECK(dx[k] == doctest::Approx(want[k]).epsilon(1e-12).scale(1.0));
        CHECK((jc - jw).norm() < 1e-11);
    }
}

}
