#include "crnforge/classify.hpp"
#include "crnforge/crn.hpp"
#include "crnforge/dynamics.hpp"
#include "crnforge/homoclinic.hpp"
#include "crnforge/transform.hpp"

#include <benchmark/benchmark.h>

using namespace crnforge;
namespace cs = crnforge::casestudy;

static void BM_PolyPow(benchmark::State& st) {
    auto v = make_variables({"x", "y", "z"});
    const Polynomial p(v, {{1, {1, 0, 0}}, {2, {0, 1, 0}}, {-1, {0, 0, 1}}, {0.5, {0, 0, 0}}});
    for (auto _ : st) benchmark::DoNotOptimize(p.pow(static_cast<unsigned>(st.range(0))));
}
BENCHMARK(BM_PolyPow)->Arg(4)->Arg(8)->Arg(12);

static void BM_AffineSubstitution(benchmark::State& st) {
    const auto s = cs::perturbed_system(-0.8, 0.0);
    const auto m = cs::sheared_map(-0.75, 2.2);
    for (auto _ : st) benchmark::DoNotOptimize(substitute_affine(s, m));
}
BENCHMARK(BM_AffineSubstitution);

static void BM_Classify(benchmark::State& st) {
    const auto s = PolySystem::from_terms({"x1", "x2"}, {{{1, {0, 0}}, {1, {2, 0}}, {-4, {0, 1}}, {1, {0, 2}}}, {{1, {0, 0}}}});
    for (auto _ : st) benchmark::DoNotOptimize(classify(s));
}
BENCHMARK(BM_Classify);

static void BM_CanonicalRoundTrip(benchmark::State& st) {
    const auto s = cs::build_variant(cs::CaseStudyParams{}, cs::Variant::qssa).system;
    for (auto _ : st) benchmark::DoNotOptimize(induce_kinetics(canonicalize(s)));
}
BENCHMARK(BM_CanonicalRoundTrip);

static void BM_IntegrateLoop(benchmark::State& st) {
    const auto s = cs::perturbed_system(-0.8, -0.01);
    const double x0[2] = {-0.1, -0.7};
    IntegrationOptions o;
    o.rtol = 1e-10;
    o.record = false;
    for (auto _ : st) benchmark::DoNotOptimize(integrate(s, x0, 0.0, 50.0, o));
}
BENCHMARK(BM_IntegrateLoop);

static void BM_FixedPoints(benchmark::State& st) {
    const auto s = cs::perturbed_system(-0.8, 0.0);
    for (auto _ : st) benchmark::DoNotOptimize(find_fixed_points(s, SearchBox::square(2, -1.0, 1.0)));
}
BENCHMARK(BM_FixedPoints);

static void BM_Melnikov(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(melnikov_at_zero(-0.8));
}
BENCHMARK(BM_Melnikov)->Unit(benchmark::kMillisecond);

static void BM_QssaStiff(benchmark::State& st) {
    cs::CaseStudyParams p;
    p.mu = 1e-4;
    const auto b = cs::build_variant(p, cs::Variant::qssa);
    const double x0[4] = {1.01, 0.61, 1.0, 1.0};
    IntegrationOptions o;
    o.record = false;
    for (auto _ : st) benchmark::DoNotOptimize(integrate(b.system, x0, 0.0, 10.0, o));
}
BENCHMARK(BM_QssaStiff)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
