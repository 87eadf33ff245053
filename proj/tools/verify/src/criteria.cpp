#include "crnforge/verify/criteria.hpp"

#include "crnforge/verify/generators.hpp"

#include "crnforge/classify.hpp"
#include "crnforge/crn.hpp"
#include "crnforge/dynamics.hpp"
#include "crnforge/errors.hpp"
#include "crnforge/homoclinic.hpp"
#include "crnforge/transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace crnforge::verify {

namespace cs = crnforge::casestudy;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::vector<std::string> failures;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failures.push_back(what);
        }
    }
};

CriterionResult finish(Outcome& o) {
    CriterionResult r;
    r.pass = o.pass;
    r.detail = o.detail.str();
    if (!o.failures.empty()) {
        r.detail += r.detail.empty() ? "failed:" : "; failed:";
        for (std::size_t i = 0; i < o.failures.size() && i < 4; ++i) r.detail += " " + o.failures[i];
        if (o.failures.size() > 4) r.detail += " (+" + std::to_string(o.failures.size() - 4) + " more)";
    }
    return r;
}

// P1 = 1 + x1^2 + 2k x2 + x2^2, P2 = 1.
PolySystem ex_cnt(double k) {
    return PolySystem::from_terms({"x1", "x2"}, {{{1.0, {0, 0}}, {1.0, {2, 0}}, {2.0 * k, {0, 1}}, {1.0, {0, 2}}},
                                                 {{1.0, {0, 0}}}});
}

// Translated base system expanded by hand: x = x̄ - T.
std::vector<std::pair<std::string, double>> translated_oracle(double a, double al, double t1, double t2) {
    return {
        {"k0^1", -a * t1 - t2 + 1.5 * a * t1 * t2 + 1.5 * t2 * t2 - al * t1},
        {"k0^2", -t1 - a * t2 + a * t2 * t2},
        {"k1^1", a + al - 1.5 * a * t2},
        {"k1^2", 1.0},
        {"k2^1", 1.0 - 1.5 * a * t1 - 3.0 * t2},
        {"k2^2", a - 2.0 * a * t2},
        {"k12^1", 1.5 * a},
        {"k22^1", 1.5},
        {"k22^2", a},
    };
}

// ---------------------------------------------------------------------------

CriterionResult classification_table(std::uint64_t) {
    Outcome o;
    const auto r1 = classify(ex_cnt(1.0));
    o.check(r1.kinetic && r1.nonnegative == Nonnegativity::nonnegative, "k=1 not kinetic");

    const auto r2 = classify(ex_cnt(-0.5));
    o.check(!r2.kinetic && r2.nonnegative == Nonnegativity::nonnegative && r2.nonnegativity_exact,
            "k=-0.5 not (nonkinetic, nonnegative)");

    const auto r3 = classify(ex_cnt(-2.0));
    bool have = false;
    double lo = 0.0, hi = 0.0;
    for (const auto& w : r3.cross_negative_effect_witnesses)
        if (w.component == 0 && w.interval) {
            have = true;
            lo = w.interval->first;
            hi = w.interval->second;
            o.check(w.value < 0 && w.point[0] == 0.0 && w.point[1] > lo && w.point[1] < hi, "k=-2 witness point");
        }
    o.check(!r3.kinetic && r3.nonnegative == Nonnegativity::negative && have, "k=-2 not (nonkinetic, negative)");
    const double elo = 2.0 - std::sqrt(3.0), ehi = 2.0 + std::sqrt(3.0);
    o.check(std::abs(lo - elo) <= 1e-9 && std::abs(hi - ehi) <= 1e-9, "k=-2 interval endpoints");
    o.detail << "k=-2 interval (" << fmt(lo) << ", " << fmt(hi) << ") err "
             << fmt(std::max(std::abs(lo - elo), std::abs(hi - ehi)));
    return finish(o);
}

CriterionResult canonical_round_trip(std::uint64_t seed) {
    Outcome o;
    Rng rng(seed);
    std::uniform_int_distribution<int> dim(2, 3);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const PolySystem s = random_kinetic_system(rng, static_cast<std::size_t>(dim(rng)), 3, 8);
        const PolySystem back = induce_kinetics(canonicalize(s));
        const double d = back.max_coeff_diff(s);
        worst = std::max(worst, d);
        if (!(d <= 1e-12) || back.variables() != s.variables()) o.check(false, "random system " + std::to_string(i));
    }

    int variants = 0;
    for (auto v : {cs::Variant::translated, cs::Variant::xfact, cs::Variant::sheared_xfact, cs::Variant::qssa,
                   cs::Variant::hybrid}) {
        cs::CaseStudyParams p;
        if (v == cs::Variant::sheared_xfact) p.a = -0.75;  // T = 2.2 needs T < 2.045 at a = -0.8
        const auto b = cs::build_variant(p, v);
        if (v == cs::Variant::translated) {
            // k0^2 and k2^1 are cross-negative here: the network does not exist.
            bool threw = false;
            try {
                (void)canonicalize(b.system);
            } catch (const NotKinetic& e) {
                threw = std::any_of(e.offenders().begin(), e.offenders().end(), [](const auto& f) {
                    return f.equation == 1 && f.exponents == Exponents{0, 0};
                });
            }
            o.check(threw, "translated variant should be rejected as nonkinetic");
            continue;
        }
        const double d = induce_kinetics(canonicalize(b.system)).max_coeff_diff(b.system);
        worst = std::max(worst, d);
        o.check(d <= 1e-12, cs::to_string(v) + " round trip");
        ++variants;
    }

    // x1 + x2 -> 2 x2 at rate k.
    const double k = 0.7;
    const ReactionNetwork rn({"x1", "x2"}, {{"r", {{1, 1}}, {{0, 2}}, k}});
    const ReactionNetwork cn = canonicalize(induce_kinetics(rn));
    bool exact = cn.size() == 2;
    if (exact) {
        bool loss = false, gain = false;
        for (const auto& r : cn.reactions()) {
            if (r.reactant.stoichiometry != std::vector<unsigned>{1, 1} || r.rate != k) exact = false;
            if (r.product.stoichiometry == std::vector<unsigned>{0, 1}) loss = true;
            if (r.product.stoichiometry == std::vector<unsigned>{1, 2}) gain = true;
        }
        exact = exact && loss && gain;
    }
    o.check(exact, "two-species example network");
    o.detail << "500 random + " << variants << " kinetic variants, max diff " << fmt(worst)
             << "; translated rejected as nonkinetic; x1+x2->2x2 gives " << cn.size() << " reactions";
    return finish(o);
}

CriterionResult flow_invariance(std::uint64_t seed) {
    Outcome o;
    Rng rng(seed);
    // Dyadic samples keep every product exact, so cancellation is exact too.
    std::uniform_int_distribution<int> k(1, 1023);
    const Polynomial h = cs::alpha_curve();
    const VariableList v = cs::planar_variables();
    int zero = 0;
    for (int i = 0; i < 20; ++i) {
        const double a = -k(rng) / 1024.0;
        const PolySystem p = cs::base_system(a);
        const Polynomial factor(v, {{2.0 * a, {0, 0}}, {3.0 * a, {0, 1}}});
        const Polynomial r = h.derivative(0) * p.equation(0) + h.derivative(1) * p.equation(1) - factor * h;
        if (r.is_zero())
            ++zero;
        else
            o.check(false, "a=" + fmt(a) + " residual " + r.to_string());
    }
    o.detail << zero << "/20 exact zero";
    return finish(o);
}

CriterionResult fixed_point_oracle(std::uint64_t) {
    Outcome o;
    const double a = -0.8;
    const PolySystem sys = cs::perturbed_system(a, 0.0);
    const auto found = find_fixed_points(sys, SearchBox::square(2, -1.0, 1.0));
    const auto closed = cs::fixed_points_closed_form(a);
    o.check(found.points.size() == 3 && !found.degenerate_system,
            "found " + std::to_string(found.points.size()) + " points");
    double worst = 0.0;
    const std::vector<FixedPointType> expect{FixedPointType::saddle, FixedPointType::unstable_spiral,
                                             FixedPointType::stable_node};
    for (std::size_t i = 0; i < closed.size(); ++i) {
        const auto& c = closed[i];
        const FixedPointReport* m = nullptr;
        double best = 1e300;
        for (const auto& f : found.points) {
            const double d = std::hypot(f.location[0] - c.point[0], f.location[1] - c.point[1]);
            if (d < best) best = d, m = &f;
        }
        worst = std::max(worst, best);
        o.check(m && best <= 1e-8, c.role + " location");
        o.check(i < expect.size() && c.type == expect[i], c.role + " closed-form type");
        if (m) o.check(m->type == c.type, c.role + " numeric type " + to_string(m->type));
        if (m && c.role == "saddle") {
            std::vector<double> re;
            for (auto& e : m->eigenvalues) re.push_back(e.real());
            std::sort(re.begin(), re.end());
            o.check(re.size() == 2 && std::abs(re[0] + 1.8) <= 1e-10 && std::abs(re[1] - 0.2) <= 1e-10,
                    "saddle eigenvalues");
        }
    }
    o.check(cs::saddle_quantity(a) == -1.6, "sigma0");
    o.detail << "max location err " << fmt(worst) << ", sigma0 " << fmt(cs::saddle_quantity(a));
    return finish(o);
}

CriterionResult xfact_network(std::uint64_t) {
    Outcome o;
    cs::CaseStudyParams p;
    p.a = -0.8, p.alpha = 0.0, p.t1 = 1.0, p.t2 = 1.5;
    o.check(cs::xfact_constraints().satisfied(p.bundle()), "xfact constraints reject the reference parameters");
    const auto net = cs::published_network(p, cs::PublishedNetwork::xfact);
    const std::vector<double> published{0.875, 1.6, 1.0, 1, 2.3, 1.6, 1.2, 1.5, 0.8};
    const auto oracle = translated_oracle(p.a, p.alpha, p.t1, p.t2);
    const auto rec = cs::translated_coefficients(p.a, p.alpha, p.t1, p.t2);
    o.check(net.size() == 9, std::to_string(net.size()) + " reactions");
    double worst = 0.0;
    for (std::size_t i = 0; i < net.size() && i < 9; ++i) {
        const double r = net.reactions()[i].rate;
        worst = std::max({worst, std::abs(r - published[i]), std::abs(r - std::abs(oracle[i].second))});
        o.check(std::abs(cs::lookup(rec, oracle[i].first) - oracle[i].second) <= 1e-12, oracle[i].first + " record");
    }
    o.check(worst <= 1e-12, "rate mismatch");
    // The x-factorized system must be mass-action induced by this network.
    const auto xb = cs::build_variant(p, cs::Variant::xfact);
    o.check(induce_kinetics(net).max_coeff_diff(xb.system) <= 1e-12, "network does not induce the xfact system");
    o.detail << net.size() << " reactions, max rate err " << fmt(worst);
    return finish(o);
}

CriterionResult boundary_audit(std::uint64_t) {
    Outcome o;
    cs::CaseStudyParams p;
    const auto tb = cs::build_variant(p, cs::Variant::translated);
    std::vector<std::array<double, 2>> interior;
    for (const auto& c : cs::fixed_points_closed_form(p.a)) interior.push_back({c.point[0] + p.t1, c.point[1] + p.t2});
    const auto audit = xfact_fixed_point_audit(tb.system, interior);
    bool origin = false, axis = false;
    for (const auto& b : audit.boundary) {
        if (b.origin) {
            origin = true;
            o.check(std::abs(b.origin_eigenvalues[0] - 0.875) <= 1e-12 &&
                        std::abs(b.origin_eigenvalues[1] + 1.6) <= 1e-12,
                    "origin eigenvalues");
            o.check(b.type == FixedPointType::saddle, "origin type " + to_string(b.type));
        } else if (b.point[1] == 0.0) {
            axis = true;
            o.check(std::abs(b.point[0] + 0.875) <= 1e-12, "x-axis point at " + fmt(b.point[0]));
            o.check(!b.in_nonnegative_orthant, "x-axis point inside orthant");
        }
    }
    o.check(origin && axis, "missing boundary points");

    // Independent check on the x-factorized system itself.
    const auto xb = cs::build_variant(p, cs::Variant::xfact);
    const auto fp = find_fixed_points(xb.system, SearchBox::square(2, -2.0, 3.5));
    bool o2 = false, ax2 = false;
    for (const auto& f : fp.points) {
        if (std::hypot(f.location[0], f.location[1]) < 1e-12) o2 = f.type == FixedPointType::saddle;
        if (std::hypot(f.location[0] + 0.875, f.location[1]) < 1e-10) ax2 = true;
    }
    o.check(o2 && ax2, "finder on x-factorized system");
    o.detail << "origin saddle lambda (0.875, -1.6); axis point (-0.875, 0) outside orthant; finder agrees";
    return finish(o);
}

CriterionResult degeneracies(std::uint64_t) {
    Outcome o;
    const double lo = -8.0 / 9.0, hi = (2.0 - std::sqrt(34.0)) / 5.0;
    double worst = 0.0;
    for (int i = 1; i <= 5; ++i) {
        cs::CaseStudyParams p;
        p.a = lo + (hi - lo) * i / 6.0;
        p.alpha = 0.0;
        p.t = -(2.0 / 3.0) / (2.0 + 3.0 * p.a);
        o.check(cs::sheared_constraints().satisfied(p.bundle()), "sheared constraints fail at a=" + fmt(p.a));
        const auto b = cs::build_variant(p, cs::Variant::sheared_xfact, false);
        const double rec = std::abs(cs::lookup(b.coefficients, "k1^2"));
        const double sys = std::abs(b.system.equation(1).coefficient({1, 1}));
        worst = std::max({worst, rec, sys});
        o.check(rec < 1e-12 && sys < 1e-12, "k1^2 at a=" + fmt(p.a));
    }
    double worst1 = 0.0;
    for (double a : {-0.9, -0.8, -0.6, -0.3}) {
        cs::CaseStudyParams p;
        p.a = a, p.alpha = 0.0, p.t2 = 1.5;
        p.t1 = -p.t2 / a;
        const auto b = cs::build_variant(p, cs::Variant::translated, false);
        const double rec = std::abs(cs::lookup(b.coefficients, "k0^1"));
        const double sys = std::abs(b.system.equation(0).coefficient({0, 0}));
        worst1 = std::max({worst1, rec, sys});
        o.check(rec < 1e-12 && sys < 1e-12, "k0^1 at a=" + fmt(a));
    }
    o.detail << "max |k1^2| " << fmt(worst) << ", max |k0^1| " << fmt(worst1);
    return finish(o);
}

CriterionResult melnikov(std::uint64_t) {
    Outcome o;
    const auto m = melnikov_at_zero(-0.8);
    o.check(m.value < 0.0, "M(0) not negative");
    o.check(m.relative_disagreement <= 1e-4, "routes disagree");
    const bool positive = m.min_phi > 0.0 &&
                          std::all_of(m.phi_samples.begin(), m.phi_samples.end(), [](double v) { return v > 0.0; });
    o.check(positive && !m.phi_samples.empty(), "phi not positive");
    o.check(m.max_h_drift < 1e-6, "H drift");
    o.check(m.closure_distance <= 10.0 * m.truncation_delta, "loop did not close");
    o.detail << "M(0) " << fmt(m.value) << ", route2 " << fmt(m.route2_value) << ", rel "
             << fmt(m.relative_disagreement) << ", |H| drift " << fmt(m.max_h_drift) << ", min phi "
             << fmt(m.min_phi);
    return finish(o);
}

LimitCycleResult cycle_at(double alpha) {
    cs::CaseStudyParams p;
    p.alpha = alpha;
    const auto b = cs::build_variant(p, cs::Variant::xfact);
    const auto closed = cs::fixed_points_closed_form(p.a);
    const auto spiral = *std::find_if(closed.begin(), closed.end(), [](auto& c) { return c.role == "spiral"; });
    // Half-line from the spiral toward the bottom of the loop at (0, -1).
    const std::array<double, 2> d{-spiral.point[0], -1.0 - spiral.point[1]};
    Section s{{spiral.point[0] + p.t1, spiral.point[1] + p.t2}, d};
    LimitCycleOptions opt;
    opt.r_max = 1.05 * std::hypot(d[0], d[1]);
    return detect_limit_cycle(b.system, s, opt);
}

CriterionResult bifurcation(std::uint64_t) {
    Outcome o;
    const auto minus = cycle_at(-0.01);
    const auto plus = cycle_at(0.01);
    const auto stable = [](const LimitCycleResult& r) {
        return r.found && r.stable && std::abs(r.multiplier) < 1.0 && r.reentry_error < 1e-6;
    };
    const bool one = (stable(minus) && !plus.found) != (stable(plus) && !minus.found);
    o.check(one, "expected exactly one side with a stable cycle");
    const auto& c = stable(minus) ? minus : plus;
    o.detail << "alpha=-0.01: " << (minus.found ? "cycle" : "none") << ", alpha=+0.01: "
             << (plus.found ? "cycle" : "none");
    if (c.found)
        o.detail << "; period " << fmt(c.period) << ", multiplier " << fmt(c.multiplier) << ", reentry "
                 << fmt(c.reentry_error);
    return finish(o);
}

CriterionResult qssa_convergence(std::uint64_t) {
    Outcome o;
    const auto r = qssa_convergence_test(cs::CaseStudyParams{});
    o.check(r.rows.size() == 3, "rows");
    o.check(r.monotone, "not monotone");
    o.check(!r.rows.empty() && r.rows.back().sup_error < 1e-2, "error at mu=1e-4");
    for (const auto& row : r.rows) o.detail << "mu=" << fmt(row.mu) << ": " << fmt(row.sup_error) << " ";
    return finish(o);
}

CriterionResult xfactor_kinetic(std::uint64_t seed) {
    Outcome o;
    Rng rng(seed);
    int ok = 0;
    for (int i = 0; i < 200; ++i) {
        const PolySystem s = random_planar_quadratic(rng);
        const PolySystem x = x_factorize(s, all_indices(2));
        const auto rep = classify(x);
        if (rep.kinetic && rep.cross_negative_terms.empty() && rep.fully_x_factorable)
            ++ok;
        else
            o.check(false, "sample " + std::to_string(i));
    }
    o.detail << ok << "/200 kinetic";
    return finish(o);
}

CriterionResult dulac(std::uint64_t) {
    Outcome o;
    const auto good = PolySystem::from_terms({"x1", "x2"}, {{{1.0, {0, 0}}, {-1.0, {1, 1}}},
                                                            {{1.0, {0, 0}}, {-1.0, {1, 1}}}});
    const auto r = dulac_no_limit_cycle_test(good, 100, 10.0);
    o.check(r.verdict == DulacVerdict::no_limit_cycles, "1-x1x2 verdict " + to_string(r.verdict));
    o.check(r.dbar_min_sampled >= -1e-12, "dbar negative on grid");
    int inapplicable = 0;
    for (double k : {-0.5, -2.0}) {
        const auto b = dulac_no_limit_cycle_test(ex_cnt(k));
        if (b.verdict == DulacVerdict::inapplicable) ++inapplicable;
        o.check(b.verdict == DulacVerdict::inapplicable, "k=" + fmt(k) + " not inapplicable");
    }
    const auto cubic = PolySystem::from_terms({"x1", "x2"}, {{{1.0, {3, 0}}}, {{1.0, {0, 1}}}});
    o.check(dulac_no_limit_cycle_test(cubic).verdict == DulacVerdict::inapplicable, "cubic not inapplicable");
    o.detail << "min dbar " << fmt(r.dbar_min_sampled) << ", " << inapplicable + 1 << " violating instances inapplicable";
    return finish(o);
}

struct Entry {
    const char* key;
    const char* title;
    std::function<CriterionResult(std::uint64_t)> run;
};

const std::vector<Entry>& table() {
    static const std::vector<Entry> t{
        {"classification_table", "classification of the k-family", classification_table},
        {"canonical_round_trip", "canonical network round trip", canonical_round_trip},
        {"flow_invariance", "alpha curve invariance identity", flow_invariance},
        {"fixed_point_oracle", "fixed points against closed form", fixed_point_oracle},
        {"xfact_network", "x-factorized 9-reaction network", xfact_network},
        {"boundary_audit", "boundary fixed points after x-factorization", boundary_audit},
        {"degeneracies", "vanishing coefficients", degeneracies},
        {"melnikov", "Melnikov integral at alpha=0", melnikov},
        {"bifurcation", "limit cycle on one side of alpha=0", bifurcation},
        {"qssa_convergence", "QSSA embedding convergence", qssa_convergence},
        {"xfactor_kinetic", "x-factorization yields kinetic systems", xfactor_kinetic},
        {"dulac", "Dulac criterion", dulac},
    };
    return t;
}

}  // namespace

const std::vector<std::string>& criterion_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& e : table()) k.push_back(e.key);
        return k;
    }();
    return keys;
}

CriterionResult run_criterion(const std::string& key, std::uint64_t seed) {
    const auto& t = table();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (key != t[i].key) continue;
        CriterionResult r;
        try {
            r = t[i].run(seed);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.id = static_cast<int>(i + 1);
        r.key = t[i].key;
        r.title = t[i].title;
        return r;
    }
    throw Error("unknown criterion: " + key);
}

std::vector<CriterionResult> run_suite(const std::string& suite, std::uint64_t seed) {
    std::vector<std::string> keys;
    std::stringstream ss(suite);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "all") {
            keys.insert(keys.end(), criterion_keys().begin(), criterion_keys().end());
        } else if (std::all_of(item.begin(), item.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            const std::size_t n = std::stoul(item);
            if (n < 1 || n > criterion_keys().size()) throw Error("no criterion " + item);
            keys.push_back(criterion_keys()[n - 1]);
        } else {
            if (std::find(criterion_keys().begin(), criterion_keys().end(), item) == criterion_keys().end())
                throw Error("unknown criterion: " + item);
            keys.push_back(item);
        }
    }
    if (keys.empty()) throw Error("empty suite");
    std::vector<CriterionResult> out;
    for (const auto& k : keys) out.push_back(run_criterion(k, seed));
    return out;
}

std::string format_line(const CriterionResult& r) {
    return std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.key + ": " + r.detail;
}

}  // namespace crnforge::verify
