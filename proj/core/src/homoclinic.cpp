#include "crnforge/homoclinic.hpp"

#include "crnforge/errors.hpp"

#include <algorithm>
#include <cmath>

namespace crnforge::casestudy {

namespace {

const double kLoopHalfWidth = 2.0 * std::sqrt(3.0) / 9.0;

void require_regime(double a) {
    if (!(a > -1.0 && a < 0.0)) throw RegimeError("parameter a must lie in (-1, 0)");
}

// "0" -> 1, "1" -> x1, "12" -> x1 x2, ...
Exponents subscript_exponents(const std::string& sub) {
    Exponents e(2, 0);
    for (char c : sub)
        if (c == '1')
            ++e[0];
        else if (c == '2')
            ++e[1];
    return e;
}

struct CoeffName {
    std::string sub;
    std::size_t eq;  // 0-based
};

CoeffName split_name(const std::string& name) {
    const auto caret = name.find('^');
    return {name.substr(1, caret - 1), static_cast<std::size_t>(std::stoi(name.substr(caret + 1)) - 1)};
}

}  // namespace

ParamBundle CaseStudyParams::bundle() const {
    return {{"a", a},           {"alpha", alpha},   {"t1", t1},       {"t2", t2}, {"t", t},
            {"omega1", omega1}, {"omega2", omega2}, {"omega", omega}, {"mu", mu}};
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::translated: return "translated";
        case Variant::xfact: return "xfact";
        case Variant::sheared_xfact: return "sheared_xfact";
        case Variant::qssa: return "qssa";
        case Variant::hybrid: return "hybrid";
    }
    return "translated";
}

Variant variant_from_string(const std::string& s) {
    for (auto v : {Variant::translated, Variant::xfact, Variant::sheared_xfact, Variant::qssa, Variant::hybrid})
        if (to_string(v) == s) return v;
    throw Error("unknown variant: " + s);
}

double lookup(const CoefficientRecord& rec, const std::string& name) {
    for (const auto& [n, v] : rec)
        if (n == name) return v;
    throw Error("coefficient not in record: " + name);
}

VariableList planar_variables() {
    static const VariableList v = make_variables({"x1", "x2"});
    return v;
}

Polynomial alpha_curve() {
    return Polynomial(planar_variables(), {{-1.0, {2, 0}}, {1.0, {0, 2}}, {1.0, {0, 3}}});
}

double alpha_branch_plus(double x2) { return x2 * std::sqrt(1.0 + x2); }
double alpha_branch_minus(double x2) { return -x2 * std::sqrt(1.0 + x2); }

PolySystem base_system(double a) {
    if (!(a * a < 1.0)) throw RegimeError("base system requires a^2 < 1");
    const auto v = planar_variables();
    Polynomial p1(v, {{a, {1, 0}}, {1.0, {0, 1}}, {1.5 * a, {1, 1}}, {1.5, {0, 2}}});
    Polynomial p2(v, {{1.0, {1, 0}}, {a, {0, 1}}, {a, {0, 2}}});
    return PolySystem(v, {p1, p2}, {{"a", a}});
}

PolySystem perturbed_system(double a, double alpha) {
    return perturbed_system(a, alpha, Polynomial::variable(planar_variables(), 0));
}

PolySystem perturbed_system(double a, double alpha, const Polynomial& f) {
    const PolySystem base = base_system(a);
    std::vector<Polynomial> eqs = base.equations();
    eqs[0] += f * alpha;
    return PolySystem(base.variable_list(), std::move(eqs), {{"a", a}, {"alpha", alpha}});
}

std::vector<ClosedFormFixedPoint> fixed_points_closed_form(double a) {
    require_regime(a);
    const double ai2 = 1.0 / (a * a);
    return {
        {{0.0, 0.0}, FixedPointType::saddle, "saddle"},
        {{2.0 * a / 9.0, -2.0 / 3.0}, FixedPointType::unstable_spiral, "spiral"},
        {{(1.0 - ai2) / a, -1.0 + ai2}, FixedPointType::stable_node, "node"},
    };
}

double saddle_quantity(double a) { return 2.0 * a; }

double separation_distance(double a) {
    require_regime(a);
    return std::abs((1.0 - a * a) * std::sqrt(1.0 + a * a) / (a * a * a));
}

CoefficientRecord translated_coefficients(double a, double alpha, double t1, double t2) {
    return {
        {"k0^1", 0.5 * (3.0 * (t2 - 2.0 / 3.0) * (a * t1 + t2) - 2.0 * alpha * t1)},
        {"k0^2", -t1 + a * t2 * (t2 - 1.0)},
        {"k1^1", -1.5 * a * (t2 - 2.0 / 3.0) + alpha},
        {"k1^2", 1.0},
        {"k2^1", 1.0 - 1.5 * (a * t1 + 2.0 * t2)},
        {"k2^2", -2.0 * a * (t2 - 0.5)},
        {"k12^1", 1.5 * a},
        {"k22^1", 1.5},
        {"k22^2", a},
    };
}

CoefficientRecord sheared_coefficients(double a, double alpha, double t) {
    const double a2 = a * a;
    return {
        {"k0^1", 0.5 * t * (-2.0 + a * (2.0 * alpha + t + a * (2.0 + 5.0 * t) + 4.0 * t * a2))},
        {"k0^2", -0.5 * t * (2.0 + 2.0 * alpha + 3.0 * t + a * (4.0 + 9.0 * t + 6.0 * t * a))},
        {"k1^1", -0.5 * t * a * (2.0 + 5.0 * a)},
        {"k1^2", 1.0 + 4.5 * t * (2.0 / 3.0 + a)},
        {"k2^1", 1.0 - 0.5 * a * (2.0 * alpha + a * (2.0 + 5.0 * t + 8.0 * t * a))},
        {"k2^2", alpha + a * (2.0 + 4.5 * t + 6.0 * t * a)},
        {"k11^1", 0.5 * a},
        {"k11^2", -1.5},
        {"k12^1", 2.5 * a2},
        {"k12^2", -4.5 * a},
        {"k22^1", 2.0 * a2 * a},
        {"k22^2", -3.0 * a2},
    };
}

AffineMap sheared_map(double a, double t) {
    Eigen::Matrix2d s2, q;
    s2 << 1.0, 0.0, -a, 1.0;
    q << 0.0, -1.0, -1.0, 0.0;
    return {Eigen::MatrixXd(q * s2), Eigen::Vector2d(t, t)};
}

// ---------------------------------------------------------------------------

namespace {

double get(const ParamBundle& p, const char* k) { return p.at(k); }

ConstraintSet& add_regime(ConstraintSet& c) {
    c.add("a>-1", [](const ParamBundle& p) { return get(p, "a") + 1.0; });
    c.add("a<0", [](const ParamBundle& p) { return -get(p, "a"); });
    return c;
}

double xfact_t2_upper(const ParamBundle& p) {
    const double a = get(p, "a"), t1 = get(p, "t1");
    return 2.0 / 3.0 + (8.0 / 3.0) / (a * a) * (3.0 - a * a) * (a + 4.0 * t1);
}

}  // namespace

ConstraintSet translation_constraints() {
    ConstraintSet c("translation");
    c.add("T1>0", [](const ParamBundle& p) { return get(p, "t1"); });
    c.add("T2>1", [](const ParamBundle& p) { return get(p, "t2") - 1.0; });
    return c;
}

ConstraintSet translated_constraints() {
    ConstraintSet c("translated");
    add_regime(c);
    c.add("T1>2sqrt3/9", [](const ParamBundle& p) { return get(p, "t1") - kLoopHalfWidth; });
    c.add("T2>1", [](const ParamBundle& p) { return get(p, "t2") - 1.0; });
    return c;
}

ConstraintSet xfact_constraints() {
    ConstraintSet c("xfact");
    add_regime(c);
    c.add("T1>2sqrt3/9", [](const ParamBundle& p) { return get(p, "t1") - kLoopHalfWidth; });
    c.add("T2>max(1,-a*T1)",
          [](const ParamBundle& p) { return get(p, "t2") - std::max(1.0, -get(p, "a") * get(p, "t1")); });
    c.add("T2<2/3+(8/3)a^-2(3-a^2)(a+4T1)", [](const ParamBundle& p) { return xfact_t2_upper(p) - get(p, "t2"); });
    return c;
}

ConstraintSet sheared_constraints() {
    ConstraintSet c("sheared_xfact");
    c.add("a>-1", [](const ParamBundle& p) { return get(p, "a") + 1.0; });
    c.add("a<-1/2", [](const ParamBundle& p) { return -0.5 - get(p, "a"); });
    c.add("T>max(1,2a^-2(1-a^2))", [](const ParamBundle& p) {
        const double a = get(p, "a");
        return get(p, "t") - std::max(1.0, 2.0 / (a * a) * (1.0 - a * a));
    });
    c.add("T<2a^-1(1+4a)^-1(1-a)", [](const ParamBundle& p) {
        const double a = get(p, "a");
        return 2.0 / a / (1.0 + 4.0 * a) * (1.0 - a) - get(p, "t");
    });
    return c;
}

ConstraintSet qssa_constraints() {
    ConstraintSet c("qssa");
    add_regime(c);
    c.add("T1>2sqrt3/9", [](const ParamBundle& p) { return get(p, "t1") - kLoopHalfWidth; });
    c.add("T1<-T2*a", [](const ParamBundle& p) { return -get(p, "t2") * get(p, "a") - get(p, "t1"); });
    c.add("T2>1", [](const ParamBundle& p) { return get(p, "t2") - 1.0; });
    for (const char* k : {"omega1", "omega2", "mu"})
        c.add(std::string(k) + ">0", [k](const ParamBundle& p) { return get(p, k); });
    return c;
}

ConstraintSet hybrid_constraints() {
    ConstraintSet c("hybrid");
    add_regime(c);
    c.add("T1>2sqrt3/9", [](const ParamBundle& p) { return get(p, "t1") - kLoopHalfWidth; });
    c.add("T2>1", [](const ParamBundle& p) { return get(p, "t2") - 1.0; });
    c.add("T2<2/3+(8/3)a^-2(3-a^2)(a+4T1)", [](const ParamBundle& p) { return xfact_t2_upper(p) - get(p, "t2"); });
    for (const char* k : {"omega", "mu"})
        c.add(std::string(k) + ">0", [k](const ParamBundle& p) { return get(p, k); });
    return c;
}

ConstraintSet constraints_for(Variant v) {
    switch (v) {
        case Variant::translated: return translated_constraints();
        case Variant::xfact: return xfact_constraints();
        case Variant::sheared_xfact: return sheared_constraints();
        case Variant::qssa: return qssa_constraints();
        case Variant::hybrid: return hybrid_constraints();
    }
    return translated_constraints();
}

VariantBuild build_variant(const CaseStudyParams& p, Variant v, bool check_constraints) {
    VariantBuild b{v, PolySystem(), constraints_for(v), {}, {}, {}};
    if (check_constraints) b.constraints.require(p.bundle());

    const PolySystem start = perturbed_system(p.a, p.alpha);
    const AffineStep translate{AffineMap::translation_only(Eigen::Vector2d(p.t1, p.t2))};
    ParamMeta meta = start.param_meta();

    switch (v) {
        case Variant::translated:
            b.spec.steps = {translate};
            b.coefficients = translated_coefficients(p.a, p.alpha, p.t1, p.t2);
            meta["t1"] = p.t1;
            meta["t2"] = p.t2;
            break;
        case Variant::xfact:
            b.spec.steps = {translate, XFactorStep{{0, 1}}};
            b.coefficients = translated_coefficients(p.a, p.alpha, p.t1, p.t2);
            meta["t1"] = p.t1;
            meta["t2"] = p.t2;
            break;
        case Variant::sheared_xfact:
            b.spec.steps = {AffineStep{sheared_map(p.a, p.t)}, XFactorStep{{0, 1}}};
            b.coefficients = sheared_coefficients(p.a, p.alpha, p.t);
            meta["t"] = p.t;
            break;
        case Variant::qssa:
            b.qssa.targets = {{0, {0, 1}}, {1, {0, 0}}};
            b.qssa.omega = {p.omega1, p.omega2};
            b.qssa.mu = p.mu;
            b.qssa.names = {"y1", "y2"};
            b.spec.steps = {translate, QssaStep{b.qssa}};
            b.coefficients = translated_coefficients(p.a, p.alpha, p.t1, p.t2);
            meta["t1"] = p.t1;
            meta["t2"] = p.t2;
            break;
        case Variant::hybrid:
            b.qssa.targets = {{1, {0, 0}}};
            b.qssa.omega = {p.omega};
            b.qssa.mu = p.mu;
            b.qssa.names = {"y"};
            b.spec.steps = {translate, XFactorStep{{0}}, QssaStep{b.qssa}};
            b.coefficients = translated_coefficients(p.a, p.alpha, p.t1, p.t2);
            meta["t1"] = p.t1;
            meta["t2"] = p.t2;
            break;
    }
    const PolySystem sys = apply(b.spec, start).system;
    for (const auto& [k, val] : sys.param_meta()) meta[k] = val;
    b.system = sys.with_param_meta(std::move(meta));
    return b;
}

// ---------------------------------------------------------------------------

std::string to_string(PublishedNetwork n) {
    switch (n) {
        case PublishedNetwork::xfact: return "xfact";
        case PublishedNetwork::sheared_xfact: return "sheared_xfact";
        case PublishedNetwork::hybrid: return "hybrid";
    }
    return "xfact";
}

PublishedNetwork published_network_from_string(const std::string& s) {
    for (auto n : {PublishedNetwork::xfact, PublishedNetwork::sheared_xfact, PublishedNetwork::hybrid})
        if (to_string(n) == s) return n;
    throw Error("unknown network: " + s);
}

namespace {

struct TermSpec {
    std::size_t eq;
    Exponents reactant;
    double value;  // signed coefficient
};

ReactionNetwork emit(const std::vector<std::string>& species, const std::vector<TermSpec>& terms) {
    std::vector<Reaction> rs;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        if (t.value == 0.0) continue;  // zero rate: reaction absent
        Reaction r;
        r.id = "r" + std::to_string(i + 1);
        r.reactant.stoichiometry = t.reactant;
        r.product.stoichiometry = t.reactant;
        if (t.value > 0)
            r.product.stoichiometry[t.eq] += 1;
        else if (r.product.stoichiometry[t.eq] == 0)
            throw NotKinetic("published network would need a cross-negative reaction", {{t.eq, t.value, t.reactant}});
        else
            r.product.stoichiometry[t.eq] -= 1;
        r.rate = std::abs(t.value);
        rs.push_back(std::move(r));
    }
    return ReactionNetwork(species, std::move(rs));
}

// x_n-factorized term for coefficient "k<sub>^<n>".
TermSpec xterm(const CoefficientRecord& rec, const std::string& name, std::size_t dim = 2) {
    const auto cn = split_name(name);
    Exponents e = subscript_exponents(cn.sub);
    e.resize(dim, 0);
    e[cn.eq] += 1;
    return {cn.eq, e, lookup(rec, name)};
}

}  // namespace

ReactionNetwork published_network(const CaseStudyParams& p, PublishedNetwork which, bool check_constraints) {
    switch (which) {
        case PublishedNetwork::xfact: {
            if (check_constraints) xfact_constraints().require(p.bundle());
            const auto rec = translated_coefficients(p.a, p.alpha, p.t1, p.t2);
            std::vector<TermSpec> t;
            for (const char* n : {"k0^1", "k0^2", "k1^1", "k1^2", "k2^1", "k2^2", "k12^1", "k22^1", "k22^2"})
                t.push_back(xterm(rec, n));
            return emit({"x1", "x2"}, t);
        }
        case PublishedNetwork::sheared_xfact: {
            if (check_constraints) sheared_constraints().require(p.bundle());
            const auto rec = sheared_coefficients(p.a, p.alpha, p.t);
            std::vector<TermSpec> t;
            for (const char* n : {"k0^1", "k0^2", "k1^1", "k1^2", "k2^1", "k2^2", "k11^1", "k11^2", "k12^1", "k12^2",
                                  "k22^1", "k22^2"})
                t.push_back(xterm(rec, n));
            return emit({"x1", "x2"}, t);
        }
        case PublishedNetwork::hybrid: {
            if (check_constraints) hybrid_constraints().require(p.bundle());
            const auto rec = translated_coefficients(p.a, p.alpha, p.t1, p.t2);
            std::vector<TermSpec> t;
            t.push_back(xterm(rec, "k0^1", 3));
            t.push_back({1, {0, 1, 1}, lookup(rec, "k0^2") / p.omega});
            t.push_back(xterm(rec, "k1^1", 3));
            t.push_back({1, {1, 0, 0}, lookup(rec, "k1^2")});
            t.push_back(xterm(rec, "k2^1", 3));
            t.push_back({1, {0, 1, 0}, lookup(rec, "k2^2")});
            t.push_back(xterm(rec, "k12^1", 3));
            t.push_back(xterm(rec, "k22^1", 3));
            t.push_back({1, {0, 2, 0}, lookup(rec, "k22^2")});
            t.push_back({2, {0, 0, 0}, p.omega / p.mu});
            t.push_back({2, {0, 1, 1}, -1.0 / p.mu});
            return emit({"x1", "x2", "y"}, t);
        }
    }
    throw Error("unknown network");
}

}  // namespace crnforge::casestudy
