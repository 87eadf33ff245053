#include "crnforge/transform.hpp"

#include "crnforge/classify.hpp"
#include "crnforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace crnforge {

ConstraintSet& ConstraintSet::add(std::string name, std::function<double(const ParamBundle&)> value, bool strict) {
    preds_.push_back({std::move(name), std::move(value), strict});
    return *this;
}

std::vector<std::string> ConstraintSet::failures(const ParamBundle& p) const {
    std::vector<std::string> out;
    for (const auto& pr : preds_) {
        const double v = pr.value(p);
        const bool ok = pr.strict ? v > 0.0 : v >= 0.0;
        if (!ok || std::isnan(v)) out.push_back(pr.name);
    }
    return out;
}

void ConstraintSet::require(const ParamBundle& p) const {
    auto f = failures(p);
    if (!f.empty()) throw ConstraintViolation(std::move(f));
}

std::string step_kind(const TransformStep& s) {
    switch (s.index()) {
        case 0: return "affine";
        case 1: return "xfactor";
        default: return "qssa";
    }
}

TransformSpec TransformSpec::from_composition(std::vector<TransformStep> written) {
    std::reverse(written.begin(), written.end());
    return TransformSpec{std::move(written)};
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

PolySystem x_factorize(const PolySystem& sys, const std::vector<std::size_t>& subset) {
    if (subset.empty()) throw Error("x_factorize: subset must be nonempty");
    const std::size_t n = sys.dimension();
    std::set<std::size_t> sel;
    for (auto i : subset) {
        if (i >= n) throw DimensionMismatch("x_factorize: index out of range");
        sel.insert(i);
    }
    std::vector<Polynomial> eqs = sys.equations();
    for (auto i : sel) eqs[i] = eqs[i] * Polynomial::variable(sys.variable_list(), i);
    return PolySystem(sys.variable_list(), std::move(eqs), sys.param_meta());
}

namespace {

struct QssaLayout {
    std::vector<std::size_t> equations;  // equation owning each new variable
    std::vector<std::string> names;
};

QssaLayout qssa_layout(const PolySystem& sys, const QssaSpec& spec) {
    QssaLayout l;
    std::set<std::size_t> eqs;
    for (const auto& t : spec.targets) {
        if (t.equation >= sys.dimension()) throw DimensionMismatch("qssa target equation out of range");
        eqs.insert(t.equation);
    }
    l.equations.assign(eqs.begin(), eqs.end());
    if (spec.omega.size() != l.equations.size())
        throw Error("qssa: need one omega per new variable (" + std::to_string(l.equations.size()) + ")");
    if (!spec.p.empty() && spec.p.size() != l.equations.size())
        throw Error("qssa: need one p polynomial per new variable");
    if (!spec.names.empty() && spec.names.size() != l.equations.size())
        throw Error("qssa: need one name per new variable");
    for (std::size_t k = 0; k < l.equations.size(); ++k)
        l.names.push_back(spec.names.empty() ? "y" + std::to_string(l.equations[k] + 1) : spec.names[k]);
    return l;
}

Polynomial p_of(const PolySystem& sys, const QssaSpec& spec, std::size_t k) {
    if (spec.p.empty()) return Polynomial::constant(sys.variable_list(), 1.0);
    if (!same_variables(spec.p[k].variable_list(), sys.variable_list()))
        throw DimensionMismatch("qssa: p must be a polynomial over the system variables");
    return spec.p[k];
}

void check_positive_on_orthant(const Polynomial& p, const std::string& name) {
    const std::size_t n = p.num_variables();
    const double levels[] = {0.0, 1e-3, 0.1, 1.0, 10.0, 1e3};
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) x[i] = levels[idx[i]];
        if (!(p.evaluate(x) > 0.0)) throw PNotPositive("qssa: p for " + name + " is not strictly positive on the nonnegative orthant");
        std::size_t d = 0;
        while (d < n && ++idx[d] == std::size(levels)) idx[d++] = 0;
        if (d == n || n == 0) break;
    }
}

}  // namespace

PolySystem qssa_embed(const PolySystem& sys, const QssaSpec& spec) {
    if (!(spec.mu > 0.0)) throw Error("qssa: mu must be positive");
    for (double w : spec.omega)
        if (!(w > 0.0)) throw Error("qssa: omega must be positive");
    const QssaLayout layout = qssa_layout(sys, spec);
    const std::size_t n = sys.dimension();
    const std::size_t m = layout.equations.size();

    for (const auto& t : spec.targets) {
        const double c = sys.equation(t.equation).coefficient(t.exponents);
        if (t.exponents.size() != n) throw DimensionMismatch("qssa: selector exponent length mismatch");
        if (!(c < 0.0) || t.exponents[t.equation] != 0) {
            std::ostringstream os;
            os << "qssa: selected term in equation " << t.equation << " is not cross-negative (coefficient " << c << ")";
            throw TermNotCrossNegative(os.str());
        }
    }

    std::vector<std::string> names = sys.variables();
    for (const auto& nm : layout.names) names.push_back(nm);
    const VariableList wide = make_variables(names);

    std::vector<Polynomial> ps;
    for (std::size_t k = 0; k < m; ++k) {
        ps.push_back(p_of(sys, spec, k));
        check_positive_on_orthant(ps.back(), layout.names[k]);
    }

    std::vector<Polynomial> eqs;
    for (std::size_t s = 0; s < n; ++s) {
        const Polynomial& eq = sys.equation(s);
        std::vector<Monomial> kept;
        Polynomial replaced(wide);
        const auto pos = std::find(layout.equations.begin(), layout.equations.end(), s);
        for (const auto& term : eq.terms()) {
            bool selected = false;
            for (const auto& t : spec.targets) selected = selected || (t.equation == s && t.exponents == term.exponents);
            if (!selected) {
                Monomial w{term.coeff, term.exponents};
                w.exponents.resize(n + m, 0);
                kept.push_back(std::move(w));
                continue;
            }
            const std::size_t k = static_cast<std::size_t>(pos - layout.equations.begin());
            // ω⁻¹ x_s p(x) y_s b x^β
            Exponents e = term.exponents;
            e.resize(n + m, 0);
            e[s] += 1;
            e[n + k] += 1;
            Polynomial mono(wide, {{term.coeff / spec.omega[k], e}});
            replaced += mono * ps[k].extend(wide);
        }
        eqs.push_back(Polynomial(wide, std::move(kept)) + replaced);
    }
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t s = layout.equations[k];
        // μ⁻¹(ω − x_s p(x) y_s)
        Polynomial xy = Polynomial::variable(wide, s) * Polynomial::variable(wide, n + k) * ps[k].extend(wide);
        Polynomial e = Polynomial::constant(wide, spec.omega[k] / spec.mu) - xy * (1.0 / spec.mu);
        eqs.push_back(std::move(e));
    }

    ParamMeta meta = sys.param_meta();
    meta["mu"] = spec.mu;
    for (std::size_t k = 0; k < m; ++k) meta["omega_" + layout.names[k]] = spec.omega[k];
    return PolySystem(wide, std::move(eqs), std::move(meta));
}

std::vector<double> qssa_slow_manifold(const PolySystem& sys, const QssaSpec& spec, std::span<const double> x) {
    const QssaLayout layout = qssa_layout(sys, spec);
    std::vector<double> y;
    for (std::size_t k = 0; k < layout.equations.size(); ++k) {
        const double den = x[layout.equations[k]] * p_of(sys, spec, k).evaluate(x);
        if (!(den > 0.0)) throw Error("qssa: slow manifold undefined where x_s p_s(x) <= 0");
        y.push_back(spec.omega[k] / den);
    }
    return y;
}

TransformResult apply(const TransformSpec& spec, const PolySystem& sys) {
    TransformResult r{sys, {}};
    for (const auto& step : spec.steps) {
        StepRecord rec{step_kind(step), r.system.dimension(), 0, r.system.degree(), 0};
        if (const auto* a = std::get_if<AffineStep>(&step)) {
            r.system = substitute_affine(r.system, a->map, a->mode);
        } else if (const auto* x = std::get_if<XFactorStep>(&step)) {
            r.system = x_factorize(r.system, x->indices);
        } else {
            r.system = qssa_embed(r.system, std::get<QssaStep>(step).spec);
        }
        rec.dimension_after = r.system.dimension();
        rec.degree_after = r.system.degree();
        r.ledger.push_back(rec);
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

int sgn(double v) { return (v > 0) - (v < 0); }

Eigen::MatrixXd to_dyn(const Eigen::Matrix2d& m) { return Eigen::MatrixXd(m); }

}  // namespace

XFactorAudit xfact_fixed_point_audit(const PolySystem& sys, const std::vector<std::array<double, 2>>& interior_points) {
    if (sys.dimension() != 2) throw UnsupportedDimension("xfact_fixed_point_audit needs a planar system");
    XFactorAudit audit;
    const PolyMatrix jac = jacobian(sys);
    const PolySystem k = x_factorize(sys, {0, 1});
    const PolyMatrix jac_k = jacobian(k);

    for (const auto& p : interior_points) {
        InteriorAudit ia;
        ia.point = p;
        const Eigen::MatrixXd j = jacobian_at(jac, p);
        ia.jacobian = j;
        ia.sign_pattern = {sgn(j(0, 0)), sgn(j(0, 1)), sgn(j(1, 0)), sgn(j(1, 1))};
        Eigen::Matrix2d xj = Eigen::Vector2d(p[0], p[1]).asDiagonal() * ia.jacobian;
        ia.type_before = classify_eigenvalues(eigenvalues(j));
        ia.type_after = classify_eigenvalues(eigenvalues(to_dyn(xj)));
        ia.saddle_invariant = (ia.type_before == FixedPointType::saddle) == (ia.type_after == FixedPointType::saddle);
        ia.stability_condition = j(0, 0) * j(1, 1) >= 0;
        ia.type_condition = j(0, 1) * j(1, 0) >= 0;
        ia.stability_preserved = is_stable(ia.type_before) == is_stable(ia.type_after);
        ia.type_preserved = ia.type_before == ia.type_after;
        audit.interior.push_back(ia);
    }

    auto boundary_point = [&](std::array<double, 2> x, bool origin) {
        BoundaryAudit b;
        b.point = x;
        b.origin = origin;
        b.in_nonnegative_orthant = x[0] >= 0 && x[1] >= 0;
        b.eigenvalues = eigenvalues(jacobian_at(jac_k, x));
        b.type = classify_eigenvalues(b.eigenvalues);
        if (origin) {
            b.origin_eigenvalues = {sys.equation(0).evaluate(x), sys.equation(1).evaluate(x)};
        } else {
            // i: the vanishing coordinate, j: the free one.
            const std::size_t i = x[0] == 0.0 ? 0 : 1;
            const std::size_t jj = 1 - i;
            b.node_criterion = sys.equation(i).evaluate(x) * jac[jj][jj].evaluate(x);
            b.criterion_says_node = b.node_criterion > 0;
            if (b.in_nonnegative_orthant && b.type != FixedPointType::degenerate)
                b.criterion_agrees = b.criterion_says_node == is_node(b.type);
        }
        audit.boundary.push_back(b);
    };

    boundary_point({0.0, 0.0}, true);
    for (std::size_t i = 0; i < 2; ++i) {
        const std::size_t j = 1 - i;
        // x_i = 0 and P_j = 0 on that axis.
        const Polynomial face = sys.equation(j).restrict(i, 0.0);
        if (face.is_zero()) continue;  // whole axis fixed; not isolated
        for (double r : real_roots(univariate_coefficients(face, j))) {
            if (std::abs(r) < 1e-12) continue;
            std::array<double, 2> x{0.0, 0.0};
            x[j] = r;
            boundary_point(x, false);
        }
    }
    return audit;
}

}  // namespace crnforge
