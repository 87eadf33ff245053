#include "crnforge/classify.hpp"

#include "crnforge/errors.hpp"
#include "crnforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crnforge {

std::vector<CrossNegativeTerm> find_cross_negative_terms(const PolySystem& sys, double tol) {
    std::vector<CrossNegativeTerm> out;
    for (std::size_t s = 0; s < sys.dimension(); ++s)
        for (const auto& t : sys.equation(s).terms())
            if (t.coeff < -tol && t.exponents[s] == 0) out.push_back({s, t});
    return out;
}

bool is_kinetic(const PolySystem& sys, double tol) { return find_cross_negative_terms(sys, tol).empty(); }

std::string to_string(Nonnegativity n) {
    switch (n) {
        case Nonnegativity::nonnegative: return "nonnegative";
        case Nonnegativity::negative: return "negative";
        case Nonnegativity::undetermined: return "undetermined";
    }
    return "undetermined";
}

std::vector<double> univariate_coefficients(const Polynomial& p, std::size_t var) {
    std::vector<double> c(p.degree_in(var) + 1, 0.0);
    for (const auto& t : p.terms()) {
        for (std::size_t i = 0; i < t.exponents.size(); ++i)
            if (i != var && t.exponents[i] != 0) throw Error("polynomial is not univariate in the requested variable");
        c[t.exponents[var]] += t.coeff;
    }
    return c;
}

namespace {

struct FaceViolation {
    double t;
    double value;
    std::pair<double, double> interval;
};

// Scale of the terms of c at t, for a relative zero test.
double term_scale(const std::vector<double>& c, double t) {
    double s = 0.0, p = 1.0;
    for (double ci : c) {
        s = std::max(s, std::abs(ci) * p);
        p *= t;
    }
    return s;
}

std::optional<FaceViolation> univariate_negative_on_halfline(const std::vector<double>& c) {
    if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; })) return std::nullopt;

    std::vector<double> bps;
    for (const auto& z : polynomial_roots(c))
        if (z.real() > 0 && std::abs(z.imag()) <= 1e-6 * std::max(1.0, std::abs(z.real()))) bps.push_back(z.real());
    std::sort(bps.begin(), bps.end());

    std::vector<double> edges{0.0};
    edges.insert(edges.end(), bps.begin(), bps.end());
    const double inf = std::numeric_limits<double>::infinity();

    auto negative_at = [&](double t) {
        const double v = horner(c, t);
        return v < -1e-12 * std::max(term_scale(c, t), 1e-300) ? std::optional<double>(v) : std::nullopt;
    };

    // Interval midpoints first, because they give clean witnesses (ex: x2 = 2).
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const double lo = edges[i];
        const double hi = i + 1 < edges.size() ? edges[i + 1] : inf;
        const double mid = std::isinf(hi) ? 2.0 * lo + 1.0 : 0.5 * (lo + hi);
        if (auto v = negative_at(mid)) return FaceViolation{mid, *v, {lo, hi}};
    }
    // Endpoints: zero and near-multiple roots where a dip may hide.
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (auto v = negative_at(edges[i])) {
            const double lo = i > 0 ? edges[i - 1] : 0.0;
            const double hi = i + 1 < edges.size() ? edges[i + 1] : inf;
            return FaceViolation{edges[i], *v, {lo, hi}};
        }
    return std::nullopt;
}

// Compass search minimising p over [0, upper]^free, starting from x.
void local_minimize(const Polynomial& p, std::vector<double>& x, const std::vector<std::size_t>& free_vars,
                    double upper, int rounds) {
    double best = p.evaluate(x);
    for (int r = 0; r < rounds; ++r) {
        double step = std::max(1e-3, 0.25 * *std::max_element(x.begin(), x.end()));
        for (int it = 0; it < 60 && step > 1e-12; ++it) {
            bool improved = false;
            for (std::size_t v : free_vars) {
                for (double sgn : {1.0, -1.0}) {
                    const double old = x[v];
                    x[v] = std::clamp(old + sgn * step, 0.0, upper);
                    const double val = p.evaluate(x);
                    if (val < best) {
                        best = val;
                        improved = true;
                    } else {
                        x[v] = old;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
    }
}

}  // namespace

NonnegativityResult check_cross_negative_effect(const PolySystem& sys, const FaceSamplingOptions& opt) {
    NonnegativityResult res;
    const std::size_t n = sys.dimension();
    const auto cross = find_cross_negative_terms(sys);
    bool any_undetermined = false;

    for (std::size_t s = 0; s < n; ++s) {
        const bool has_cross = std::any_of(cross.begin(), cross.end(), [&](const auto& c) { return c.equation == s; });
        if (!has_cross) continue;  // every term on the face is nonnegative
        const Polynomial face = sys.equation(s).restrict(s, 0.0);

        if (n == 1) {
            const double v = face.evaluate(std::vector<double>{0.0});
            if (v < 0) res.witnesses.push_back({s, {0.0}, v, std::nullopt});
            continue;
        }
        if (n == 2) {
            const std::size_t o = 1 - s;
            const auto viol = univariate_negative_on_halfline(univariate_coefficients(face, o));
            if (!viol) continue;
            std::vector<double> x(2, 0.0);
            x[o] = viol->t;
            const double v = sys.equation(s).evaluate(x);
            if (v < 0) res.witnesses.push_back({s, x, v, viol->interval});
            continue;
        }

        // Three or more variables: log grid plus local refinement.
        std::vector<std::size_t> free_vars;
        for (std::size_t i = 0; i < n; ++i)
            if (i != s) free_vars.push_back(i);
        const std::size_t dims = free_vars.size();
        std::size_t per_axis = static_cast<std::size_t>(
            std::floor(std::pow(static_cast<double>(opt.max_points), 1.0 / static_cast<double>(dims))));
        per_axis = std::clamp<std::size_t>(per_axis, 3, 60);
        std::vector<double> axis{0.0};
        const std::size_t logs = per_axis - 1;
        for (std::size_t k = 0; k < logs; ++k) {
            const double e = -3.0 + (std::log10(opt.upper) + 3.0) * static_cast<double>(k) /
                                        static_cast<double>(std::max<std::size_t>(1, logs - 1));
            axis.push_back(std::pow(10.0, e));
        }
        std::vector<std::size_t> idx(dims, 0);
        std::vector<double> x(n, 0.0), worst_x;
        double worst = std::numeric_limits<double>::infinity();
        while (true) {
            for (std::size_t d = 0; d < dims; ++d) x[free_vars[d]] = axis[idx[d]];
            const double v = face.evaluate(x);
            if (v < worst) {
                worst = v;
                worst_x = x;
            }
            std::size_t d = 0;
            while (d < dims && ++idx[d] == axis.size()) idx[d++] = 0;
            if (d == dims) break;
        }
        local_minimize(face, worst_x, free_vars, opt.upper, opt.local_rounds);
        const double v = sys.equation(s).evaluate(worst_x);
        if (v < 0) {
            res.witnesses.push_back({s, worst_x, v, std::nullopt});
        } else {
            any_undetermined = true;
        }
    }

    if (!res.witnesses.empty()) {
        res.verdict = Nonnegativity::negative;
        res.exact = true;
    } else if (any_undetermined) {
        res.verdict = Nonnegativity::undetermined;
        res.exact = false;
    } else {
        res.verdict = Nonnegativity::nonnegative;
        res.exact = true;
    }
    return res;
}

XFactorability check_x_factorable(const PolySystem& sys) {
    XFactorability r;
    for (std::size_t s = 0; s < sys.dimension(); ++s) {
        const auto& terms = sys.equation(s).terms();
        if (std::all_of(terms.begin(), terms.end(), [&](const Monomial& m) { return m.exponents[s] >= 1; }))
            r.factorable.insert(s);
    }
    r.fully = r.factorable.size() == sys.dimension();
    return r;
}

ClassificationReport classify(const PolySystem& sys, const FaceSamplingOptions& opt) {
    ClassificationReport rep;
    rep.cross_negative_terms = find_cross_negative_terms(sys);
    rep.kinetic = rep.cross_negative_terms.empty();
    const auto nn = check_cross_negative_effect(sys, opt);
    rep.nonnegative = nn.verdict;
    rep.nonnegativity_exact = nn.exact;
    rep.cross_negative_effect_witnesses = nn.witnesses;
    const auto xf = check_x_factorable(sys);
    rep.x_factorable_components = xf.factorable;
    rep.fully_x_factorable = xf.fully;
    return rep;
}

}  // namespace crnforge
