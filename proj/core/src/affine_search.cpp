#include "crnforge/errors.hpp"
#include "crnforge/transform.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace crnforge {

namespace {

// Dense planar coefficients c[s][i][j] of x1^i x2^j.
struct Dense {
    std::size_t m = 0;
    std::vector<double> c;  // (2, m+1, m+1)
    double& at(std::size_t s, std::size_t i, std::size_t j) { return c[(s * (m + 1) + i) * (m + 1) + j]; }
    double at(std::size_t s, std::size_t i, std::size_t j) const { return c[(s * (m + 1) + i) * (m + 1) + j]; }
};

Dense to_dense(const PolySystem& sys) {
    Dense d;
    d.m = sys.degree();
    d.c.assign(2 * (d.m + 1) * (d.m + 1), 0.0);
    for (std::size_t s = 0; s < 2; ++s)
        for (const auto& t : sys.equation(s).terms()) d.at(s, t.exponents[0], t.exponents[1]) = t.coeff;
    return d;
}

std::vector<std::vector<double>> binomials(std::size_t m) {
    std::vector<std::vector<double>> b(m + 1, std::vector<double>(m + 1, 0.0));
    for (std::size_t n = 0; n <= m; ++n) {
        b[n][0] = 1.0;
        for (std::size_t k = 1; k <= n; ++k) b[n][k] = b[n - 1][k - 1] + (k <= n - 1 ? b[n - 1][k] : 0.0);
    }
    return b;
}

// Is d(x̄ - T) free of cross-negative terms?
bool shifted_is_kinetic(const Dense& d, const std::vector<std::vector<double>>& binom, double t1, double t2, double tol) {
    const std::size_t m = d.m;
    double p1[16], p2[16];
    p1[0] = p2[0] = 1.0;
    for (std::size_t k = 1; k <= m; ++k) {
        p1[k] = p1[k - 1] * -t1;
        p2[k] = p2[k - 1] * -t2;
    }
    auto coeff = [&](std::size_t s, std::size_t i, std::size_t j, double& scale) {
        double v = 0.0;
        scale = 0.0;
        for (std::size_t k = i; k <= m; ++k)
            for (std::size_t l = j; k + l <= m; ++l) {
                const double c = d.at(s, k, l);
                if (c == 0.0) continue;
                const double term = c * binom[k][i] * binom[l][j] * p1[k - i] * p2[l - j];
                v += term;
                scale += std::abs(term);
            }
        return v;
    };
    for (std::size_t j = 0; j <= m; ++j) {
        double scale;
        if (coeff(0, 0, j, scale) < -tol * std::max(1.0, scale)) return false;
    }
    for (std::size_t i = 0; i <= m; ++i) {
        double scale;
        if (coeff(1, i, 0, scale) < -tol * std::max(1.0, scale)) return false;
    }
    return true;
}

Eigen::Matrix2d orthogonal(double theta, bool reflect) {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix2d q;
    if (reflect)
        q << c, s, s, -c;
    else
        q << c, -s, s, c;
    return q;
}

// The system's own parameters (e.g. a) plus the search coordinates.
ParamBundle bundle(const ParamMeta& meta, double t1, double t2, double theta, bool reflect) {
    ParamBundle b(meta.begin(), meta.end());
    b["t1"] = t1;
    b["t2"] = t2;
    b["theta"] = theta;
    b["reflect"] = reflect ? 1.0 : 0.0;
    return b;
}

}  // namespace

AffineSearchResult affine_kinetic_search(const PolySystem& sys, const ConstraintSet& constraints,
                                         const AffineSearchOptions& opt) {
    if (sys.dimension() != 2) throw UnsupportedDimension("affine_kinetic_search is implemented for planar systems");
    if (sys.degree() > 15) throw UnsupportedDimension("affine_kinetic_search: degree above 15");
    AffineSearchResult res;
    const ParamMeta& meta = sys.param_meta();
    const std::size_t budget = opt.budget ? opt.budget : std::numeric_limits<std::size_t>::max();

    auto accept = [&](double t1, double t2, double theta, bool reflect) {
        return constraints.satisfied(bundle(meta, t1, t2, theta, reflect));
    };
    auto finish = [&](const Eigen::Matrix2d& q, double t1, double t2, double theta, bool reflect) {
        res.found = true;
        res.angle = theta;
        res.reflection = reflect;
        res.witness = AffineMap{Eigen::MatrixXd(q), Eigen::Vector2d(t1, t2)};
        return res;
    };

    // Index 0: the identity.
    res.evaluations = 1;
    {
        const Dense d = to_dense(sys);
        const auto binom = binomials(d.m);
        if (shifted_is_kinetic(d, binom, 0.0, 0.0, opt.kinetic_tol) && accept(0.0, 0.0, 0.0, false))
            return finish(Eigen::Matrix2d::Identity(), 0.0, 0.0, 0.0, false);
    }

    std::vector<double> grid(opt.grid);
    for (std::size_t i = 0; i < opt.grid; ++i)
        grid[i] = opt.grid == 1 ? 0.5 * (opt.box_lo + opt.box_hi)
                                : opt.box_lo + (opt.box_hi - opt.box_lo) * static_cast<double>(i) /
                                                   static_cast<double>(opt.grid - 1);

    for (int r = 0; r < 2; ++r) {
        const bool reflect = r == 1;
        for (std::size_t k = 0; k < opt.angle_steps; ++k) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(opt.angle_steps);
            const Eigen::Matrix2d q = orthogonal(theta, reflect);
            const PolySystem rotated = substitute_affine(sys, AffineMap::linear(q), SubstitutionMode::state_change, 0.0);
            const Dense d = to_dense(rotated);
            const auto binom = binomials(d.m);
            for (double t1 : grid)
                for (double t2 : grid) {
                    if (res.evaluations >= budget) {
                        res.budget_exhausted = true;
                        return res;
                    }
                    ++res.evaluations;
                    if (shifted_is_kinetic(d, binom, t1, t2, opt.kinetic_tol) && accept(t1, t2, theta, reflect))
                        return finish(q, t1, t2, theta, reflect);
                }
        }
    }

    // No witness: sample the sign-invariance hypothesis under positive diagonal scalings.
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> logu(-3.0, 3.0);
    bool holds = true;
    const std::size_t stride = std::max<std::size_t>(1, opt.grid / 5);
    for (std::size_t s = 0; s < opt.lambda_samples && holds; ++s) {
        const double l1 = std::pow(10.0, logu(rng)), l2 = std::pow(10.0, logu(rng));
        for (std::size_t i = 0; i < opt.grid && holds; i += stride)
            for (std::size_t j = 0; j < opt.grid && holds; j += stride)
                for (const auto& pr : constraints.predicates()) {
                    const double a = pr.value(bundle(meta, grid[i], grid[j], 0.0, false));
                    const double b = pr.value(bundle(meta, l1 * grid[i], l2 * grid[j], 0.0, false));
                    if ((a > 0) != (b > 0) || (a < 0) != (b < 0)) {
                        holds = false;
                        break;
                    }
                }
    }
    res.lambda_condition_holds = holds;
    res.evidence_of_affine_nonkinetic = holds;
    return res;
}

}  // namespace crnforge
