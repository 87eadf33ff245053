#include "crnforge/classify.hpp"
#include "crnforge/dynamics.hpp"
#include "crnforge/errors.hpp"

#include <algorithm>
#include <cmath>

namespace crnforge {

SearchBox SearchBox::square(std::size_t n, double lo, double hi) {
    SearchBox b;
    b.bounds.assign(n, {lo, hi});
    return b;
}

FixedPointReport analyze_fixed_point(const PolySystem& sys, std::span<const double> x) {
    FixedPointReport r;
    r.location.assign(x.begin(), x.end());
    r.jacobian = jacobian_at(sys, x);
    r.trace = r.jacobian.trace();
    r.det = r.jacobian.determinant();
    r.disc = r.trace * r.trace - 4.0 * r.det;
    r.eigenvalues = eigenvalues(r.jacobian);
    double scale = 0.0;
    for (const auto& l : r.eigenvalues) scale = std::max(scale, std::abs(l));
    r.type = classify_eigenvalues(r.eigenvalues, 1e-9 * std::max(1.0, scale), 1e-10 * std::max(1.0, scale));
    r.boundary = std::any_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
    const auto f = sys.evaluate(x);
    for (double v : f) r.residual = std::max(r.residual, std::abs(v));
    return r;
}

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Damped Gauss-Newton with a pseudo-inverse so singular Jacobians do not stop it.
bool newton(const PolySystem& sys, const PolyMatrix& jac, std::vector<double>& x, double tol) {
    const std::size_t n = x.size();
    std::vector<double> f = sys.evaluate(x);
    double res = max_abs(f);
    for (int it = 0; it < 60; ++it) {
        if (!std::isfinite(res)) return false;
        if (res < tol) return true;
        const Eigen::MatrixXd j = jacobian_at(jac, x);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = -f[i];
        const Eigen::VectorXd dx = j.completeOrthogonalDecomposition().solve(rhs);
        double lam = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 30; ++ls, lam *= 0.5) {
            std::vector<double> xt(n);
            for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + lam * dx(static_cast<Eigen::Index>(i));
            const auto ft = sys.evaluate(xt);
            const double rt = max_abs(ft);
            if (std::isfinite(rt) && rt < res) {
                x = xt;
                f = ft;
                res = rt;
                moved = true;
                break;
            }
        }
        if (!moved) return res < tol;
    }
    return res < tol;
}

double coefficient_scale(const PolySystem& sys) {
    double s = 1.0;
    for (const auto& p : sys.equations())
        for (const auto& t : p.terms()) s = std::max(s, std::abs(t.coeff));
    return s;
}

}  // namespace

FixedPointSearch find_fixed_points(const PolySystem& sys, const SearchBox& box, const FixedPointOptions& opt) {
    const std::size_t n = sys.dimension();
    if (box.bounds.size() != n) throw DimensionMismatch("find_fixed_points: box dimension mismatch");
    if (n == 0) throw EmptySystem("find_fixed_points: empty system");
    FixedPointSearch out;
    if (sys.is_zero()) {
        out.degenerate_system = true;
        return out;
    }
    const PolyMatrix jac = jacobian(sys);
    const double tol = opt.residual_tol * coefficient_scale(sys);
    std::size_t per = opt.seeds_per_axis;
    if (per == 0) per = n == 1 ? 201 : n == 2 ? 41 : n == 3 ? 13 : n == 4 ? 7 : 4;

    std::vector<std::vector<double>> found;
    auto in_box = [&](const std::vector<double>& x) {
        for (std::size_t i = 0; i < n; ++i) {
            const double w = box.bounds[i].second - box.bounds[i].first;
            if (x[i] < box.bounds[i].first - 1e-9 * w || x[i] > box.bounds[i].second + 1e-9 * w) return false;
        }
        return true;
    };
    auto consider = [&](std::vector<double> x) {
        if (!newton(sys, jac, x, tol)) return;
        for (double& v : x)
            if (std::abs(v) < 1e-12) v = 0.0;
        if (!in_box(x)) return;
        for (const auto& y : found) {
            double d = 0;
            for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(x[i] - y[i]));
            if (d < opt.dedupe * std::max(1.0, max_abs(y))) return;
        }
        found.push_back(std::move(x));
    };

    // Face seeds: on x_i = 0 the remaining equations restricted to the face.
    if (n == 2) {
        for (std::size_t i = 0; i < 2; ++i) {
            const std::size_t j = 1 - i;
            for (std::size_t e = 0; e < 2; ++e) {
                const Polynomial r = sys.equation(e).restrict(i, 0.0);
                if (r.is_zero()) continue;
                const auto c = univariate_coefficients(r, j);
                for (double root : real_roots(c, 1e-7)) {
                    std::vector<double> x(2, 0.0);
                    x[j] = root;
                    consider(x);
                }
            }
        }
    }

    std::vector<std::size_t> idx(n, 0);
    while (true) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto [lo, hi] = box.bounds[i];
            x[i] = per == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(idx[i]) / static_cast<double>(per - 1);
        }
        consider(std::move(x));
        if (found.size() > opt.max_points) {
            out.degenerate_system = true;
            break;
        }
        std::size_t k = 0;
        while (k < n && ++idx[k] == per) idx[k++] = 0;
        if (k == n) break;
    }

    for (const auto& x : found) {
        FixedPointReport r = analyze_fixed_point(sys, x);
        // A singular Jacobian whose null direction is also a zero set means a continuum.
        if (std::abs(r.det) < 1e-10 * std::pow(std::max(1.0, r.jacobian.norm()), static_cast<double>(n))) {
            Eigen::FullPivLU<Eigen::MatrixXd> lu(r.jacobian);
            const Eigen::MatrixXd ker = lu.kernel();
            if (ker.cols() > 0 && ker.norm() > 0) {
                for (double s : {1e-3, -1e-3}) {
                    std::vector<double> y = x;
                    for (std::size_t i = 0; i < n; ++i) y[i] += s * ker(static_cast<Eigen::Index>(i), 0) / ker.col(0).norm();
                    if (max_abs(sys.evaluate(y)) < 1e3 * tol) out.degenerate_system = true;
                }
            }
        }
        out.points.push_back(std::move(r));
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const FixedPointReport& a, const FixedPointReport& b) { return a.location < b.location; });
    return out;
}

}  // namespace crnforge
