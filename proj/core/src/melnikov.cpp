#include "crnforge/dynamics.hpp"
#include "crnforge/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace crnforge {

namespace {

// Tanh-sinh quadrature on [0, 1]; g receives u and 1 - u (computed without cancellation).
template <class G>
double tanh_sinh01(G&& g, double tol = 1e-15) {
    const double half_pi = 0.5 * std::numbers::pi;
    auto level = [&](double h, bool odd_only) {
        double s = 0.0;
        const int kmax = static_cast<int>(std::ceil(4.0 / h));
        for (int k = -kmax; k <= kmax; ++k) {
            if (odd_only && k % 2 == 0) continue;
            const double t = k * h;
            const double c = half_pi * std::sinh(t);
            const double u = 1.0 / (1.0 + std::exp(-2.0 * c));
            const double om = 1.0 / (1.0 + std::exp(2.0 * c));
            const double ch = std::cosh(c);
            const double w = half_pi * std::cosh(t) / (2.0 * ch * ch);
            if (!(u > 0.0) || !(om > 0.0) || w == 0.0) continue;
            const double v = g(u, om);
            if (std::isfinite(v)) s += w * v;
        }
        return s;
    };
    double h = 0.5;
    double sum = level(h, false);
    double prev = sum * h;
    for (int lv = 0; lv < 10; ++lv) {
        h *= 0.5;
        sum += level(h, true);
        const double cur = sum * h;
        if (lv > 2 && std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

double eval_f(const Polynomial& f, double x1, double x2) {
    const double x[2] = {x1, x2};
    return f.evaluate(std::span<const double>(x, 2));
}

double alpha_h(double x1, double x2) { return -x1 * x1 + x2 * x2 * (1.0 + x2); }

// Route 2: the loop H = 0 parametrized by x2 = u^2 - 1 on each branch, with φ in closed form.
double melnikov_branch_form(double a, const Polynomial& f) {
    const double A = 2.0 * a / (1.0 - a), B = 2.0 * a / (1.0 + a);
    const double Ca = 2.0 * (3.5 - 1.5 * a * a) / (a * a - 1.0);
    auto g = [&](double u, double om) {
        const double lfwd = A * std::log(om) - B * std::log1p(u) + Ca * std::log1p(-a * u);
        const double lbwd = -B * std::log(om) + A * std::log1p(u) + Ca * std::log1p(a * u);
        const double w = om * (1.0 + u);  // 1 - u^2
        const double x2 = -w;
        const double fb = eval_f(f, -w * u, x2);
        const double ff = eval_f(f, w * u, x2);
        return 2.0 * u * (std::exp(lbwd) * fb - std::exp(lfwd) * ff);
    };
    return tanh_sinh01(g);
}

}  // namespace

MelnikovResult melnikov_at_zero(double a, const std::optional<Polynomial>& f_opt, const MelnikovOptions& opt) {
    if (!(a > -1.0 && a <= 0.0)) throw RegimeError("melnikov_at_zero: a must lie in (-1, 0]");
    const Polynomial f = f_opt ? *f_opt : Polynomial::variable(casestudy::planar_variables(), 0);
    if (f.num_variables() != 2) throw DimensionMismatch("melnikov_at_zero: f must be a polynomial over (x1, x2)");

    const PolySystem base = casestudy::base_system(a);
    const CompiledSystem cs(base);
    const double lam_u = a + 1.0, lam_s = a - 1.0;

    // Augmented state (x1, x2, L, Q) with L = ln φ, L' = -(∇·P) and Q' = -φ f P2.
    VectorField rhs = [&](std::span<const double> y, std::span<double> dy) {
        double p[2];
        cs(y.first(2), std::span<double>(p, 2));
        Eigen::MatrixXd j;
        cs.jacobian(y.first(2), j);
        dy[0] = p[0];
        dy[1] = p[1];
        dy[2] = -j.trace();
        if (dy.size() > 3) dy[3] = -std::exp(y[2]) * eval_f(f, y[0], y[1]) * p[1];
    };

    // Start on the negative branch of H = 0 near the saddle.
    const double x2s = -opt.start_offset / std::numbers::sqrt2;
    const double x1s = x2s * std::sqrt(1.0 + x2s);

    IntegrationOptions io;
    io.rtol = opt.rtol;
    io.atol = opt.atol;
    io.stiff_fallback = false;
    io.max_steps = 5'000'000;
    io.divergence_norm = 1e300;

    // Events only look at the planar coordinates.
    std::vector<Event> ev;
    ev.push_back(Event::plane({1.0, 0.0}, 0.0, +1, true));
    Event ball = Event::ball({0.0, 0.0}, opt.delta, true);
    ball.active_after = opt.start_offset <= opt.delta ? 1.0 : 0.0;
    ev.push_back(ball);

    // First pass: ln φ at the crossing of x1 = 0, so the second pass starts normalized.
    IntegrationOptions io1 = io;
    io1.record = false;
    const std::vector<double> z0{x1s, x2s, 0.0};
    const auto first = integrate(rhs, z0, 0.0, 1e5, io1, std::span<const Event>(ev.data(), 1));
    if (first.status != IntegrationStatus::terminated_by_event)
        throw LoopTrackingError("melnikov_at_zero: no crossing of x1 = 0 (" + to_string(first.status) + ")");
    const double lc = first.final_state[2];

    // Second pass, bounded by the time needed to fall into the ball along the stable direction.
    // A miss (no contraction, e.g. a = 0) is retried with a larger truncation radius.
    ev[0].terminal = false;
    const std::vector<double> y0{x1s, x2s, -lc, 0.0};
    TrajectoryRecord tr;
    double delta = opt.delta;
    for (int attempt = 0; attempt < 4; ++attempt, delta *= 10.0) {
        ev[1].radius = delta;
        const double horizon = first.final_time + 50.0 + 5.0 * std::log(1.0 / delta) / std::abs(lam_s);
        tr = integrate(rhs, y0, 0.0, horizon, io, ev);
        if (tr.status == IntegrationStatus::terminated_by_event) break;
    }
    if (tr.status != IntegrationStatus::terminated_by_event)
        throw LoopTrackingError("melnikov_at_zero: the orbit did not return to the saddle (" + to_string(tr.status) + ")");
    const EventHit* cross = nullptr;
    for (const auto& e : tr.events)
        if (e.event == 0) {
            cross = &e;
            break;
        }
    if (!cross) throw LoopTrackingError("melnikov_at_zero: no crossing of x1 = 0");

    MelnikovResult r;
    r.truncation_delta = delta;
    r.steps = tr.accepted;
    const double tc = cross->t, phic = std::exp(cross->x[2]);
    r.loop_time = tr.final_time;
    r.min_phi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const auto& s = tr.states[i];
        r.phi_times.push_back(tr.times[i] - tc);
        const double phi = std::exp(s[2]) / phic;
        r.phi_samples.push_back(phi);
        r.min_phi = std::min(r.min_phi, phi);
        r.max_h_drift = std::max(r.max_h_drift, std::abs(alpha_h(s[0], s[1])));
    }
    const auto& ye = tr.final_state;
    // Component along the unstable eigenvector (1,1)/√2 at re-entry.
    r.closure_distance = std::abs(ye[0] + ye[1]) / std::numbers::sqrt2;

    // Linearized tails beyond the truncation: the integrand decays like exp(-(λu - λs)|t|) at both ends.
    const double rate = lam_u - lam_s;
    double ds[2];
    cs(std::span<const double>(y0.data(), 2), std::span<double>(ds, 2));
    const double i_start = -std::exp(y0[2]) * eval_f(f, y0[0], y0[1]) * ds[1];
    cs(std::span<const double>(ye.data(), 2), std::span<double>(ds, 2));
    const double i_end = -std::exp(ye[2]) * eval_f(f, ye[0], ye[1]) * ds[1];
    const double tail = (i_start + i_end) / rate;

    r.value = (ye[3] + tail) / phic;
    r.route2_value = melnikov_branch_form(a, f);
    r.relative_disagreement = std::abs(r.value - r.route2_value) / std::max(std::abs(r.route2_value), 1e-300);
    r.estimated_error = std::abs(tail / phic) + 10.0 * opt.rtol * std::abs(r.value);
    return r;
}

double homoclinic_split(double a, double alpha) {
    const PolySystem sys = casestudy::perturbed_system(a, alpha);
    const CompiledSystem cs(sys);
    VectorField rhs = [&](std::span<const double> y, std::span<double> dy) { cs(y, dy); };
    JacobianFn jac = [&](std::span<const double> y, Eigen::MatrixXd& j) { cs.jacobian(y, j); };
    const double zero[2] = {0.0, 0.0};
    Eigen::MatrixXd j0;
    cs.jacobian(std::span<const double>(zero, 2), j0);
    const Eigen::Matrix2d j2 = j0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(j2);  // J is symmetric here
    // eigenvalues ascending: column 0 stable, column 1 unstable.
    Eigen::Vector2d vs = es.eigenvectors().col(0), vu = es.eigenvectors().col(1);
    if (vu(1) > 0) vu = -vu;                // unstable branch into x2 < 0 with x1 < 0
    if (vs(1) > 0) vs = -vs;                // stable branch into x2 < 0 with x1 > 0
    const double eps = 1e-7;

    IntegrationOptions io;
    io.rtol = 1e-11;
    io.atol = 1e-14;
    io.record = false;
    io.stiff_fallback = false;
    std::vector<Event> ev{Event::plane({1.0, 0.0}, 0.0, 0, true)};

    const std::vector<double> yu{eps * vu(0), eps * vu(1)};
    const auto tu = integrate(rhs, yu, 0.0, 500.0, io, ev, jac);
    const std::vector<double> ys{eps * vs(0), eps * vs(1)};
    const auto ts = integrate(rhs, ys, 0.0, -500.0, io, ev, jac);
    if (tu.status != IntegrationStatus::terminated_by_event || ts.status != IntegrationStatus::terminated_by_event)
        throw LoopTrackingError("homoclinic_split: a manifold branch did not reach x1 = 0");
    return tu.final_state[1] - ts.final_state[1];
}

}  // namespace crnforge
