#include "crnforge/dynamics.hpp"
#include "crnforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace crnforge {

// ---------------------------------------------------------------------------
// Limit cycles

namespace {

struct Return {
    double r;
    double period;
    std::array<double, 2> x;
};

class ReturnMap {
public:
    ReturnMap(const PolySystem& sys, const Section& sec, const LimitCycleOptions& opt)
        : cs_(std::make_shared<CompiledSystem>(sys)), sec_(sec), opt_(opt) {
        const double nd = std::hypot(sec.direction[0], sec.direction[1]);
        if (!(nd > 0)) throw Error("detect_limit_cycle: zero section direction");
        dir_ = {sec.direction[0] / nd, sec.direction[1] / nd};
        normal_ = {-dir_[1], dir_[0]};
    }

    std::array<double, 2> point(double r) const {
        return {sec_.anchor[0] + r * dir_[0], sec_.anchor[1] + r * dir_[1]};
    }

    std::optional<Return> operator()(double r) {
        ++calls;
        auto cs = cs_;
        VectorField f = [cs](std::span<const double> x, std::span<double> dx) { (*cs)(x, dx); };
        JacobianFn j = [cs](std::span<const double> x, Eigen::MatrixXd& m) { cs->jacobian(x, m); };
        std::array<double, 2> x = point(r);
        double p[2];
        (*cs_)(x, std::span<double>(p, 2));
        const double flux = normal_[0] * p[0] + normal_[1] * p[1];
        if (flux == 0.0) return std::nullopt;
        const int dirn = flux > 0 ? 1 : -1;
        const double offset = normal_[0] * sec_.anchor[0] + normal_[1] * sec_.anchor[1];
        Event ev = Event::plane({normal_[0], normal_[1]}, offset, dirn, true);
        ev.active_after = 1e-3;
        IntegrationOptions io;
        io.rtol = opt_.rtol;
        io.atol = opt_.atol;
        io.record = false;
        io.divergence_norm = 1e6;
        double elapsed = 0.0;
        std::vector<double> y(x.begin(), x.end());
        for (int leg = 0; leg < 8; ++leg) {
            const auto tr = integrate(f, y, 0.0, opt_.t_horizon - elapsed, io, std::span<const Event>(&ev, 1), j);
            if (tr.status != IntegrationStatus::terminated_by_event) return std::nullopt;
            elapsed += tr.final_time;
            const auto& xe = tr.final_state;
            const double rr = (xe[0] - sec_.anchor[0]) * dir_[0] + (xe[1] - sec_.anchor[1]) * dir_[1];
            if (rr > 0) return Return{rr, elapsed, {xe[0], xe[1]}};
            y = xe;  // crossed on the other half-line; keep going
        }
        return std::nullopt;
    }

    std::size_t calls = 0;

private:
    std::shared_ptr<CompiledSystem> cs_;
    Section sec_;
    LimitCycleOptions opt_;
    std::array<double, 2> dir_, normal_;
};

}  // namespace

LimitCycleResult detect_limit_cycle(const PolySystem& sys, const Section& section, const LimitCycleOptions& opt) {
    if (sys.dimension() != 2) throw UnsupportedDimension("detect_limit_cycle: planar systems only");
    if (!(opt.r_max > opt.r_min) || opt.scan_points < 2) throw Error("detect_limit_cycle: bad radial range");
    ReturnMap R(sys, section, opt);
    LimitCycleResult res;

    std::vector<double> rs(opt.scan_points);
    std::vector<std::optional<double>> ds(opt.scan_points);
    double dmax = 0.0;
    bool all_defined = true;
    for (std::size_t i = 0; i < opt.scan_points; ++i) {
        rs[i] = opt.r_min + (opt.r_max - opt.r_min) * static_cast<double>(i) / static_cast<double>(opt.scan_points - 1);
        if (auto ret = R(rs[i])) {
            ds[i] = ret->r - rs[i];
            dmax = std::max(dmax, std::abs(*ds[i]) / std::max(1.0, rs[i]));
        } else {
            all_defined = false;
        }
    }
    if (all_defined && dmax < 1e-8) {
        res.degenerate = true;
        res.note = "return map is the identity on the section (center)";
        return res;
    }

    std::size_t bracket = opt.scan_points;
    for (std::size_t i = 0; i + 1 < opt.scan_points; ++i)
        if (ds[i] && ds[i + 1] && ((*ds[i] > 0) != (*ds[i + 1] > 0))) {
            bracket = i;
            break;
        }
    if (bracket == opt.scan_points) {
        res.note = all_defined ? "return map has no fixed point on the section" : "no sign change of R(r) - r where returns exist";
        return res;
    }

    // Illinois iteration on D(r) = R(r) - r.
    double a = rs[bracket], b = rs[bracket + 1], fa = *ds[bracket], fb = *ds[bracket + 1];
    int side = 0;
    std::size_t used = 0;
    double root = 0.5 * (a + b);
    while (used < opt.max_returns) {
        if (std::abs(b - a) < 1e-12 * std::max(1.0, std::abs(b))) break;
        double c = (a * fb - b * fa) / (fb - fa);
        if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
        const auto ret = R(c);
        ++used;
        if (!ret) {
            res.note = "return undefined inside the bracket";
            res.returns_used = used;
            return res;
        }
        const double fc = ret->r - c;
        root = c;
        if (fc == 0.0) break;
        if ((fc > 0) == (fa > 0)) {
            a = c;
            fa = fc;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            b = c;
            fb = fc;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
        if (std::abs(fc) < 1e-13 * std::max(1.0, c)) break;
    }
    res.returns_used = used;
    if (used >= opt.max_returns) res.note = "return budget reached; cycle located to the available precision";

    const auto ret = R(root);
    if (!ret) {
        res.note = "return undefined at the located root";
        return res;
    }
    res.found = true;
    res.radius = root;
    res.point = R.point(root);
    res.period = ret->period;
    {
        // Re-entry after one period by a plain fixed-horizon run.
        IntegrationOptions io;
        io.rtol = opt.rtol;
        io.atol = opt.atol;
        io.record = false;
        const std::vector<double> x0(res.point.begin(), res.point.end());
        const auto tr = integrate(sys, x0, 0.0, res.period, io);
        res.reentry_error = tr.status == IntegrationStatus::completed
                                ? std::hypot(tr.final_state[0] - x0[0], tr.final_state[1] - x0[1])
                                : std::numeric_limits<double>::infinity();
    }
    const double h = 1e-6 * std::max(root, 1e-3);
    const auto rp = R(root + h), rm = R(root - h);
    if (rp && rm) {
        res.multiplier = (rp->r - rm->r) / (2.0 * h);
        res.stable = std::abs(res.multiplier) < 1.0;
    } else {
        res.note = "multiplier unavailable: neighbouring returns undefined";
    }
    return res;
}

// ---------------------------------------------------------------------------
// Andronov–Leontovich

AndronovLeontovichReport andronov_leontovich_audit(double a, double alpha_probe) {
    if (!(a > -1.0 && a <= 0.0)) throw RegimeError("andronov_leontovich_audit: a must lie in (-1, 0]");
    AndronovLeontovichReport r;
    const PolySystem base = casestudy::base_system(a);
    const double zero[2] = {0.0, 0.0};
    auto eig = eigenvalues(jacobian_at(base, std::span<const double>(zero, 2)));
    std::sort(eig.begin(), eig.end(), [](auto x, auto y) { return x.real() < y.real(); });
    r.lambda1 = eig[0].real();
    r.lambda2 = eig[1].real();
    r.saddle_condition = std::abs(eig[0].imag()) < 1e-12 && r.lambda1 < 0 && r.lambda2 > 0;
    r.sigma0 = r.lambda1 + r.lambda2;
    r.nondegenerate = std::abs(r.sigma0) > 1e-12;
    r.tag = !r.nondegenerate ? "degenerate" : r.sigma0 < 0 ? "supercritical" : "subcritical";

    try {
        const MelnikovResult m = melnikov_at_zero(a);
        r.max_h_drift = m.max_h_drift;
        r.loop_time = m.loop_time;
        r.steps = m.steps;
        r.closure_distance = m.closure_distance;
        r.loop_closes = m.max_h_drift < 1e-6;
        r.melnikov = m.value;
        r.transversal = m.value != 0.0 && std::abs(m.value) > m.estimated_error && m.relative_disagreement < 1e-4 &&
                        m.min_phi > 0.0;
        if (m.relative_disagreement >= 1e-4) r.note = "Melnikov routes disagree";
    } catch (const LoopTrackingError& e) {
        r.note = e.what();
    }
    if (alpha_probe != 0.0) {
        try {
            r.split_plus = homoclinic_split(a, alpha_probe);
            r.split_minus = homoclinic_split(a, -alpha_probe);
        } catch (const LoopTrackingError& e) {
            if (r.note.empty()) r.note = e.what();
        }
    }
    r.all_hold = r.saddle_condition && r.loop_closes && r.nondegenerate && r.transversal;
    return r;
}

// ---------------------------------------------------------------------------
// Dulac

std::string to_string(DulacVerdict v) {
    return v == DulacVerdict::no_limit_cycles ? "no_limit_cycles" : "inapplicable";
}

DulacReport dulac_no_limit_cycle_test(const PolySystem& sys, std::size_t grid, double upper) {
    DulacReport r;
    if (sys.dimension() != 2) {
        r.reason = "planar systems only";
        return r;
    }
    if (sys.degree() > 2) {
        r.reason = "degree above 2";
        return r;
    }
    const auto& vars = sys.variable_list();
    const Polynomial& p1 = sys.equation(0);
    const Polynomial& p2 = sys.equation(1);
    r.k11_1 = p1.coefficient({2, 0});
    r.k22_2 = p2.coefficient({0, 2});
    r.nonnegativity = check_cross_negative_effect(sys).verdict;
    r.hypotheses_hold = r.k11_1 <= 0.0 && r.k22_2 <= 0.0 && r.nonnegativity == Nonnegativity::nonnegative;

    const Polynomial x1 = Polynomial::variable(vars, 0), x2 = Polynomial::variable(vars, 1);
    const Polynomial face1 = p1.restrict(0, 0.0) - r.k11_1 * x1 * x1;
    const Polynomial face2 = p2.restrict(1, 0.0) - r.k22_2 * x2 * x2;
    r.dbar = x2 * face1 + x1 * face2;

    const std::size_t g = std::max<std::size_t>(grid, 1);
    r.dbar_min_sampled = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= g; ++i)
        for (std::size_t j = 1; j <= g; ++j) {
            const double x[2] = {upper * static_cast<double>(i) / static_cast<double>(g),
                                 upper * static_cast<double>(j) / static_cast<double>(g)};
            r.dbar_min_sampled = std::min(r.dbar_min_sampled, r.dbar.evaluate(std::span<const double>(x, 2)));
        }

    if (!r.hypotheses_hold) {
        if (r.k11_1 > 0.0) r.reason = "k11^1 > 0";
        else if (r.k22_2 > 0.0) r.reason = "k22^2 > 0";
        else r.reason = "system is not nonnegative (" + to_string(r.nonnegativity) + ")";
        return r;
    }
    if (r.dbar_min_sampled < -1e-12) {
        r.reason = "sampled Dbar is negative although the hypotheses hold";
        return r;
    }
    r.verdict = DulacVerdict::no_limit_cycles;
    r.reason = "k11^1 <= 0, k22^2 <= 0 and the system is nonnegative";
    return r;
}

// ---------------------------------------------------------------------------
// QSSA convergence

QssaConvergenceReport qssa_convergence_test(const casestudy::CaseStudyParams& params, const QssaConvergenceOptions& opt) {
    using namespace casestudy;
    const VariantBuild reduced = build_variant(params, Variant::translated);
    const std::vector<double> x0{params.t1 + opt.offset[0], params.t2 + opt.offset[1]};

    std::vector<double> times;
    const std::size_t samples = 2001;
    for (std::size_t i = 0; i < samples; ++i)
        times.push_back(opt.t_end * static_cast<double>(i) / static_cast<double>(samples - 1));

    IntegrationOptions io;
    io.rtol = opt.rtol;
    io.atol = opt.atol;
    io.output_times = times;
    const auto ref = integrate(reduced.system, x0, 0.0, opt.t_end, io);
    if (ref.status != IntegrationStatus::completed) throw Error("qssa_convergence_test: reduced run " + to_string(ref.status));

    QssaConvergenceReport rep;
    for (double mu : opt.mus) {
        CaseStudyParams p = params;
        p.mu = mu;
        const VariantBuild total = build_variant(p, Variant::qssa);
        std::vector<double> y0 = x0;
        for (double y : qssa_slow_manifold(reduced.system, total.qssa, x0)) y0.push_back(opt.y_scale * y);
        const auto tr = integrate(total.system, y0, 0.0, opt.t_end, io);
        if (tr.status != IntegrationStatus::completed)
            throw StiffnessFailure("qssa_convergence_test: total system " + to_string(tr.status), mu);
        double err = 0.0;
        for (std::size_t i = 0; i < tr.states.size() && i < ref.states.size(); ++i)
            for (std::size_t k = 0; k < 2; ++k) err = std::max(err, std::abs(tr.states[i][k] - ref.states[i][k]));
        rep.rows.push_back({mu, err, tr.accepted, tr.used_stiff_fallback});
    }
    rep.monotone = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (!(rep.rows[i].sup_error < rep.rows[i - 1].sup_error)) rep.monotone = false;
    return rep;
}

}  // namespace crnforge
