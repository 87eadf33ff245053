#include "crnforge/dynamics.hpp"
#include "crnforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crnforge {

// ---------------------------------------------------------------------------
// CompiledSystem

CompiledSystem::CompiledSystem(const PolySystem& sys) : n_(sys.dimension()), max_exp_(0) {
    for (std::size_t s = 0; s < n_; ++s)
        for (const auto& t : sys.equation(s).terms()) {
            Term term{s, t.coeff, {}};
            for (std::size_t i = 0; i < n_; ++i)
                if (t.exponents[i]) {
                    term.factors.emplace_back(i, t.exponents[i]);
                    max_exp_ = std::max(max_exp_, t.exponents[i]);
                }
            terms_.push_back(term);
            // d/dx_i of the term.
            for (std::size_t k = 0; k < term.factors.size(); ++k) {
                Term d{s * n_ + term.factors[k].first, term.coeff * term.factors[k].second, term.factors};
                if (--d.factors[k].second == 0) d.factors.erase(d.factors.begin() + static_cast<long>(k));
                jac_terms_.push_back(d);
            }
        }
}

namespace {

inline double ipow(double x, unsigned k) {
    double r = 1.0;
    while (k) {
        if (k & 1u) r *= x;
        x *= x;
        k >>= 1u;
    }
    return r;
}

}  // namespace

void CompiledSystem::operator()(std::span<const double> x, std::span<double> dx) const {
    std::fill(dx.begin(), dx.end(), 0.0);
    for (const auto& t : terms_) {
        double v = t.coeff;
        for (const auto& [i, e] : t.factors) v *= e == 1 ? x[i] : ipow(x[i], e);
        dx[t.eq] += v;
    }
}

void CompiledSystem::jacobian(std::span<const double> x, Eigen::MatrixXd& j) const {
    j.setZero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (const auto& t : jac_terms_) {
        double v = t.coeff;
        for (const auto& [i, e] : t.factors) v *= e == 1 ? x[i] : ipow(x[i], e);
        j(static_cast<Eigen::Index>(t.eq / n_), static_cast<Eigen::Index>(t.eq % n_)) += v;
    }
}

// ---------------------------------------------------------------------------
// Events

Event Event::plane(std::vector<double> normal, double offset, int direction, bool terminal) {
    Event e;
    e.kind = Kind::plane;
    e.normal = std::move(normal);
    e.offset = offset;
    e.direction = direction;
    e.terminal = terminal;
    return e;
}

Event Event::ball(std::vector<double> center, double radius, bool terminal) {
    Event e;
    e.kind = Kind::ball;
    e.center = std::move(center);
    e.radius = radius;
    e.direction = -1;
    e.terminal = terminal;
    return e;
}

double Event::value(std::span<const double> x) const {
    if (kind == Kind::plane) {
        double g = -offset;
        for (std::size_t i = 0; i < normal.size(); ++i) g += normal[i] * x[i];
        return g;
    }
    double r2 = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) r2 += (x[i] - center[i]) * (x[i] - center[i]);
    return std::sqrt(r2) - radius;
}

std::string to_string(IntegrationStatus s) {
    switch (s) {
        case IntegrationStatus::completed: return "completed";
        case IntegrationStatus::terminated_by_event: return "terminated_by_event";
        case IntegrationStatus::diverged: return "diverged";
        case IntegrationStatus::step_underflow: return "step_underflow";
        case IntegrationStatus::max_steps: return "max_steps";
    }
    return "completed";
}

// ---------------------------------------------------------------------------
// Integrator

namespace {

using Vec = std::vector<double>;

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// Interpolant over one accepted step [t, t + h].
struct Interpolant {
    enum class Kind { dopri, hermite } kind = Kind::dopri;
    double t = 0, h = 0;
    Vec r1, r2, r3, r4, r5;       // dopri continuous output
    Vec y0, y1, f0, f1;           // hermite
    void eval(double tt, Vec& out) const {
        const double th = (tt - t) / h;
        const std::size_t n = kind == Kind::dopri ? r1.size() : y0.size();
        out.resize(n);
        if (kind == Kind::dopri) {
            const double th1 = 1.0 - th;
            for (std::size_t i = 0; i < n; ++i)
                out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        } else {
            const double h00 = (1 + 2 * th) * (1 - th) * (1 - th), h10 = th * (1 - th) * (1 - th);
            const double h01 = th * th * (3 - 2 * th), h11 = th * th * (th - 1);
            for (std::size_t i = 0; i < n; ++i)
                out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
        }
    }
};

double norm_inf(const Vec& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool finite(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

class Driver {
public:
    Driver(const VectorField& f, const JacobianFn& jac, const IntegrationOptions& opt, std::span<const Event> events,
           double t0, double t1)
        : f_(f), jac_(jac), opt_(opt), events_(events), t0_(t0), t1_(t1), dir_(t1 >= t0 ? 1.0 : -1.0) {}

    TrajectoryRecord run(std::span<const double> x0) {
        const std::size_t n = x0.size();
        Vec y(x0.begin(), x0.end());
        rec_.final_time = t0_;
        rec_.final_state = y;
        if (!finite(y)) throw Error("integrate: non-finite initial state");
        out_idx_ = 0;
        if (opt_.record) {
            if (opt_.output_times.empty()) {
                push(t0_, y, 0.0);
            } else {
                while (out_idx_ < opt_.output_times.size() && opt_.output_times[out_idx_] == t0_) {
                    push(t0_, y, 0.0);
                    ++out_idx_;
                }
            }
        }
        if (t1_ == t0_) return rec_;
        gprev_.resize(events_.size());
        for (std::size_t e = 0; e < events_.size(); ++e) gprev_[e] = events_[e].value(y);

        double t = t0_;
        Vec k1(n);
        eval(y, k1);
        double h = opt_.h0 > 0 ? opt_.h0 * dir_ : initial_step(t, y, k1);
        bool stiff = false;
        int iasti = 0, nonsti = 0;
        bool last_rejected = false;

        Vec k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), ysti(n), y1(n), err(n);
        while (true) {
            if (rec_.accepted + rec_.rejected >= opt_.max_steps) {
                rec_.status = IntegrationStatus::max_steps;
                break;
            }
            const double hmin = 1e-14 * std::max(1.0, std::abs(t));
            if (std::abs(h) < hmin) {
                if (opt_.stiff_fallback && !stiff) {
                    stiff = true;
                    h = dir_ * std::max(1e3 * hmin, 1e-8 * std::abs(t1_ - t));
                } else {
                    rec_.status = IntegrationStatus::step_underflow;
                    break;
                }
            }
            if (dir_ * (t + h - t1_) > 0) h = t1_ - t;

            if (stiff) {
                rec_.used_stiff_fallback = true;
                bool accepted = false;
                double errn = 0;
                Interpolant ip;
                rosenbrock_step(t, y, k1, h, y1, errn, ip);
                if (errn <= 1.0 && finite(y1)) {
                    accepted = true;
                    Vec f1(n);
                    eval(y1, f1);
                    ip.f1 = f1;
                    const int r = after_step(ip, t, h, y1, errn);
                    t = t + h;
                    y = y1;
                    k1 = f1;
                    if (r != 0) break;
                }
                const double fac = errn > 0 ? std::clamp(0.9 * std::pow(errn, -1.0 / 3.0), 0.2, accepted ? 5.0 : 1.0)
                                            : 5.0;
                if (!accepted && !finite(y1)) h *= 0.25;
                else h *= fac;
                if (accepted && t == t1_) break;
                continue;
            }

            for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
            eval(yt, k2);
            for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            eval(yt, k3);
            for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            eval(yt, k4);
            for (std::size_t i = 0; i < n; ++i)
                yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            eval(yt, k5);
            for (std::size_t i = 0; i < n; ++i)
                ysti[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            eval(ysti, k6);
            for (std::size_t i = 0; i < n; ++i)
                y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            eval(y1, k7);

            double errn = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
                errn += (e / sc) * (e / sc);
            }
            errn = std::sqrt(errn / static_cast<double>(n));
            if (!std::isfinite(errn) || !finite(y1)) errn = 1e10;

            if (errn <= 1.0) {
                // Hairer's stiffness detection.
                double stnum = 0, stden = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    stnum += (k7[i] - k6[i]) * (k7[i] - k6[i]);
                    stden += (y1[i] - ysti[i]) * (y1[i] - ysti[i]);
                }
                if (stden > 0 && std::abs(h) * std::sqrt(stnum / stden) > 3.25) {
                    nonsti = 0;
                    ++iasti;
                } else if (++nonsti == 6) {
                    iasti = 0;
                }

                Interpolant ip;
                ip.kind = Interpolant::Kind::dopri;
                ip.t = t;
                ip.h = h;
                ip.r1 = y;
                ip.r2.resize(n);
                ip.r3.resize(n);
                ip.r4.resize(n);
                ip.r5.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double ydiff = y1[i] - y[i];
                    const double bspl = h * k1[i] - ydiff;
                    ip.r2[i] = ydiff;
                    ip.r3[i] = bspl;
                    ip.r4[i] = ydiff - h * k7[i] - bspl;
                    ip.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                const int r = after_step(ip, t, h, y1, errn);
                t = t + h;
                y = y1;
                k1 = k7;
                if (r != 0) break;
                if (t == t1_) break;
                if (opt_.stiff_fallback && iasti >= opt_.stiffness_patience) stiff = true;
                double fac = errn > 0 ? 0.9 * std::pow(errn, -0.2) : 10.0;
                fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
                h *= fac;
                last_rejected = false;
            } else {
                ++rec_.rejected;
                h *= std::max(0.2, 0.9 * std::pow(errn, -0.2));
                last_rejected = true;
            }
        }
        return rec_;
    }

private:
    void eval(const Vec& y, Vec& dy) {
        ++rec_.evaluations;
        f_(y, dy);
    }

    void push(double t, const Vec& y, double err) {
        rec_.times.push_back(t);
        rec_.states.push_back(y);
        rec_.error_estimates.push_back(err);
    }

    double initial_step(double t, const Vec& y, const Vec& f0) {
        const std::size_t n = y.size();
        double dnf = 0, dny = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sk = opt_.atol + opt_.rtol * std::abs(y[i]);
            dnf += (f0[i] / sk) * (f0[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
        h = std::min(h, std::abs(t1_ - t));
        Vec y1(n), f1(n);
        for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + dir_ * h * f0[i];
        eval(y1, f1);
        double der2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sk = opt_.atol + opt_.rtol * std::abs(y[i]);
            der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
        h = std::min({100 * h, h1, std::abs(t1_ - t)});
        return dir_ * std::max(h, 1e-12);
    }

    void jacobian(const Vec& y, Eigen::MatrixXd& j) {
        const std::size_t n = y.size();
        if (jac_) {
            jac_(y, j);
            return;
        }
        j.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        Vec f0(n), f1(n), yp = y;
        eval(y, f0);
        for (std::size_t c = 0; c < n; ++c) {
            const double d = 1e-7 * std::max(1.0, std::abs(y[c]));
            yp[c] = y[c] + d;
            eval(yp, f1);
            yp[c] = y[c];
            for (std::size_t r = 0; r < n; ++r)
                j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (f1[r] - f0[r]) / d;
        }
    }

    // Two-stage L-stable Rosenbrock method (order 2) with an embedded order-1 estimate.
    void rosenbrock_step(double t, const Vec& y, const Vec& f0, double h, Vec& y1, double& errn, Interpolant& ip) {
        const std::size_t n = y.size();
        const double gamma = 1.0 + 1.0 / std::sqrt(2.0);
        Eigen::MatrixXd j;
        jacobian(y, j);
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) -
                            gamma * h * j;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = f0[i];
        const Eigen::VectorXd s1 = lu.solve(rhs);
        Vec yt(n), f1(n);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * s1(static_cast<Eigen::Index>(i));
        eval(yt, f1);
        for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = f1[i] - 2.0 * s1(static_cast<Eigen::Index>(i));
        const Eigen::VectorXd s2 = lu.solve(rhs);
        y1.resize(n);
        errn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            y1[i] = y[i] + 1.5 * h * s1(ii) + 0.5 * h * s2(ii);
            const double e = 0.5 * h * (s1(ii) + s2(ii));
            const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
            errn += (e / sc) * (e / sc);
        }
        errn = std::sqrt(errn / static_cast<double>(n));
        if (!std::isfinite(errn)) errn = 1e10;
        if (errn > 1.0) ++rec_.rejected;
        ip.kind = Interpolant::Kind::hermite;
        ip.t = t;
        ip.h = h;
        ip.y0 = y;
        ip.y1 = y1;
        ip.f0 = f0;
    }

    // Events, output and divergence after an accepted step. Nonzero stops the run.
    int after_step(const Interpolant& ip, double t, double h, const Vec& y1, double errn) {
        ++rec_.accepted;
        const double tn = t + h;
        // Earliest terminal event within the step.
        double t_stop = tn;
        bool stop = false;
        Vec xe;
        std::vector<EventHit> hits;
        std::vector<double> gnew(events_.size());
        for (std::size_t e = 0; e < events_.size(); ++e) {
            const Event& ev = events_[e];
            gnew[e] = ev.value(y1);
            const double g0 = gprev_[e];
            auto crosses = [&](double g1) {
                const bool up = g0 < 0 && g1 >= 0, down = g0 > 0 && g1 <= 0;
                return (ev.direction >= 0 && up) || (ev.direction <= 0 && down);
            };
            double b = tn, gb = gnew[e];
            if (!crosses(gb)) {
                // g may dip and recover inside one long step: probe the interpolant.
                bool found = false;
                double cbest = t, gbest = std::abs(g0);
                for (int k = 1; k < 8 && !found; ++k) {
                    const double c = t + h * k / 8.0;
                    ip.eval(c, xe);
                    const double gc = ev.value(xe);
                    if (crosses(gc)) b = c, gb = gc, found = true;
                    if (std::abs(gc) < gbest) cbest = c, gbest = std::abs(gc);
                }
                if (std::abs(gnew[e]) < gbest) cbest = tn, gbest = std::abs(gnew[e]);
                if (!found) {
                    // Golden section on |g| around the closest probe.
                    const double w = std::abs(h) / 8.0;
                    double lo = std::max(dir_ * t, dir_ * cbest - w), hi = std::min(dir_ * tn, dir_ * cbest + w);
                    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
                    auto gabs = [&](double u) {
                        ip.eval(dir_ * u, xe);
                        return ev.value(xe);
                    };
                    double u1 = hi - r * (hi - lo), u2 = lo + r * (hi - lo);
                    double f1 = std::abs(gabs(u1)), f2 = std::abs(gabs(u2));
                    for (int it = 0; it < 60 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
                        if (f1 < f2) {
                            hi = u2, u2 = u1, f2 = f1;
                            u1 = hi - r * (hi - lo), f1 = std::abs(gabs(u1));
                        } else {
                            lo = u1, u1 = u2, f1 = f2;
                            u2 = lo + r * (hi - lo), f2 = std::abs(gabs(u2));
                        }
                        const double gm = gabs(0.5 * (lo + hi));
                        if (crosses(gm)) {
                            b = dir_ * 0.5 * (lo + hi), gb = gm, found = true;
                            break;
                        }
                    }
                }
                if (!found) continue;
            }
            // Locate the root with Illinois regula falsi on the interpolant.
            double a = t, ga = g0;
            int side = 0;
            for (int it = 0; it < 100 && std::abs(b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
                double c = (a * gb - b * ga) / (gb - ga);
                if (!(dir_ * (c - a) > 0 && dir_ * (b - c) > 0)) c = 0.5 * (a + b);
                ip.eval(c, xe);
                const double gc = ev.value(xe);
                if (gc == 0) {
                    a = b = c;
                    break;
                }
                if ((gc < 0) == (ga < 0)) {
                    a = c;
                    ga = gc;
                    if (side == -1) gb *= 0.5;
                    side = -1;
                } else {
                    b = c;
                    gb = gc;
                    if (side == 1) ga *= 0.5;
                    side = 1;
                }
            }
            const double te = b;
            if (dir_ * (te - t0_) < ev.active_after) continue;
            ip.eval(te, xe);
            hits.push_back({e, te, xe});
            if (ev.terminal && (!stop || dir_ * (te - t_stop) < 0)) {
                stop = true;
                t_stop = te;
            }
        }
        gprev_ = gnew;
        std::sort(hits.begin(), hits.end(), [&](const EventHit& x, const EventHit& y) { return dir_ * (x.t - y.t) < 0; });
        for (const auto& hit : hits)
            if (!stop || dir_ * (hit.t - t_stop) <= 0) rec_.events.push_back(hit);

        const double t_end = stop ? t_stop : tn;
        Vec x_end;
        if (stop)
            ip.eval(t_end, x_end);
        else
            x_end = y1;

        if (opt_.record) {
            if (!opt_.output_times.empty()) {
                Vec xo;
                while (out_idx_ < opt_.output_times.size() && dir_ * (opt_.output_times[out_idx_] - t_end) <= 0) {
                    ip.eval(opt_.output_times[out_idx_], xo);
                    if (opt_.output_times[out_idx_] == tn) xo = y1;
                    push(opt_.output_times[out_idx_], xo, errn);
                    ++out_idx_;
                }
            } else if (stop || rec_.accepted % std::max<std::size_t>(1, opt_.record_every) == 0 || tn == t1_) {
                push(t_end, x_end, errn);
            }
        }

        if (!finite(x_end) || norm_inf(x_end) > opt_.divergence_norm) {
            rec_.status = IntegrationStatus::diverged;
            return 1;
        }
        rec_.final_time = t_end;
        rec_.final_state = x_end;
        if (stop) {
            rec_.status = IntegrationStatus::terminated_by_event;
            return 1;
        }
        return 0;
    }

    const VectorField& f_;
    const JacobianFn& jac_;
    const IntegrationOptions& opt_;
    std::span<const Event> events_;
    double t0_, t1_, dir_;
    TrajectoryRecord rec_;
    std::vector<double> gprev_;
    std::size_t out_idx_ = 0;
};

}  // namespace

TrajectoryRecord integrate(const VectorField& f, std::span<const double> x0, double t0, double t1,
                           const IntegrationOptions& opt, std::span<const Event> events, const JacobianFn& jac) {
    Driver d(f, jac, opt, events, t0, t1);
    return d.run(x0);
}

TrajectoryRecord integrate(const PolySystem& sys, std::span<const double> x0, double t0, double t1,
                           const IntegrationOptions& opt, std::span<const Event> events) {
    if (x0.size() != sys.dimension()) throw DimensionMismatch("integrate: initial state has the wrong dimension");
    auto cs = std::make_shared<CompiledSystem>(sys);
    VectorField f = [cs](std::span<const double> x, std::span<double> dx) { (*cs)(x, dx); };
    JacobianFn j = [cs](std::span<const double> x, Eigen::MatrixXd& m) { cs->jacobian(x, m); };
    return integrate(f, x0, t0, t1, opt, events, j);
}

}  // namespace crnforge
