#pragma once

#include "crnforge/classify.hpp"
#include "crnforge/homoclinic.hpp"
#include "crnforge/linalg.hpp"
#include "crnforge/poly.hpp"

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace crnforge {

// Flattened polynomial system for fast repeated evaluation.
class CompiledSystem {
public:
    explicit CompiledSystem(const PolySystem& sys);
    std::size_t dimension() const { return n_; }
    void operator()(std::span<const double> x, std::span<double> dx) const;
    void jacobian(std::span<const double> x, Eigen::MatrixXd& j) const;

private:
    struct Term {
        std::size_t eq;
        double coeff;
        std::vector<std::pair<std::size_t, unsigned>> factors;
    };
    std::size_t n_;
    unsigned max_exp_;
    std::vector<Term> terms_;
    std::vector<Term> jac_terms_;  // eq holds row * n + col
};

using VectorField = std::function<void(std::span<const double>, std::span<double>)>;
using JacobianFn = std::function<void(std::span<const double>, Eigen::MatrixXd&)>;

struct Event {
    enum class Kind { plane, ball };
    Kind kind = Kind::plane;
    // plane: g = normal·x - offset.  ball: g = |x - center| - radius.
    std::vector<double> normal;
    double offset = 0.0;
    std::vector<double> center;
    double radius = 0.0;
    int direction = 0;      // +1 increasing g, -1 decreasing, 0 both
    bool terminal = false;
    double active_after = 0.0;  // ignore crossings within this elapsed time

    static Event plane(std::vector<double> normal, double offset, int direction, bool terminal = false);
    static Event ball(std::vector<double> center, double radius, bool terminal = true);
    double value(std::span<const double> x) const;
};

struct EventHit {
    std::size_t event;
    double t;
    std::vector<double> x;
};

enum class IntegrationStatus { completed, terminated_by_event, diverged, step_underflow, max_steps };
std::string to_string(IntegrationStatus s);

struct IntegrationOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h0 = 0.0;  // 0: automatic
    std::size_t max_steps = 2'000'000;
    double divergence_norm = 1e12;
    bool stiff_fallback = true;
    // Hairer's stiffness test: this many consecutive flagged steps switch methods.
    int stiffness_patience = 15;
    std::vector<double> output_times;  // when nonempty, only these are recorded
    bool record = true;
    std::size_t record_every = 1;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<double> error_estimates;
    std::vector<EventHit> events;
    IntegrationStatus status = IntegrationStatus::completed;
    std::size_t accepted = 0, rejected = 0, evaluations = 0;
    bool used_stiff_fallback = false;
    double final_time = 0.0;
    std::vector<double> final_state;
};

TrajectoryRecord integrate(const VectorField& f, std::span<const double> x0, double t0, double t1,
                           const IntegrationOptions& opt = {}, std::span<const Event> events = {},
                           const JacobianFn& jac = {});
TrajectoryRecord integrate(const PolySystem& sys, std::span<const double> x0, double t0, double t1,
                           const IntegrationOptions& opt = {}, std::span<const Event> events = {});

// --- fixed points -----------------------------------------------------------

struct FixedPointReport {
    std::vector<double> location;
    Eigen::MatrixXd jacobian;
    double trace = 0.0, det = 0.0, disc = 0.0;  // disc = trace^2 - 4 det (planar meaning)
    std::vector<std::complex<double>> eigenvalues;
    FixedPointType type = FixedPointType::degenerate;
    bool boundary = false;
    double residual = 0.0;
};

struct SearchBox {
    std::vector<std::pair<double, double>> bounds;
    static SearchBox square(std::size_t n, double lo, double hi);
};

struct FixedPointOptions {
    std::size_t seeds_per_axis = 0;  // 0: chosen by dimension
    double dedupe = 1e-8;
    double residual_tol = 1e-10;
    std::size_t max_points = 64;
};

struct FixedPointSearch {
    std::vector<FixedPointReport> points;
    bool degenerate_system = false;  // fixed points not isolated
};

FixedPointSearch find_fixed_points(const PolySystem& sys, const SearchBox& box, const FixedPointOptions& opt = {});
FixedPointReport analyze_fixed_point(const PolySystem& sys, std::span<const double> x);

// --- Melnikov ---------------------------------------------------------------

struct MelnikovOptions {
    double delta = 1e-6;         // saddle-proximity truncation radius
    double start_offset = 1e-5;  // distance from the saddle along the unstable direction
    double rtol = 1e-11, atol = 1e-14;
};

struct MelnikovResult {
    double value = 0.0;         // route 1: time quadrature
    double route2_value = 0.0;  // x2-parametrized branch integrals
    double relative_disagreement = 0.0;
    std::vector<double> phi_times;
    std::vector<double> phi_samples;
    double min_phi = 0.0;
    double truncation_delta = 0.0;
    double estimated_error = 0.0;
    double max_h_drift = 0.0;
    double loop_time = 0.0;     // time from leaving to re-entering the saddle ball
    double closure_distance = 0.0;
    std::size_t steps = 0;
};

// f is a polynomial in x1 (over x1, x2); default f = x1.
MelnikovResult melnikov_at_zero(double a, const std::optional<Polynomial>& f = std::nullopt,
                                const MelnikovOptions& opt = {});

// --- limit cycles -----------------------------------------------------------

struct Section {
    std::array<double, 2> anchor;
    std::array<double, 2> direction;  // half-line anchor + r * direction, r > 0
};

struct LimitCycleOptions {
    double r_min = 1e-3, r_max = 5.0;
    std::size_t scan_points = 24;
    std::size_t max_returns = 50;
    double t_horizon = 400.0;
    double rtol = 1e-10, atol = 1e-12;
};

struct LimitCycleResult {
    bool found = false;
    bool degenerate = false;  // return map is the identity (center)
    double period = 0.0;
    std::array<double, 2> point{0.0, 0.0};
    double radius = 0.0;
    double multiplier = 0.0;
    bool stable = false;
    double reentry_error = 0.0;
    std::size_t returns_used = 0;
    std::string note;
};

LimitCycleResult detect_limit_cycle(const PolySystem& sys, const Section& section, const LimitCycleOptions& opt = {});

// --- Andronov–Leontovich ----------------------------------------------------

struct AndronovLeontovichReport {
    double lambda1 = 0.0, lambda2 = 0.0;
    bool saddle_condition = false;  // λ1 < 0 < λ2
    bool loop_closes = false;
    double closure_distance = 0.0;
    double max_h_drift = 0.0;
    double loop_time = 0.0;
    std::size_t steps = 0;
    double sigma0 = 0.0;
    bool nondegenerate = false;
    double melnikov = 0.0;
    bool transversal = false;
    bool all_hold = false;
    std::string tag;  // supercritical / subcritical / degenerate
    double split_plus = 0.0, split_minus = 0.0;  // signed splitting at ±alpha_probe
    std::string note;
};

AndronovLeontovichReport andronov_leontovich_audit(double a, double alpha_probe = 0.01);

// Signed distance, along the section x1 = 0 below the saddle, between the
// unstable manifold and the stable manifold of the perturbed base system.
double homoclinic_split(double a, double alpha);

// --- Dulac ------------------------------------------------------------------

enum class DulacVerdict { no_limit_cycles, inapplicable };
std::string to_string(DulacVerdict v);

struct DulacReport {
    bool hypotheses_hold = false;
    double k11_1 = 0.0, k22_2 = 0.0;
    Nonnegativity nonnegativity = Nonnegativity::undetermined;
    Polynomial dbar;
    double dbar_min_sampled = 0.0;
    DulacVerdict verdict = DulacVerdict::inapplicable;
    std::string reason;
};

DulacReport dulac_no_limit_cycle_test(const PolySystem& sys, std::size_t grid = 100, double upper = 10.0);

// --- QSSA convergence --------------------------------------------------------

struct QssaConvergenceOptions {
    std::vector<double> mus{1e-2, 1e-3, 1e-4};
    double t_end = 10.0;
    std::array<double, 2> offset{0.01, -0.9 + 0.01};  // x(0) = T + offset
    double y_scale = 1.0;  // multiplies the slow-manifold y(0)
    double rtol = 1e-10, atol = 1e-12;
};

struct QssaConvergenceRow {
    double mu;
    double sup_error;
    std::size_t steps;
    bool stiff_fallback;
};

struct QssaConvergenceReport {
    std::vector<QssaConvergenceRow> rows;
    bool monotone = false;
};

QssaConvergenceReport qssa_convergence_test(const casestudy::CaseStudyParams& p, const QssaConvergenceOptions& opt = {});

}  // namespace crnforge
