#pragma once

#include "crnforge/linalg.hpp"
#include "crnforge/poly.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace crnforge {

using ParamBundle = std::map<std::string, double>;

// Named real-valued predicates over a parameter bundle. A predicate holds when
// its value is > 0 (strict) or >= 0 (non-strict).
class ConstraintSet {
public:
    struct Predicate {
        std::string name;
        std::function<double(const ParamBundle&)> value;
        bool strict = true;
    };

    ConstraintSet() = default;
    explicit ConstraintSet(std::string name) : name_(std::move(name)) {}

    ConstraintSet& add(std::string name, std::function<double(const ParamBundle&)> value, bool strict = true);

    const std::string& name() const { return name_; }
    const std::vector<Predicate>& predicates() const { return preds_; }
    bool empty() const { return preds_.empty(); }

    // Names of failing predicates (empty when all hold).
    std::vector<std::string> failures(const ParamBundle& p) const;
    bool satisfied(const ParamBundle& p) const { return failures(p).empty(); }
    // Throws ConstraintViolation listing failing predicates.
    void require(const ParamBundle& p) const;

private:
    std::string name_;
    std::vector<Predicate> preds_;
};

struct QssaTarget {
    std::size_t equation;
    Exponents exponents;  // selects the monomial b x^β in that equation
};

struct QssaSpec {
    std::vector<QssaTarget> targets;
    // One entry per new variable, new variables ordered by ascending equation index.
    std::vector<double> omega;
    double mu = 1e-4;
    // Empty means p = 1 for every new variable. Polynomials are over the
    // original variables.
    std::vector<Polynomial> p;
    // Empty means y<equation+1>.
    std::vector<std::string> names;
};

struct AffineStep {
    AffineMap map;
    SubstitutionMode mode = SubstitutionMode::state_change;
};
struct XFactorStep {
    std::vector<std::size_t> indices;  // 0-based
};
struct QssaStep {
    QssaSpec spec;
};
using TransformStep = std::variant<AffineStep, XFactorStep, QssaStep>;

std::string step_kind(const TransformStep& s);

// Steps stored in application order (first step acts first).
struct TransformSpec {
    std::vector<TransformStep> steps;

    // From the written composition Ψ_1 ∘ Ψ_2 ∘ ... ∘ Ψ_k, whose rightmost map acts first.
    static TransformSpec from_composition(std::vector<TransformStep> written);
};

struct StepRecord {
    std::string kind;
    std::size_t dimension_before, dimension_after;
    unsigned degree_before, degree_after;
};

struct TransformResult {
    PolySystem system;
    std::vector<StepRecord> ledger;
};

PolySystem x_factorize(const PolySystem& sys, const std::vector<std::size_t>& subset);
std::vector<std::size_t> all_indices(std::size_t n);

PolySystem qssa_embed(const PolySystem& sys, const QssaSpec& spec);
// Slow-manifold values y_s = ω_s / (x_s p_s(x)) for the new variables.
std::vector<double> qssa_slow_manifold(const PolySystem& sys, const QssaSpec& spec, std::span<const double> x);

TransformResult apply(const TransformSpec& spec, const PolySystem& sys);

// --- fixed-point audit for x-factorization in the plane -------------------

struct InteriorAudit {
    std::array<double, 2> point;
    Eigen::Matrix2d jacobian;             // of the untransformed system
    std::array<int, 4> sign_pattern;      // signs of J11, J12, J21, J22
    FixedPointType type_before, type_after;
    bool saddle_invariant;                // part (i): saddles stay saddles
    bool stability_condition;             // J11 J22 >= 0
    bool type_condition;                  // J12 J21 >= 0
    bool stability_preserved, type_preserved;
};

struct BoundaryAudit {
    std::array<double, 2> point;
    bool origin;
    bool in_nonnegative_orthant;
    std::vector<std::complex<double>> eigenvalues;  // of the x-factorized Jacobian
    FixedPointType type;
    // Origin: λ_i = P_i(0). Axis point: criterion value P_i(x_b) ∂P_j/∂x_j (> 0 ⇒ node).
    std::array<double, 2> origin_eigenvalues{0.0, 0.0};
    double node_criterion = 0.0;
    bool criterion_says_node = false;
    bool criterion_agrees = true;
};

struct XFactorAudit {
    std::vector<InteriorAudit> interior;
    std::vector<BoundaryAudit> boundary;
};

// sys is the planar system before x-factorization over both variables.
XFactorAudit xfact_fixed_point_audit(const PolySystem& sys, const std::vector<std::array<double, 2>>& interior_points);

// --- affine kinetic search (planar) ---------------------------------------

struct AffineSearchOptions {
    std::size_t angle_steps = 720;
    std::size_t grid = 50;
    double box_lo = -10.0, box_hi = 10.0;
    std::size_t budget = 0;  // 0: no limit beyond the full scan
    std::size_t lambda_samples = 100;
    std::uint64_t seed = 42;
    double kinetic_tol = 1e-12;
};

struct AffineSearchResult {
    bool found = false;
    std::optional<AffineMap> witness;
    double angle = 0.0;
    bool reflection = false;
    std::size_t evaluations = 0;
    bool budget_exhausted = false;
    bool heuristic = true;
    bool lambda_condition_holds = false;
    bool evidence_of_affine_nonkinetic = false;
};

// Scans x̄ = Q x + T with Q orthogonal (both orientations) and T on a grid.
// Constraint predicates see the bundle keys t1, t2, theta, reflect.
AffineSearchResult affine_kinetic_search(const PolySystem& sys, const ConstraintSet& constraints,
                                         const AffineSearchOptions& opt = {});

}  // namespace crnforge
