#pragma once

#include "crnforge/crn.hpp"
#include "crnforge/linalg.hpp"
#include "crnforge/poly.hpp"
#include "crnforge/transform.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace crnforge::casestudy {

struct CaseStudyParams {
    double a = -0.8;
    double alpha = 0.0;
    double t1 = 1.0;
    double t2 = 1.5;
    double t = 2.2;  // shared translation of the sheared variant
    double omega1 = 1.0;
    double omega2 = 1.0;
    double omega = 1.0;
    double mu = 1e-4;

    ParamBundle bundle() const;
};

enum class Variant { translated, xfact, sheared_xfact, qssa, hybrid };
std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

// Ordered (name, value) pairs; names like "k0^1", "k12^2".
using CoefficientRecord = std::vector<std::pair<std::string, double>>;
double lookup(const CoefficientRecord& rec, const std::string& name);

// H = -x1^2 + x2^2 (1 + x2)
Polynomial alpha_curve();
double alpha_branch_plus(double x2);
double alpha_branch_minus(double x2);

// Variables x1, x2.
VariableList planar_variables();

PolySystem base_system(double a);
PolySystem perturbed_system(double a, double alpha);
// Adds alpha * f to the first equation; f is a polynomial over (x1, x2).
PolySystem perturbed_system(double a, double alpha, const Polynomial& f);

struct ClosedFormFixedPoint {
    std::array<double, 2> point;
    FixedPointType type;
    std::string role;  // "saddle", "spiral", "node"
};

std::vector<ClosedFormFixedPoint> fixed_points_closed_form(double a);
double saddle_quantity(double a);
double separation_distance(double a);

// Closed-form coefficient sets of the translated base system and of the
// sheared x-factorized system.
CoefficientRecord translated_coefficients(double a, double alpha, double t1, double t2);
CoefficientRecord sheared_coefficients(double a, double alpha, double t);

// x̄ = Q S2 x + (t, t), Q the improper rotation at 3π/2 and S2 = [[1,0],[-a,1]].
AffineMap sheared_map(double a, double t);

ConstraintSet translation_constraints();  // {T1 > 0, T2 > 1}
ConstraintSet translated_constraints();   // {T1 > 2√3/9, T2 > 1}
ConstraintSet xfact_constraints();
ConstraintSet sheared_constraints();
ConstraintSet qssa_constraints();
ConstraintSet hybrid_constraints();
ConstraintSet constraints_for(Variant v);

struct VariantBuild {
    Variant variant;
    PolySystem system;
    ConstraintSet constraints;
    CoefficientRecord coefficients;
    TransformSpec spec;  // how the system was obtained from perturbed_system
    QssaSpec qssa;       // meaningful for qssa / hybrid
};

// Throws ConstraintViolation when params fail the variant's constraint set.
VariantBuild build_variant(const CaseStudyParams& p, Variant v, bool check_constraints = true);

enum class PublishedNetwork { xfact, sheared_xfact, hybrid };
std::string to_string(PublishedNetwork n);
PublishedNetwork published_network_from_string(const std::string& s);

ReactionNetwork published_network(const CaseStudyParams& p, PublishedNetwork which, bool check_constraints = true);

}  // namespace crnforge::casestudy
