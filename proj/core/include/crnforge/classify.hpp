#pragma once

#include "crnforge/poly.hpp"

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace crnforge {

struct CrossNegativeTerm {
    std::size_t equation;  // 0-based
    Monomial term;
};

// Negative coefficient and zero exponent of the equation's own variable.
// Coefficients in [-tol, 0) are ignored.
std::vector<CrossNegativeTerm> find_cross_negative_terms(const PolySystem& sys, double tol = 0.0);
bool is_kinetic(const PolySystem& sys, double tol = 0.0);

enum class Nonnegativity { nonnegative, negative, undetermined };
std::string to_string(Nonnegativity n);

struct NegativityWitness {
    std::size_t component;     // equation whose value is negative
    std::vector<double> point; // x with x[component] == 0, other coordinates >= 0
    double value;              // P_component(point) < 0
    // 2-D only: the open interval of the free coordinate on which the face is negative.
    std::optional<std::pair<double, double>> interval;
};

struct FaceSamplingOptions {
    double upper = 1e3;
    std::size_t max_points = 20000;
    int local_rounds = 10;
};

struct NonnegativityResult {
    Nonnegativity verdict = Nonnegativity::nonnegative;
    std::vector<NegativityWitness> witnesses;
    bool exact = true;
};

NonnegativityResult check_cross_negative_effect(const PolySystem& sys, const FaceSamplingOptions& opt = {});

struct XFactorability {
    std::set<std::size_t> factorable;
    bool fully = false;
};

XFactorability check_x_factorable(const PolySystem& sys);

struct ClassificationReport {
    bool kinetic = false;
    std::vector<CrossNegativeTerm> cross_negative_terms;
    Nonnegativity nonnegative = Nonnegativity::undetermined;
    bool nonnegativity_exact = false;
    std::vector<NegativityWitness> cross_negative_effect_witnesses;
    std::set<std::size_t> x_factorable_components;
    bool fully_x_factorable = false;
};

ClassificationReport classify(const PolySystem& sys, const FaceSamplingOptions& opt = {});

// Univariate coefficients (lowest order first) of p in variable var; p must not
// depend on any other variable.
std::vector<double> univariate_coefficients(const Polynomial& p, std::size_t var);

}  // namespace crnforge
