#pragma once

#include "crnforge/poly.hpp"

#include <random>

namespace testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Random polynomial over vars with up to `terms` monomials of degree <= deg.
inline crnforge::Polynomial random_poly(Rng& rng, const crnforge::VariableList& vars, unsigned deg, int terms) {
    std::vector<crnforge::Monomial> t;
    std::uniform_int_distribution<unsigned> e(0, deg);
    for (int i = 0; i < terms; ++i) {
        crnforge::Exponents ex(vars->size(), 0);
        unsigned left = deg;
        for (auto& x : ex) {
            x = std::min(left, e(rng));
            left -= x;
        }
        t.push_back({uniform(rng, -2.0, 2.0), ex});
    }
    return crnforge::Polynomial(vars, t);
}

inline crnforge::PolySystem random_poly_system(Rng& rng, std::size_t n, unsigned deg, int terms) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    auto vars = crnforge::make_variables(names);
    std::vector<crnforge::Polynomial> eqs;
    for (std::size_t i = 0; i < n; ++i) eqs.push_back(random_poly(rng, vars, deg, terms));
    return crnforge::PolySystem(vars, eqs);
}

}  // namespace testing
