#pragma once

#include "crnforge/poly.hpp"

#include <random>

namespace crnforge::verify {

using Rng = std::mt19937_64;

// Random polynomial system with n variables and total degree <= degree; each
// equation gets between 1 and max_terms monomials with coefficients in [-3, 3].
PolySystem random_system(Rng& rng, std::size_t n, unsigned degree, std::size_t max_terms = 6);

// Same, with cross-negative coefficients flipped positive.
PolySystem random_kinetic_system(Rng& rng, std::size_t n, unsigned degree, std::size_t max_terms = 6);

// Dense planar quadratic: all 12 coefficients drawn from [-3, 3].
PolySystem random_planar_quadratic(Rng& rng);

}  // namespace crnforge::verify
