#include "crnforge/verify/generators.hpp"

namespace crnforge::verify {

namespace {

std::vector<std::string> names(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back("x" + std::to_string(i + 1));
    return v;
}

// All exponent vectors of total degree <= d.
void monomials(std::size_t n, unsigned d, Exponents& cur, std::size_t i, std::vector<Exponents>& out) {
    if (i == n) {
        out.push_back(cur);
        return;
    }
    const unsigned used = total_degree(Exponents(cur.begin(), cur.begin() + static_cast<long>(i)));
    for (unsigned e = 0; e + used <= d; ++e) {
        cur[i] = e;
        monomials(n, d, cur, i + 1, out);
    }
    cur[i] = 0;
}

// Coefficients on a 1/8 lattice keep sums exact and avoid near-zero values.
double draw_coeff(Rng& rng) {
    std::uniform_int_distribution<int> k(1, 24);
    std::bernoulli_distribution neg(0.5);
    const double v = k(rng) / 8.0;
    return neg(rng) ? -v : v;
}

}  // namespace

PolySystem random_system(Rng& rng, std::size_t n, unsigned degree, std::size_t max_terms) {
    const VariableList vars = make_variables(names(n));
    std::vector<Exponents> pool;
    Exponents cur(n, 0);
    monomials(n, degree, cur, 0, pool);
    std::uniform_int_distribution<std::size_t> count(1, std::min(max_terms, pool.size()));
    std::vector<Polynomial> eqs;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<Exponents> pick = pool;
        std::shuffle(pick.begin(), pick.end(), rng);
        pick.resize(count(rng));
        std::vector<Monomial> terms;
        for (auto& e : pick) terms.push_back({draw_coeff(rng), e});
        eqs.emplace_back(vars, std::move(terms));
    }
    return PolySystem(vars, std::move(eqs));
}

PolySystem random_kinetic_system(Rng& rng, std::size_t n, unsigned degree, std::size_t max_terms) {
    const PolySystem raw = random_system(rng, n, degree, max_terms);
    std::vector<Polynomial> eqs;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<Monomial> terms = raw.equation(s).terms();
        for (auto& t : terms)
            if (t.coeff < 0 && t.exponents[s] == 0) t.coeff = -t.coeff;
        eqs.emplace_back(raw.variable_list(), std::move(terms));
    }
    return PolySystem(raw.variable_list(), std::move(eqs));
}

PolySystem random_planar_quadratic(Rng& rng) {
    const VariableList vars = make_variables({"x1", "x2"});
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<Polynomial> eqs;
    for (int s = 0; s < 2; ++s) {
        std::vector<Monomial> terms;
        for (unsigned i = 0; i <= 2; ++i)
            for (unsigned j = 0; i + j <= 2; ++j) terms.push_back({u(rng), {i, j}});
        eqs.emplace_back(vars, std::move(terms));
    }
    return PolySystem(vars, std::move(eqs));
}

}  // namespace crnforge::verify
