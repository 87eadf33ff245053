#pragma once

#include "crnforge/poly.hpp"

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace crnforge {

struct Complex {
    std::vector<unsigned> stoichiometry;

    unsigned order() const { return total_degree(stoichiometry); }
    bool is_zero() const { return order() == 0; }
    auto operator<=>(const Complex&) const = default;
};

struct Reaction {
    std::string id;
    Complex reactant;
    Complex product;
    double rate = 0.0;

    unsigned order() const { return reactant.order(); }
};

// Species plus reactions with positive rates. Duplicate (reactant, product)
// pairs are merged by adding rates; the first id is kept.
class ReactionNetwork {
public:
    ReactionNetwork() = default;
    ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions);

    const std::vector<std::string>& species() const { return species_; }
    const std::vector<Reaction>& reactions() const { return reactions_; }
    std::size_t size() const { return reactions_.size(); }
    const std::vector<std::string>& warnings() const { return warnings_; }

    std::size_t species_index(std::string_view name) const;

    bool operator==(const ReactionNetwork& o) const;

private:
    std::vector<std::string> species_;
    std::vector<Reaction> reactions_;
    std::vector<std::string> warnings_;
};

// Mass action: dx/dt = sum_r k_r (c' - c) x^c.
PolySystem induce_kinetics(const ReactionNetwork& net);

// One unit-change reaction per monomial; throws NotKinetic or EmptySystem.
ReactionNetwork canonicalize(const PolySystem& sys);

// Text format, one reaction per line:
//   <id>: <complex> -> <complex> ; k = <positive number>
// with an optional leading "species a, b, c" line fixing the species order.
ReactionNetwork parse_network(std::string_view text);
std::string serialize_network(const ReactionNetwork& net);

std::string format_complex(const Complex& c, const std::vector<std::string>& species);

}  // namespace crnforge
