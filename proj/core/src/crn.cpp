#include "crnforge/crn.hpp"

#include "crnforge/classify.hpp"
#include "crnforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace crnforge {

ReactionNetwork::ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions)
    : species_(std::move(species)) {
    std::set<std::string> names;
    for (const auto& s : species_)
        if (!names.insert(s).second) throw InvalidNetwork("duplicate species: " + s);

    std::map<std::pair<Complex, Complex>, std::size_t> seen;
    std::set<std::string> ids;
    for (auto& r : reactions) {
        if (r.reactant.stoichiometry.size() != species_.size() || r.product.stoichiometry.size() != species_.size())
            throw InvalidNetwork("reaction " + r.id + ": stoichiometry length differs from species count");
        if (!(r.rate > 0.0) || !std::isfinite(r.rate))
            throw InvalidNetwork("reaction " + r.id + ": rate must be a positive finite number");
        if (r.reactant == r.product) throw InvalidNetwork("reaction " + r.id + ": reactant equals product (self-loop)");
        auto key = std::make_pair(r.reactant, r.product);
        if (auto it = seen.find(key); it != seen.end()) {
            reactions_[it->second].rate += r.rate;
            continue;
        }
        if (r.id.empty()) r.id = "r" + std::to_string(reactions_.size() + 1);
        if (!ids.insert(r.id).second) warnings_.push_back("duplicate reaction id " + r.id);
        if (r.order() > 3)
            warnings_.push_back("reaction " + r.id + " has order " + std::to_string(r.order()) + " > 3");
        seen.emplace(std::move(key), reactions_.size());
        reactions_.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < species_.size(); ++i) {
        const bool used = std::any_of(reactions_.begin(), reactions_.end(), [&](const Reaction& r) {
            return r.reactant.stoichiometry[i] > 0 || r.product.stoichiometry[i] > 0;
        });
        if (!used) warnings_.push_back("species " + species_[i] + " appears in no complex");
    }
}

std::size_t ReactionNetwork::species_index(std::string_view name) const {
    for (std::size_t i = 0; i < species_.size(); ++i)
        if (species_[i] == name) return i;
    throw InvalidNetwork("unknown species: " + std::string(name));
}

bool ReactionNetwork::operator==(const ReactionNetwork& o) const {
    if (species_ != o.species_ || reactions_.size() != o.reactions_.size()) return false;
    for (std::size_t i = 0; i < reactions_.size(); ++i) {
        const auto& a = reactions_[i];
        const auto& b = o.reactions_[i];
        if (a.id != b.id || a.reactant != b.reactant || a.product != b.product || a.rate != b.rate) return false;
    }
    return true;
}

PolySystem induce_kinetics(const ReactionNetwork& net) {
    const std::size_t n = net.species().size();
    auto vars = make_variables(net.species());
    std::vector<std::vector<Monomial>> terms(n);
    for (const auto& r : net.reactions()) {
        for (std::size_t s = 0; s < n; ++s) {
            const int delta = static_cast<int>(r.product.stoichiometry[s]) - static_cast<int>(r.reactant.stoichiometry[s]);
            if (delta != 0) terms[s].push_back({r.rate * delta, r.reactant.stoichiometry});
        }
    }
    std::vector<Polynomial> eqs;
    for (auto& t : terms) eqs.emplace_back(vars, std::move(t));
    return PolySystem(vars, std::move(eqs));
}

ReactionNetwork canonicalize(const PolySystem& sys) {
    const auto cross = find_cross_negative_terms(sys);
    if (!cross.empty()) {
        std::vector<NotKinetic::Offender> off;
        for (const auto& c : cross) off.push_back({c.equation, c.term.coeff, c.term.exponents});
        throw NotKinetic("system has " + std::to_string(cross.size()) + " cross-negative term(s)", std::move(off));
    }
    if (sys.is_zero()) throw EmptySystem("all equations are zero; the canonical network is empty");

    struct Entry {
        Exponents reactant;
        std::size_t equation;
        double coeff;
    };
    std::vector<Entry> entries;
    for (std::size_t s = 0; s < sys.dimension(); ++s)
        for (const auto& t : sys.equation(s).terms()) entries.push_back({t.exponents, s, t.coeff});
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.reactant != b.reactant) return GradedLex{}(a.reactant, b.reactant);
        return a.equation < b.equation;
    });

    std::vector<Reaction> reactions;
    for (const auto& e : entries) {
        Reaction r;
        r.id = "r" + std::to_string(reactions.size() + 1);
        r.reactant.stoichiometry = e.reactant;
        r.product.stoichiometry = e.reactant;
        // Kinetic: a negative coefficient implies the own exponent is >= 1.
        if (e.coeff > 0)
            r.product.stoichiometry[e.equation] += 1;
        else
            r.product.stoichiometry[e.equation] -= 1;
        r.rate = std::abs(e.coeff);
        reactions.push_back(std::move(r));
    }
    return ReactionNetwork(sys.variables(), std::move(reactions));
}

}  // namespace crnforge
