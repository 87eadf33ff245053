#include "crnforge/crn.hpp"
#include "crnforge/errors.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>

namespace crnforge {

namespace {

struct ParsedTerm {
    unsigned coeff;
    std::string species;
    std::size_t column;
};

struct ParsedReaction {
    std::string id;
    std::vector<ParsedTerm> reactant, product;
    double rate;
    std::size_t line;
};

class LineParser {
public:
    LineParser(std::string_view s, std::size_t line) : s_(s), line_(line) {}

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, pos_ + 1); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t col) const { throw ParseError(msg, line_, col); }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= s_.size();
    }
    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(std::string_view tok) {
        skip_ws();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
    }
    std::size_t column() const { return pos_ + 1; }

    std::optional<std::string> identifier() {
        skip_ws();
        if (pos_ >= s_.size() || !(std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            return std::nullopt;
        const std::size_t b = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        return std::string(s_.substr(b, pos_ - b));
    }

    std::optional<unsigned> natural() {
        skip_ws();
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) return std::nullopt;
        unsigned v = 0;
        auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
        if (ec != std::errc()) fail("bad stoichiometric coefficient");
        pos_ = static_cast<std::size_t>(p - s_.data());
        return v;
    }

    double real() {
        skip_ws();
        double v = 0;
        auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
        if (ec != std::errc()) fail("expected a number");
        pos_ = static_cast<std::size_t>(p - s_.data());
        return v;
    }

    std::vector<ParsedTerm> complex() {
        std::vector<ParsedTerm> terms;
        skip_ws();
        const std::size_t start = pos_;
        if (auto n = natural()) {
            if (*n == 0) {
                // "0" is the empty complex unless a species follows.
                skip_ws();
                if (pos_ >= s_.size() || !(std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                    return terms;
                fail_at("zero stoichiometric coefficient", start + 1);
            }
            pos_ = start;
        }
        while (true) {
            skip_ws();
            const std::size_t col = pos_ + 1;
            unsigned c = 1;
            if (auto n = natural()) {
                if (*n == 0) fail_at("zero stoichiometric coefficient", col);
                c = *n;
                accept("*");
            }
            auto id = identifier();
            if (!id) fail("expected a species name");
            terms.push_back({c, *id, col});
            if (!accept("+")) break;
        }
        return terms;
    }

private:
    std::string_view s_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

}  // namespace

ReactionNetwork parse_network(std::string_view text) {
    std::vector<std::string> species;
    bool declared = false;
    std::vector<ParsedReaction> parsed;

    std::size_t line_no = 0;
    std::size_t b = 0;
    while (b <= text.size()) {
        std::size_t e = text.find('\n', b);
        if (e == std::string_view::npos) e = text.size();
        std::string_view line = text.substr(b, e - b);
        ++line_no;
        b = e + 1;
        if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);

        LineParser p(line, line_no);
        if (p.at_end()) {
            if (e == text.size()) break;
            continue;
        }
        if (p.identifier() == std::optional<std::string>("species") && !p.peek(':')) {
            if (declared) p.fail("species already declared");
            if (!parsed.empty()) p.fail("species declaration must precede reactions");
            declared = true;
            while (true) {
                auto id = p.identifier();
                if (!id) p.fail("expected a species name");
                for (const auto& s : species)
                    if (s == *id) p.fail("duplicate species " + *id);
                species.push_back(*id);
                if (!p.accept(",")) break;
            }
            if (!p.at_end()) p.fail("unexpected text after species list");
            continue;
        }
        LineParser q(line, line_no);
        ParsedReaction r;
        r.line = line_no;
        auto id = q.identifier();
        if (!id) q.fail("expected a reaction id");
        r.id = *id;
        q.expect(":");
        r.reactant = q.complex();
        q.expect("->");
        r.product = q.complex();
        q.expect(";");
        q.expect("k");
        q.expect("=");
        const std::size_t rate_col = q.column();
        r.rate = q.real();
        if (!(r.rate > 0.0)) q.fail_at("rate must be positive", rate_col);
        if (!q.at_end()) q.fail("unexpected text after rate");

        for (const auto* side : {&r.reactant, &r.product})
            for (const auto& t : *side) {
                bool known = false;
                for (const auto& s : species) known = known || s == t.species;
                if (!known) {
                    if (declared) throw ParseError("unknown species " + t.species, line_no, t.column);
                    species.push_back(t.species);
                }
            }
        parsed.push_back(std::move(r));
        if (e == text.size()) break;
    }

    std::vector<Reaction> reactions;
    for (const auto& pr : parsed) {
        Reaction r;
        r.id = pr.id;
        r.rate = pr.rate;
        r.reactant.stoichiometry.assign(species.size(), 0);
        r.product.stoichiometry.assign(species.size(), 0);
        auto fill = [&](const std::vector<ParsedTerm>& terms, Complex& c) {
            for (const auto& t : terms)
                for (std::size_t i = 0; i < species.size(); ++i)
                    if (species[i] == t.species) c.stoichiometry[i] += t.coeff;
        };
        fill(pr.reactant, r.reactant);
        fill(pr.product, r.product);
        if (r.reactant == r.product) throw ParseError("reactant equals product (self-loop)", pr.line, 1);
        reactions.push_back(std::move(r));
    }
    return ReactionNetwork(std::move(species), std::move(reactions));
}

std::string format_complex(const Complex& c, const std::vector<std::string>& species) {
    if (c.is_zero()) return "0";
    std::string out;
    for (std::size_t i = 0; i < species.size(); ++i) {
        const unsigned k = c.stoichiometry[i];
        if (!k) continue;
        if (!out.empty()) out += " + ";
        if (k > 1) out += std::to_string(k) + " ";
        out += species[i];
    }
    return out;
}

std::string serialize_network(const ReactionNetwork& net) {
    std::ostringstream os;
    if (!net.species().empty()) {
        os << "species ";
        for (std::size_t i = 0; i < net.species().size(); ++i) os << (i ? ", " : "") << net.species()[i];
        os << "\n";
    }
    char buf[64];
    for (const auto& r : net.reactions()) {
        std::snprintf(buf, sizeof buf, "%.17g", r.rate);
        os << r.id << ": " << format_complex(r.reactant, net.species()) << " -> "
           << format_complex(r.product, net.species()) << " ; k = " << buf << "\n";
    }
    return os.str();
}

}  // namespace crnforge
