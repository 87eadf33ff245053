#include "crnforge/io/json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace crnforge::io {

std::string format_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_string(std::string& out, const std::string& s) {
    out += Json(s).dump();
}

void write(std::string& out, const Json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) {
                    out += ",";
                    out += nl;
                }
                first = false;
                out += pad;
                write_string(out, it.key());
                out += indent > 0 ? ": " : ":";
                write(out, it.value(), indent, depth + 1);
            }
            out += nl;
            out += close_pad;
            out += "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
            out += "[";
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat ? (indent > 0 ? ", " : ",") : ",";
                if (!flat) {
                    out += nl;
                    out += pad;
                }
                first = false;
                write(out, e, indent, depth + 1);
            }
            if (!flat) {
                out += nl;
                out += close_pad;
            }
            out += "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

const Json& member(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing key \"") + key + "\"");
    return j.at(key);
}

Exponents exponents_from(const Json& j, std::size_t n) {
    if (!j.is_array()) throw FormatError("exponents must be an array");
    Exponents e;
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<long long>() < 0) throw FormatError("exponents must be natural numbers");
        e.push_back(static_cast<unsigned>(v.get<long long>()));
    }
    if (e.size() != n) throw FormatError("exponent vector has the wrong length");
    return e;
}

double number(const Json& j, const char* what) {
    if (!j.is_number()) throw FormatError(std::string(what) + " must be a number");
    return j.get<double>();
}

Json complex_vector(const std::vector<std::complex<double>>& v) {
    Json a = Json::array();
    for (const auto& z : v) a.push_back(Json::array({z.real(), z.imag()}));
    return a;
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json a = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        a.push_back(row);
    }
    return a;
}

std::string monomial_string(const Monomial& m, const std::vector<std::string>& vars) {
    return Polynomial(vars, {m}).to_string();
}

}  // namespace

std::string dump(const Json& j, int indent) {
    std::string out;
    write(out, j, indent, 0);
    if (indent > 0) out += "\n";
    return out;
}

Json parse(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << content;
}

Json to_json(const Polynomial& p) {
    Json terms = Json::array();
    for (const auto& t : p.terms()) {
        Json e = Json::array();
        for (unsigned x : t.exponents) e.push_back(x);
        terms.push_back(Json{{"coeff", t.coeff}, {"exponents", e}});
    }
    return terms;
}

Polynomial polynomial_from_json(const Json& j, const VariableList& vars) {
    if (!j.is_array()) throw FormatError("a polynomial is an array of terms");
    std::vector<Monomial> terms;
    for (const auto& t : j) terms.push_back({number(member(t, "coeff"), "coeff"), exponents_from(member(t, "exponents"), vars->size())});
    return Polynomial(vars, std::move(terms));
}

Json to_json(const PolySystem& sys) {
    Json j;
    j["variables"] = sys.variables();
    Json eqs = Json::array();
    for (const auto& p : sys.equations()) eqs.push_back(to_json(p));
    j["equations"] = eqs;
    if (!sys.param_meta().empty()) {
        Json params = Json::object();
        for (const auto& [k, v] : sys.param_meta()) params[k] = v;
        j["params"] = params;
    }
    return j;
}

PolySystem system_from_json(const Json& j) {
    const Json& vj = member(j, "variables");
    if (!vj.is_array()) throw FormatError("\"variables\" must be an array");
    std::vector<std::string> names;
    for (const auto& v : vj) {
        if (!v.is_string()) throw FormatError("variable names must be strings");
        names.push_back(v.get<std::string>());
    }
    const VariableList vars = make_variables(names);
    const Json& ej = member(j, "equations");
    if (!ej.is_array()) throw FormatError("\"equations\" must be an array");
    std::vector<Polynomial> eqs;
    for (const auto& e : ej) eqs.push_back(polynomial_from_json(e, vars));
    ParamMeta meta;
    if (j.contains("params")) {
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it) meta[it.key()] = number(it.value(), "param");
    }
    return PolySystem(vars, std::move(eqs), meta);
}

Json to_json(const TransformSpec& spec) {
    Json steps = Json::array();
    for (const auto& s : spec.steps) {
        if (const auto* a = std::get_if<AffineStep>(&s)) {
            Json t = Json::array();
            for (Eigen::Index i = 0; i < a->map.translation.size(); ++i) t.push_back(a->map.translation(i));
            steps.push_back(Json{{"kind", "affine"},
                                 {"matrix", matrix_json(a->map.matrix)},
                                 {"translation", t},
                                 {"mode", a->mode == SubstitutionMode::state_change ? "state_change" : "perturbation_frame"}});
        } else if (const auto* x = std::get_if<XFactorStep>(&s)) {
            steps.push_back(Json{{"kind", "xfactor"}, {"indices", x->indices}});
        } else {
            const auto& q = std::get<QssaStep>(s).spec;
            Json targets = Json::array();
            for (const auto& t : q.targets) targets.push_back(Json{{"equation", t.equation}, {"exponents", t.exponents}});
            Json step{{"kind", "qssa"}, {"targets", targets}, {"omega", q.omega}, {"mu", q.mu}};
            if (!q.names.empty()) step["names"] = q.names;
            if (!q.p.empty()) {
                Json ps = Json::array();
                for (const auto& p : q.p) ps.push_back(to_json(p));
                step["p"] = ps;
            }
            steps.push_back(step);
        }
    }
    return Json{{"steps", steps}};
}

TransformSpec spec_from_json(const Json& j, const VariableList& vars0) {
    TransformSpec spec;
    VariableList vars = vars0;
    const Json& steps = member(j, "steps");
    if (!steps.is_array()) throw FormatError("\"steps\" must be an array");
    for (const auto& s : steps) {
        const std::string kind = member(s, "kind").get<std::string>();
        const std::size_t n = vars->size();
        if (kind == "affine") {
            AffineMap m = AffineMap::identity(n);
            if (s.contains("matrix")) {
                const Json& mj = s["matrix"];
                if (!mj.is_array() || mj.size() != n) throw FormatError("affine matrix has the wrong shape");
                for (std::size_t r = 0; r < n; ++r) {
                    if (!mj[r].is_array() || mj[r].size() != n) throw FormatError("affine matrix has the wrong shape");
                    for (std::size_t c = 0; c < n; ++c)
                        m.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(mj[r][c], "matrix entry");
                }
            }
            if (s.contains("translation")) {
                const Json& tj = s["translation"];
                if (!tj.is_array() || tj.size() != n) throw FormatError("translation has the wrong length");
                for (std::size_t i = 0; i < n; ++i) m.translation(static_cast<Eigen::Index>(i)) = number(tj[i], "translation entry");
            }
            SubstitutionMode mode = SubstitutionMode::state_change;
            if (s.contains("mode")) {
                const std::string md = s["mode"].get<std::string>();
                if (md == "perturbation_frame") mode = SubstitutionMode::perturbation_frame;
                else if (md != "state_change") throw FormatError("unknown affine mode: " + md);
            }
            spec.steps.push_back(AffineStep{m, mode});
        } else if (kind == "xfactor") {
            XFactorStep x;
            if (s.contains("indices")) {
                for (const auto& i : s["indices"]) {
                    if (!i.is_number_integer() || i.get<long long>() < 0 || static_cast<std::size_t>(i.get<long long>()) >= n)
                        throw FormatError("xfactor index out of range");
                    x.indices.push_back(static_cast<std::size_t>(i.get<long long>()));
                }
            } else {
                x.indices = all_indices(n);
            }
            spec.steps.push_back(x);
        } else if (kind == "qssa") {
            QssaSpec q;
            for (const auto& t : member(s, "targets")) {
                const long long eq = member(t, "equation").get<long long>();
                if (eq < 0 || static_cast<std::size_t>(eq) >= n) throw FormatError("qssa target equation out of range");
                q.targets.push_back({static_cast<std::size_t>(eq), exponents_from(member(t, "exponents"), n)});
            }
            for (const auto& w : member(s, "omega")) q.omega.push_back(number(w, "omega"));
            if (s.contains("mu")) q.mu = number(s["mu"], "mu");
            if (s.contains("names"))
                for (const auto& nm : s["names"]) q.names.push_back(nm.get<std::string>());
            if (s.contains("p"))
                for (const auto& p : s["p"]) q.p.push_back(polynomial_from_json(p, vars));
            // Track the variable list for later steps.
            std::vector<std::string> names = *vars;
            std::set<std::size_t> eqs;
            for (const auto& t : q.targets) eqs.insert(t.equation);
            std::size_t k = 0;
            for (std::size_t e : eqs) {
                names.push_back(k < q.names.size() ? q.names[k] : "y" + std::to_string(e + 1));
                ++k;
            }
            spec.steps.push_back(QssaStep{q});
            vars = make_variables(names);
        } else {
            throw FormatError("unknown step kind: " + kind);
        }
    }
    return spec;
}

Json to_json(const ClassificationReport& r, const std::vector<std::string>& vars) {
    Json j;
    j["kinetic"] = r.kinetic;
    Json terms = Json::array();
    for (const auto& t : r.cross_negative_terms)
        terms.push_back(Json{{"equation", t.equation},
                             {"coeff", t.term.coeff},
                             {"exponents", t.term.exponents},
                             {"monomial", monomial_string(t.term, vars)}});
    j["cross_negative_terms"] = terms;
    if (r.nonnegative == Nonnegativity::undetermined)
        j["nonnegative"] = "undetermined";
    else
        j["nonnegative"] = r.nonnegative == Nonnegativity::nonnegative;
    j["nonnegativity_exact"] = r.nonnegativity_exact;
    Json w = Json::array();
    for (const auto& x : r.cross_negative_effect_witnesses) {
        Json e{{"component", x.component}, {"point", x.point}, {"value", x.value}};
        if (x.interval) e["interval"] = Json::array({x.interval->first, x.interval->second});
        w.push_back(e);
    }
    j["cross_negative_effect_witnesses"] = w;
    j["x_factorable_components"] = Json(std::vector<std::size_t>(r.x_factorable_components.begin(), r.x_factorable_components.end()));
    j["fully_x_factorable"] = r.fully_x_factorable;
    return j;
}

Json to_json(const casestudy::CoefficientRecord& rec) {
    Json j = Json::object();
    for (const auto& [k, v] : rec) j[k] = v;
    return j;
}

Json to_json(const ConstraintSet& c, const ParamBundle& p) {
    const auto failed = c.failures(p);
    return Json{{"name", c.name()}, {"satisfied", failed.empty()}, {"failed", failed}};
}

Json to_json(const ReactionNetwork& net) {
    Json rs = Json::array();
    for (const auto& r : net.reactions())
        rs.push_back(Json{{"id", r.id},
                          {"reactant", format_complex(r.reactant, net.species())},
                          {"product", format_complex(r.product, net.species())},
                          {"rate", r.rate}});
    return Json{{"species", net.species()}, {"reactions", rs}, {"warnings", net.warnings()}};
}

Json to_json(const MelnikovResult& m, bool with_samples) {
    Json j{{"value", m.value},
           {"route2_value", m.route2_value},
           {"relative_disagreement", m.relative_disagreement},
           {"min_phi", m.min_phi},
           {"truncation_delta", m.truncation_delta},
           {"estimated_error", m.estimated_error},
           {"max_h_drift", m.max_h_drift},
           {"loop_time", m.loop_time},
           {"closure_distance", m.closure_distance},
           {"steps", m.steps}};
    if (with_samples) {
        j["phi_times"] = m.phi_times;
        j["phi_samples"] = m.phi_samples;
    }
    return j;
}

Json to_json(const FixedPointReport& f) {
    return Json{{"location", f.location},
                {"type", to_string(f.type)},
                {"boundary", f.boundary},
                {"trace", f.trace},
                {"det", f.det},
                {"disc", f.disc},
                {"eigenvalues", complex_vector(f.eigenvalues)},
                {"jacobian", matrix_json(f.jacobian)},
                {"residual", f.residual}};
}

Json to_json(const TransformResult& r) {
    Json ledger = Json::array();
    for (const auto& s : r.ledger)
        ledger.push_back(Json{{"kind", s.kind},
                              {"dimension_before", s.dimension_before},
                              {"dimension_after", s.dimension_after},
                              {"degree_before", s.degree_before},
                              {"degree_after", s.degree_after}});
    return Json{{"system", to_json(r.system)}, {"ledger", ledger}};
}

std::string trajectory_csv(const TrajectoryRecord& tr, const std::vector<std::string>& vars) {
    std::string out = "t";
    for (const auto& v : vars) out += "," + v;
    out += "\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        out += format_double(tr.times[i]);
        for (double x : tr.states[i]) out += "," + format_double(x);
        out += "\n";
    }
    return out;
}

}  // namespace crnforge::io
