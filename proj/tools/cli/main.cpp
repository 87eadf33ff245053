#include "crnforge/classify.hpp"
#include "crnforge/crn.hpp"
#include "crnforge/dynamics.hpp"
#include "crnforge/errors.hpp"
#include "crnforge/homoclinic.hpp"
#include "crnforge/io/json.hpp"
#include "crnforge/transform.hpp"
#include "crnforge/verify/criteria.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace crnforge;
namespace cs = crnforge::casestudy;
using io::Json;

namespace {

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kUsage = 2;

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        io::write_file(out, text);
}

void emit_json(const Json& j, const std::string& out) { emit(io::dump(j), out); }

// A bare system document, or any report carrying one under "system".
PolySystem load_system(const std::string& path) {
    const Json j = io::parse(io::read_file(path));
    if (j.is_object() && !j.contains("variables") && j.contains("system")) return io::system_from_json(j["system"]);
    return io::system_from_json(j);
}

std::vector<double> parse_csv(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw io::FormatError("bad number in list: '" + item + "'");
        }
    }
    return v;
}

std::uint64_t resolve_seed(const std::string& flag) {
    std::string s = flag;
    if (s.empty())
        if (const char* env = std::getenv("CRNFORGE_SEED")) s = env;
    if (s.empty()) return 42;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw io::FormatError("seed must be a nonnegative integer: " + s);
    }
}

struct Opts {
    std::string input, out, spec, x0, suite = "all", seed, variant = "xfact", network_out, format = "json";
    double t0 = 0.0, t_end = 10.0, rtol = 1e-9, atol = 1e-12, upper = 1e3;
    std::size_t record_every = 1;
    cs::CaseStudyParams p;
    bool samples = false, no_check = false;
};

int run_classify(const Opts& o) {
    const PolySystem sys = load_system(o.input);
    FaceSamplingOptions fo;
    fo.upper = o.upper;
    const auto rep = classify(sys, fo);
    if (o.format == "text") {
        std::ostringstream t;
        t << "kinetic: " << (rep.kinetic ? "yes" : "no") << "\n";
        for (const auto& c : rep.cross_negative_terms)
            t << "  cross-negative in equation " << c.equation + 1 << ": coefficient " << io::format_double(c.term.coeff)
              << "\n";
        t << "nonnegative: " << to_string(rep.nonnegative) << (rep.nonnegativity_exact ? "" : " (sampled)") << "\n";
        t << "x-factorable: " << (rep.fully_x_factorable ? "fully" : std::to_string(rep.x_factorable_components.size()) + " of " + std::to_string(sys.dimension())) << "\n";
        emit(t.str(), o.out);
    } else {
        emit_json(io::to_json(rep, sys.variables()), o.out);
    }
    return kOk;
}

int run_transform(const Opts& o) {
    const PolySystem sys = load_system(o.input);
    const TransformSpec spec = io::spec_from_json(io::parse(io::read_file(o.spec)), sys.variable_list());
    emit_json(io::to_json(apply(spec, sys)), o.out);
    return kOk;
}

int run_canonicalize(const Opts& o) {
    const ReactionNetwork net = canonicalize(load_system(o.input));
    if (o.format == "text")
        emit(serialize_network(net), o.out);
    else
        emit_json(io::to_json(net), o.out);
    return kOk;
}

int run_induce(const Opts& o) {
    const ReactionNetwork net = parse_network(io::read_file(o.input));
    emit_json(io::to_json(induce_kinetics(net)), o.out);
    return kOk;
}

int run_casestudy(const Opts& o) {
    const cs::Variant v = cs::variant_from_string(o.variant);
    const auto b = cs::build_variant(o.p, v, !o.no_check);
    Json j;
    j["variant"] = cs::to_string(v);
    Json params;
    for (const auto& [k, val] : o.p.bundle()) params[k] = val;
    j["params"] = params;
    j["constraints"] = io::to_json(b.constraints, o.p.bundle());
    j["coefficients"] = io::to_json(b.coefficients);
    j["transform"] = io::to_json(b.spec);
    j["system"] = io::to_json(b.system);
    j["kinetic"] = is_kinetic(b.system);

    if (!o.network_out.empty()) {
        ReactionNetwork net;
        switch (v) {
            case cs::Variant::xfact: net = cs::published_network(o.p, cs::PublishedNetwork::xfact, !o.no_check); break;
            case cs::Variant::sheared_xfact:
                net = cs::published_network(o.p, cs::PublishedNetwork::sheared_xfact, !o.no_check);
                break;
            case cs::Variant::hybrid:
                net = cs::published_network(o.p, cs::PublishedNetwork::hybrid, !o.no_check);
                break;
            default: net = canonicalize(b.system); break;
        }
        io::write_file(o.network_out, serialize_network(net));
        j["network"] = io::to_json(net);
    }
    emit_json(j, o.out);
    return kOk;
}

int run_simulate(const Opts& o) {
    const PolySystem sys = load_system(o.input);
    const auto x0 = parse_csv(o.x0);
    if (x0.size() != sys.dimension())
        throw io::FormatError("--x0 has " + std::to_string(x0.size()) + " values, system has " +
                              std::to_string(sys.dimension()) + " variables");
    IntegrationOptions io_opt;
    io_opt.rtol = o.rtol;
    io_opt.atol = o.atol;
    io_opt.record_every = o.record_every;
    const auto tr = integrate(sys, x0, o.t0, o.t_end, io_opt);
    emit(io::trajectory_csv(tr, sys.variables()), o.out);
    Json s;
    s["status"] = to_string(tr.status);
    s["final_time"] = tr.final_time;
    s["final_state"] = tr.final_state;
    s["accepted"] = tr.accepted;
    s["rejected"] = tr.rejected;
    s["stiff_fallback"] = tr.used_stiff_fallback;
    std::cerr << io::dump(s);
    return tr.status == IntegrationStatus::completed ? kOk : kDomain;
}

int run_melnikov(const Opts& o) {
    MelnikovOptions mo;
    const auto m = melnikov_at_zero(o.p.a, std::nullopt, mo);
    Json j = io::to_json(m, o.samples);
    j = Json{{"a", o.p.a}, {"melnikov", j}};
    emit_json(j, o.out);
    return kOk;
}

int run_verify(const Opts& o) {
    const auto seed = resolve_seed(o.seed);
    const auto results = verify::run_suite(o.suite, seed);
    bool all = true;
    if (o.format == "json") {
        Json arr = Json::array();
        for (const auto& r : results) {
            arr.push_back({{"id", r.id}, {"key", r.key}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
            all = all && r.pass;
        }
        emit_json(Json{{"seed", seed}, {"results", arr}, {"pass", all}}, o.out);
    } else {
        std::string text;
        for (const auto& r : results) {
            text += verify::format_line(r) + "\n";
            all = all && r.pass;
        }
        emit(text, o.out);
    }
    return all ? kOk : kDomain;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crnforge: polynomial ODEs, mass-action kinetics and the alpha-loop case study"};
    app.require_subcommand(1);
    Opts o;

    auto* classify_cmd = app.add_subcommand("classify", "kinetic / nonnegativity / x-factorability report");
    classify_cmd->add_option("input", o.input, "system JSON")->required()->check(CLI::ExistingFile);
    classify_cmd->add_option("--upper", o.upper, "face sampling bound (3+ variables)");

    auto* transform_cmd = app.add_subcommand("transform", "apply a transformation spec");
    transform_cmd->add_option("input", o.input, "system JSON")->required()->check(CLI::ExistingFile);
    transform_cmd->add_option("--spec", o.spec, "spec JSON")->required()->check(CLI::ExistingFile);

    auto* canon_cmd = app.add_subcommand("canonicalize", "canonical reaction network of a kinetic system");
    canon_cmd->add_option("input", o.input, "system JSON")->required()->check(CLI::ExistingFile);

    auto* induce_cmd = app.add_subcommand("induce", "mass-action system of a network");
    induce_cmd->add_option("input", o.input, "network text file")->required()->check(CLI::ExistingFile);

    auto* case_cmd = app.add_subcommand("casestudy", "build a case-study variant");
    case_cmd->add_option("--variant", o.variant, "translated | xfact | sheared_xfact | qssa | hybrid")
        ->check(CLI::IsMember({"translated", "xfact", "sheared_xfact", "qssa", "hybrid"}));
    case_cmd->add_option("--a", o.p.a);
    case_cmd->add_option("--alpha", o.p.alpha);
    case_cmd->add_option("--t1", o.p.t1);
    case_cmd->add_option("--t2", o.p.t2);
    case_cmd->add_option("--t", o.p.t, "shared translation (sheared_xfact)");
    case_cmd->add_option("--omega1", o.p.omega1);
    case_cmd->add_option("--omega2", o.p.omega2);
    case_cmd->add_option("--omega", o.p.omega, "hybrid");
    case_cmd->add_option("--mu", o.p.mu);
    case_cmd->add_option("--network", o.network_out, "write the reaction network (text format) here");
    case_cmd->add_flag("--no-check", o.no_check, "skip the variant's constraint set");

    auto* sim_cmd = app.add_subcommand("simulate", "integrate a system, CSV trajectory out");
    sim_cmd->add_option("input", o.input, "system JSON")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--x0", o.x0, "initial state, comma separated")->required();
    sim_cmd->add_option("--t0", o.t0);
    sim_cmd->add_option("--t-end", o.t_end)->required();
    sim_cmd->add_option("--rtol", o.rtol)->check(CLI::PositiveNumber);
    sim_cmd->add_option("--atol", o.atol)->check(CLI::PositiveNumber);
    sim_cmd->add_option("--record-every", o.record_every)->check(CLI::PositiveNumber);

    auto* mel_cmd = app.add_subcommand("melnikov", "Melnikov integral M(0) of the base system");
    mel_cmd->add_option("--a", o.p.a)->required();
    mel_cmd->add_flag("--samples", o.samples, "include phi samples");

    auto* ver_cmd = app.add_subcommand("verify", "run acceptance criteria");
    ver_cmd->add_option("--suite", o.suite, "all, a key, a number, or a comma list");
    ver_cmd->add_option("--seed", o.seed, "defaults to $CRNFORGE_SEED, then 42");

    for (auto* c : {classify_cmd, canon_cmd, ver_cmd})
        c->add_option("--format", o.format, "json | text")->check(CLI::IsMember({"json", "text"}));
    for (auto* c : {classify_cmd, transform_cmd, canon_cmd, induce_cmd, case_cmd, sim_cmd, mel_cmd, ver_cmd})
        c->add_option("-o,--out", o.out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*classify_cmd) return run_classify(o);
        if (*transform_cmd) return run_transform(o);
        if (*canon_cmd) return run_canonicalize(o);
        if (*induce_cmd) return run_induce(o);
        if (*case_cmd) return run_casestudy(o);
        if (*sim_cmd) return run_simulate(o);
        if (*mel_cmd) return run_melnikov(o);
        if (*ver_cmd) {
            if (o.format == "json" && ver_cmd->count("--format") == 0) o.format = "text";
            return run_verify(o);
        }
    } catch (const io::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConstraintViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const NotKinetic& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& f : e.offenders())
            std::cerr << "  equation " << f.equation + 1 << " coefficient " << io::format_double(f.coeff) << "\n";
        return kDomain;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kDomain;
    }
    return kUsage;
}
