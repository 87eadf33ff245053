#pragma once

#include "crnforge/classify.hpp"
#include "crnforge/crn.hpp"
#include "crnforge/dynamics.hpp"
#include "crnforge/errors.hpp"
#include "crnforge/homoclinic.hpp"
#include "crnforge/poly.hpp"
#include "crnforge/transform.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace crnforge::io {

using Json = nlohmann::ordered_json;

// Malformed input documents.
class FormatError : public Error {
public:
    using Error::Error;
};

// Serializes with every floating-point number written as %.17g.
std::string dump(const Json& j, int indent = 2);
Json parse(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// {"variables": [...], "equations": [[{"coeff": c, "exponents": [...]}, ...], ...], "params": {...}}
Json to_json(const PolySystem& sys);
PolySystem system_from_json(const Json& j);

Json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j, const VariableList& vars);

// {"steps": [{"kind": "affine" | "xfactor" | "qssa", ...}, ...]}, steps in application order.
Json to_json(const TransformSpec& spec);
TransformSpec spec_from_json(const Json& j, const VariableList& vars);

Json to_json(const ClassificationReport& r, const std::vector<std::string>& vars);
Json to_json(const casestudy::CoefficientRecord& rec);
Json to_json(const ConstraintSet& c, const ParamBundle& p);
Json to_json(const ReactionNetwork& net);
Json to_json(const MelnikovResult& m, bool with_samples = false);
Json to_json(const FixedPointReport& f);
Json to_json(const TransformResult& r);

// Header t,<var1>,...; 17 significant digits.
std::string trajectory_csv(const TrajectoryRecord& tr, const std::vector<std::string>& vars);

std::string format_double(double v);

}  // namespace crnforge::io
