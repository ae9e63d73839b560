#pragma once

#include "reebflow/circulation.hpp"
#include "reebflow/polytope.hpp"
#include "reebflow/reeb_graph.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace reebflow {

using Json = nlohmann::ordered_json;

// Malformed input files. The CLI maps this to exit code 3.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact values become strings ("3", "-1/2"), doubles stay numbers.
Json to_json(const Scalar& s);
// Strings "p/q" and integer literals are exact; other numbers are doubles.
Scalar scalar_from_json(const Json& j);

Json to_json(const ScalarPoly& p);
ScalarPoly poly_from_json(const Json& j);

Json to_json(const EdgeMeasure& m);
EdgeMeasure measure_from_json(const Json& j);

Json to_json(const MeasuredReebGraph& g);
MeasuredReebGraph graph_from_json(const Json& j);

Json to_json(const ValidationReport& r);

// {"head_limits": {edge_id: value}}
Json to_json(const CirculationFunction& c);
CirculationFunction circulation_from_json(const MeasuredReebGraph& g, const Json& j);

Json to_json(const AffineCirculationSpace& s);
Json to_json(const SaddleLimits& s, const MeasuredReebGraph& g);
Json to_json(const Verdict& v, const MeasuredReebGraph& g);

Json to_json(const HRep& h);
HRep hrep_from_json(const Json& j);
Json to_json(const VRep& v);
Json to_json(const Feasibility& f);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
MeasuredReebGraph load_graph(const std::string& path);

// Stable text form used for every emitted report (2-space indent, newline).
std::string dump(const Json& j);

}  // namespace reebflow
