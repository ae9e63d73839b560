#include "reebflow/io.hpp"

#include <fstream>
#include <sstream>

namespace reebflow {

Json to_json(const Scalar& s)
{
    if (s.is_exact())
        return s.to_string();
    return s.to_double();
}

Scalar scalar_from_json(const Json& j)
{
    try {
        if (j.is_string())
            return Scalar::parse(j.get<std::string>(), true);
        if (j.is_number_integer())
            return Scalar::parse(j.dump());
        if (j.is_number_float())
            return Scalar(j.get<double>());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("bad number: ") + e.what());
    }
    throw ParseError("expected a number or a \"p/q\" string, got " + j.dump());
}

Json to_json(const ScalarPoly& p)
{
    Json a = Json::array();
    for (const auto& c : p.coeffs())
        a.push_back(to_json(c));
    return a;
}

ScalarPoly poly_from_json(const Json& j)
{
    if (j.is_string())
        return parse_polynomial(j.get<std::string>());
    if (!j.is_array())
        throw ParseError("polynomial must be a coefficient array or an expression string");
    std::vector<Scalar> c;
    for (const auto& x : j)
        c.push_back(scalar_from_json(x));
    return ScalarPoly(std::move(c));
}

namespace {

const Json& need(const Json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
        throw ParseError(where + ": missing \"" + key + "\"");
    return j.at(key);
}

std::string need_string(const Json& j, const char* key, const std::string& where)
{
    const Json& v = need(j, key, where);
    if (!v.is_string())
        throw ParseError(where + ": \"" + key + "\" must be a string");
    return v.get<std::string>();
}

std::vector<double> doubles(const Json& j, const std::string& where)
{
    if (!j.is_array())
        throw ParseError(where + " must be an array");
    std::vector<double> out;
    for (const auto& x : j)
        out.push_back(scalar_from_json(x).to_double());
    return out;
}

}  // namespace

Json to_json(const EdgeMeasure& m)
{
    Json j;
    if (m.kind() == EdgeMeasure::Kind::Table) {
        j["kind"] = "table";
        j["f"] = m.table_data().f;
        j["cumulative"] = m.table_data().cumulative;
        return j;
    }
    j["kind"] = "poly_log";
    j["poly"] = to_json(m.poly());
    if (!m.logs().empty()) {
        Json logs = Json::array();
        for (const auto& t : m.logs()) {
            Json lt;
            lt["anchor"] = t.side == AnchorSide::Tail ? "tail" : "head";
            lt["coef"] = t.coef;
            if (t.at)
                lt["at"] = to_json(*t.at);
            logs.push_back(lt);
        }
        j["log_terms"] = logs;
    }
    if (!m.patches().empty()) {
        Json ps = Json::array();
        for (const auto& p : m.patches()) {
            Json pj;
            pj["lo"] = to_json(p.lo);
            pj["hi"] = to_json(p.hi);
            pj["poly"] = to_json(p.poly);
            ps.push_back(pj);
        }
        j["patches"] = ps;
    }
    return j;
}

EdgeMeasure measure_from_json(const Json& j)
{
    const std::string where = "measure";
    std::string kind = j.contains("kind") ? need_string(j, "kind", where) : "poly_log";
    if (kind == "table") {
        CumulativeTable t{doubles(need(j, "f", where), "measure.f"),
                          doubles(need(j, "cumulative", where), "measure.cumulative")};
        try {
            return EdgeMeasure::table(std::move(t));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what());
        }
    }
    if (kind != "poly_log")
        throw ParseError("unknown measure kind \"" + kind + "\"");
    ScalarPoly poly = poly_from_json(need(j, "poly", where));
    std::vector<LogTerm> logs;
    if (j.contains("log_terms"))
        for (const auto& lt : j.at("log_terms")) {
            LogTerm t;
            std::string anchor = need_string(lt, "anchor", "log term");
            if (anchor == "tail")
                t.side = AnchorSide::Tail;
            else if (anchor == "head")
                t.side = AnchorSide::Head;
            else
                throw ParseError("log term anchor must be \"tail\" or \"head\"");
            t.coef = scalar_from_json(need(lt, "coef", "log term")).to_double();
            if (lt.contains("at"))
                t.at = scalar_from_json(lt.at("at"));
            logs.push_back(t);
        }
    std::vector<PolyPatch> patches;
    if (j.contains("patches"))
        for (const auto& pj : j.at("patches"))
            patches.push_back({scalar_from_json(need(pj, "lo", "patch")), scalar_from_json(need(pj, "hi", "patch")),
                               poly_from_json(need(pj, "poly", "patch"))});
    return EdgeMeasure::poly_log(std::move(poly), std::move(logs), std::move(patches));
}

Json to_json(const MeasuredReebGraph& g)
{
    Json j;
    Json vs = Json::array();
    for (const auto& v : g.vertices()) {
        Json vj;
        vj["id"] = v.id;
        vj["role"] = to_string(v.role);
        vj["f"] = to_json(v.f);
        vs.push_back(vj);
    }
    Json es = Json::array();
    for (const auto& e : g.edges()) {
        Json ej;
        ej["id"] = e.id;
        ej["tail"] = e.tail;
        ej["head"] = e.head;
        ej["measure"] = to_json(e.measure);
        if (e.weight)
            ej["weight"] = to_json(*e.weight);
        es.push_back(ej);
    }
    j["vertices"] = vs;
    j["edges"] = es;
    const auto& s = g.surface();
    if (s.genus || s.boundary_components) {
        Json sj = Json::object();
        if (s.genus)
            sj["genus"] = *s.genus;
        if (s.boundary_components)
            sj["boundary_components"] = *s.boundary_components;
        j["surface"] = sj;
    }
    if (!g.coordinates().empty()) {
        Json cs = Json::array();
        for (const auto& c : g.coordinates())
            cs.push_back(Json{{"vertex", c.vertex}, {"edge", c.edge}});
        j["coordinates"] = cs;
    }
    if (g.tolerance() != 1e-12)
        j["tolerance"] = g.tolerance();
    return j;
}

MeasuredReebGraph graph_from_json(const Json& j)
{
    if (!j.is_object())
        throw ParseError("graph file must hold a JSON object");
    std::vector<Vertex> vertices;
    for (const auto& vj : need(j, "vertices", "graph")) {
        Vertex v;
        v.id = need_string(vj, "id", "vertex");
        try {
            v.role = parse_role(need_string(vj, "role", "vertex " + v.id));
        } catch (const std::invalid_argument& e) {
            throw ParseError("vertex " + v.id + ": " + e.what());
        }
        v.f = scalar_from_json(need(vj, "f", "vertex " + v.id));
        vertices.push_back(std::move(v));
    }
    std::vector<Edge> edges;
    for (const auto& ej : need(j, "edges", "graph")) {
        Edge e;
        e.id = need_string(ej, "id", "edge");
        e.tail = need_string(ej, "tail", "edge " + e.id);
        e.head = need_string(ej, "head", "edge " + e.id);
        if (ej.contains("measure"))
            e.measure = measure_from_json(ej.at("measure"));
        if (ej.contains("weight"))
            e.weight = scalar_from_json(ej.at("weight"));
        edges.push_back(std::move(e));
    }
    SurfaceInfo s;
    if (j.contains("surface")) {
        const Json& sj = j.at("surface");
        if (sj.contains("genus"))
            s.genus = sj.at("genus").get<int>();
        if (sj.contains("boundary_components"))
            s.boundary_components = sj.at("boundary_components").get<int>();
    }
    std::vector<LimitRef> coords;
    if (j.contains("coordinates"))
        for (const auto& cj : j.at("coordinates"))
            coords.push_back({need_string(cj, "vertex", "coordinate"), need_string(cj, "edge", "coordinate")});
    double tol = j.contains("tolerance") ? j.at("tolerance").get<double>() : 1e-12;
    return MeasuredReebGraph(std::move(vertices), std::move(edges), s, std::move(coords), tol);
}

Json to_json(const ValidationReport& r)
{
    Json j;
    j["valid"] = r.ok();
    Json vs = Json::array();
    for (const auto& v : r.violations)
        vs.push_back(Json{{"kind", v.kind}, {"subject", v.subject}, {"message", v.message}});
    j["violations"] = vs;
    return j;
}

Json to_json(const CirculationFunction& c)
{
    Json limits = Json::object();
    const auto& g = c.graph();
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        limits[g.edge(e).id] = to_json(c.head_limit(e));
    return Json{{"head_limits", limits}};
}

CirculationFunction circulation_from_json(const MeasuredReebGraph& g, const Json& j)
{
    const Json& limits = need(j, "head_limits", "circulation");
    std::vector<Scalar> head(g.edge_count());
    std::vector<bool> seen(g.edge_count(), false);
    for (const auto& [id, v] : limits.items()) {
        auto e = g.find_edge(id);
        if (!e)
            throw ParseError("circulation names unknown edge \"" + id + "\"");
        head[*e] = scalar_from_json(v);
        seen[*e] = true;
    }
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        if (!seen[e])
            throw ParseError("circulation has no head limit for edge \"" + g.edge(e).id + "\"");
    return CirculationFunction(g, std::move(head));
}

Json to_json(const AffineCirculationSpace& s)
{
    Json j;
    j["dim"] = s.dim();
    j["coordinates"] = s.labels;
    j["particular"] = to_json(s.particular_function());
    Json basis = Json::array();
    for (const auto& b : s.basis) {
        Json limits = Json::object();
        for (std::size_t e = 0; e < s.graph.edge_count(); ++e)
            limits[s.graph.edge(e).id] = to_json(b[e]);
        basis.push_back(Json{{"head_limits", limits}});
    }
    j["basis"] = basis;
    j["arith"] = s.is_exact() ? "exact" : "float";
    j["residual"] = s.residual;
    if (s.warning)
        j["warning"] = *s.warning;
    return j;
}

Json to_json(const SaddleLimits& s, const MeasuredReebGraph& g)
{
    Json j;
    j["vertex"] = g.vertex(s.vertex).id;
    j["trunk"] = Json{{"edge", g.edge(s.edges[0]).id}, {"limit", to_json(s.limits[0])}};
    Json br = Json::array();
    for (int k = 1; k < 3; ++k)
        br.push_back(Json{{"edge", g.edge(s.edges[k]).id}, {"limit", to_json(s.limits[k])}});
    j["branches"] = br;
    return j;
}

Json to_json(const Verdict& v, const MeasuredReebGraph& g)
{
    Json j;
    switch (v.status) {
    case Verdict::Status::Holds: j["status"] = "holds"; break;
    case Verdict::Status::Fails: j["status"] = "fails"; break;
    case Verdict::Status::Indeterminate: j["status"] = "indeterminate"; break;
    }
    if (v.witness)
        j["witness"] = to_json(*v.witness, g);
    return j;
}

Json to_json(const HRep& h)
{
    Json rows = Json::array();
    for (const auto& r : h.rows) {
        Json n = Json::array();
        for (const auto& x : r.normal)
            n.push_back(to_json(x));
        Json row;
        row["normal"] = n;
        row["offset"] = to_json(r.offset);
        row["strict"] = r.strict;
        if (!r.vertex.empty())
            row["vertex"] = r.vertex;
        if (!r.edge.empty())
            row["edge"] = r.edge;
        rows.push_back(row);
    }
    return rows;
}

HRep hrep_from_json(const Json& j)
{
    HRep h;
    h.dim = need(j, "dim", "polytope").get<int>();
    if (j.contains("coordinates"))
        h.labels = j.at("coordinates").get<std::vector<std::string>>();
    for (const auto& rj : need(j, "H", "polytope")) {
        Inequality r;
        for (const auto& x : need(rj, "normal", "inequality"))
            r.normal.push_back(scalar_from_json(x));
        if (static_cast<int>(r.normal.size()) != h.dim)
            throw ParseError("inequality normal length does not match dim");
        r.offset = scalar_from_json(need(rj, "offset", "inequality"));
        r.strict = rj.value("strict", true);
        r.vertex = rj.value("vertex", "");
        r.edge = rj.value("edge", "");
        h.rows.push_back(std::move(r));
    }
    return h;
}

namespace {

Json vectors(const std::vector<std::vector<Scalar>>& vs)
{
    Json a = Json::array();
    for (const auto& v : vs) {
        Json p = Json::array();
        for (const auto& x : v)
            p.push_back(to_json(x));
        a.push_back(p);
    }
    return a;
}

}  // namespace

Json to_json(const VRep& v)
{
    return Json{{"vertices", vectors(v.vertices)}, {"rays", vectors(v.rays)}};
}

Json to_json(const Feasibility& f)
{
    Json j;
    j["status"] = f.feasible ? "feasible" : "empty";
    if (f.feasible) {
        j["interior_point"] = vectors({f.point})[0];
        if (f.unbounded_slack)
            j["slack"] = "inf";
        else
            j["slack"] = to_json(f.slack);
    }
    return j;
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

MeasuredReebGraph load_graph(const std::string& path)
{
    try {
        return graph_from_json(read_json_file(path));
    } catch (const Json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string dump(const Json& j)
{
    return j.dump(2) + "\n";
}

}  // namespace reebflow
