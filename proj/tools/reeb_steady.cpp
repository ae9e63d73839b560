// reeb-steady: command-line front end for the reebflow library.
//
// Exit codes: 0 success / admits a steady flow, 2 decisively negative answer,
// 3 invalid input, 4 tolerance or internal failure, 64 usage error.

#include "reebflow/casimirs.hpp"
#include "reebflow/certificate.hpp"
#include "reebflow/circulation.hpp"
#include "reebflow/generators.hpp"
#include "reebflow/io.hpp"
#include "reebflow/mesh.hpp"
#include "reebflow/polytope.hpp"
#include "reebflow/reports.hpp"
#include "reebflow/steady_triple.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace reebflow;

namespace {

enum Exit { Ok = 0, Negative = 2, BadInput = 3, Internal = 4, Usage = 64 };

// Thrown for rejections that are the user's fault but not parse errors.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string arith;  // "", "exact" or "float"
    double tol = 1e-9;
    unsigned order = 10;
    std::string out;
    std::string coords;
};

void emit(const Common& c, const Json& j)
{
    if (c.out.empty())
        std::cout << dump(j);
    else
        write_text_file(c.out, dump(j));
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty())
            out.push_back(cur);
    return out;
}

MeasuredReebGraph prepare(const Common& c, MeasuredReebGraph g)
{
    if (c.arith == "float")
        return g.as_float();
    if (c.arith == "exact" && !g.is_exact())
        throw InputError("--arith exact needs rational heights, measures and weights");
    return g;
}

MeasuredReebGraph load(const Common& c, const std::string& path)
{
    return prepare(c, load_graph(path));
}

// Circulation space with --coords (or the graph's declared coordinates) applied.
std::optional<AffineCirculationSpace> space_of(const Common& c, const MeasuredReebGraph& g, Json& report)
{
    CirculationSolve sol = c.coords.empty() ? solve_with_declared_coordinates(g) : solve_circulation_space(g);
    if (auto* inf = std::get_if<Infeasible>(&sol)) {
        report["status"] = "no circulation function";
        report["total_weight"] = to_json(inf->total_weight);
        report["residual"] = inf->residual;
        report["reason"] = inf->reason;
        return std::nullopt;
    }
    auto space = std::get<AffineCirculationSpace>(sol);
    if (!c.coords.empty()) {
        std::vector<LimitRef> refs;
        for (const auto& item : split(c.coords, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos)
                throw InputError("--coords expects VERTEX:EDGE pairs, got '" + item + "'");
            refs.push_back({item.substr(0, colon), item.substr(colon + 1)});
        }
        space = space.reparametrize(refs);
    }
    return space;
}

Json interval_of(const VRep& v)
{
    // 1-D: closure is [lo, hi] with a ray marking an open side
    Json j = Json::array();
    std::optional<Scalar> lo, hi;
    for (const auto& p : v.vertices) {
        if (!lo || p[0] < *lo)
            lo = p[0];
        if (!hi || *hi < p[0])
            hi = p[0];
    }
    bool down = false, up = false;
    for (const auto& r : v.rays) {
        down |= r[0] < Scalar(0);
        up |= Scalar(0) < r[0];
    }
    j.push_back(down || !lo ? Json("-inf") : to_json(*lo));
    j.push_back(up || !hi ? Json("inf") : to_json(*hi));
    return j;
}

int cmd_validate(const Common& c, const std::string& path)
{
    auto g = load(c, path);
    auto rep = validate_graph(g);
    Json j = to_json(rep);
    if (rep.ok()) {
        auto h = homology_dimensions(g);
        j["homology"] = {{"b1", h.b1}, {"relative_dim", h.relative_dim}, {"boundary_count", h.boundary_count}};
    }
    emit(c, j);
    return rep.ok() ? Ok : BadInput;
}

int cmd_space(const Common& c, const std::string& path, const std::string& point)
{
    auto g = load(c, path);
    require_valid(g);
    Json j;
    auto space = space_of(c, g, j);
    if (!space) {
        emit(c, j);
        return Negative;
    }
    if (!point.empty()) {
        std::vector<Scalar> t;
        for (const auto& s : split(point, ','))
            t.push_back(Scalar::parse(s));
        if (static_cast<int>(t.size()) != space->dim())
            throw InputError("--point needs " + std::to_string(space->dim()) + " coordinates");
        emit(c, to_json(space->point(t)));
        return Ok;
    }
    emit(c, to_json(*space));
    return Ok;
}

int cmd_check_steady(const Common& c, const std::string& path, const std::string& a)
{
    auto g = load_graph(path);
    if (!a.empty()) {
        std::vector<Scalar> w;
        for (const auto& s : split(a, ','))
            w.push_back(Scalar::parse(s));
        if (w.size() != g.edge_count())
            throw InputError("--a needs one weight per edge (" + std::to_string(g.edge_count()) + ")");
        g = g.with_weights(w);
    }
    g = prepare(c, g);
    require_valid(g);
    Json j;
    auto space = space_of(c, g, j);
    if (!space) {
        emit(c, j);
        return Negative;
    }
    j["dim"] = space->dim();
    j["coordinates"] = space->labels;
    if (g.has_boundary()) {
        j["surface"] = "bordered";
        Json regions = Json::array();
        bool any = false;
        for (const auto& r : balanced_regions(*space)) {
            regions.push_back(to_json(r));
            any |= r.verdict.feasible;
        }
        j["regions"] = regions;
        j["status"] = any ? "admits steady flow" : "no balanced region";
        emit(c, j);
        return any ? Ok : Negative;
    }
    j["surface"] = "closed";
    HRep h = negative_system(*space);
    Feasibility f = feasibility(h);
    j["H"] = to_json(h);
    j["feasibility"] = to_json(f);
    if (f.feasible) {
        j["status"] = "admits steady flow";
        j["bounded"] = boundedness(h).bounded;
        if (h.is_exact() && h.dim <= 6 && h.dim > 0) {
            VRep v = enumerate_vertices(h);
            j["V"] = to_json(v);
            if (h.dim == 1) {
                // strict inequalities: the admissible set is the open interval
                j["interval"] = interval_of(v);
                j["interval_open"] = true;
            }
        }
    } else {
        j["status"] = "empty polytope";
    }
    emit(c, j);
    return f.feasible ? Ok : Negative;
}

int cmd_polytope(const Common& c, const std::string& path, bool vertices)
{
    auto g = load(c, path);
    require_valid(g);
    if (g.has_boundary())
        throw InputError("polytope needs a closed graph; use check-steady for balanced regions");
    Json j;
    auto space = space_of(c, g, j);
    if (!space) {
        emit(c, j);
        return Negative;
    }
    HRep h = negative_system(*space);
    Feasibility f = feasibility(h);
    j["dim"] = h.dim;
    j["coordinates"] = h.labels;
    j["H"] = to_json(h);
    if (vertices) {
        if (!h.is_exact())
            throw InputError("vertex enumeration needs exact arithmetic");
        j["V"] = to_json(enumerate_vertices(h));
    }
    j["status"] = f.feasible ? "feasible" : "empty";
    j["bounded"] = boundedness(h).bounded;
    emit(c, j);
    return f.feasible ? Ok : Negative;
}

int cmd_casimirs(const Common& c, const std::string& path, const std::string& csv)
{
    auto g = load(c, path);
    require_valid(g);
    auto t = moment_table(g, c.order);
    if (!csv.empty())
        write_text_file(csv, moment_table_csv(t));
    emit(c, to_json(t));
    return Ok;
}

CirculationFunction circulation_for(const MeasuredReebGraph& g, const std::string& file)
{
    if (!file.empty())
        return circulation_from_json(g, read_json_file(file));
    CirculationSolve sol = solve_circulation_space(g);
    if (std::holds_alternative<Infeasible>(sol))
        throw InputError("graph admits no circulation function");
    const auto& space = std::get<AffineCirculationSpace>(sol);
    if (space.dim() != 0)
        throw InputError("circulation space has dimension " + std::to_string(space.dim())
                         + "; pass a circulation file");
    return space.particular_function();
}

int cmd_orbit(const Common& c, const std::string& p1, const std::string& p2, const std::string& c1,
              const std::string& c2)
{
    auto g1 = load(c, p1), g2 = load(c, p2);
    require_valid(g1);
    require_valid(g2);
    auto cmp = orbit_equivalent(circulation_for(g1, c1), circulation_for(g2, c2), c.order, c.tol);
    emit(c, to_json(cmp, g1, g2));
    return cmp.equivalent ? Ok : Negative;
}

struct TripleArgs {
    std::string chart = "cylinder";
    std::string zeta = "s";
    double c = 1.0;
    int eps = 0;  // 0 follows sgn c
    double smin = -1.0, smax = 1.0, radius = 1.0;
    int grid = 200, levels = 100;
    double h = 1e-4;
};

int cmd_verify(const Common& c, const TripleArgs& a)
{
    ScalarPoly zeta = parse_polynomial(a.zeta);
    ChartKind kind = parse_chart(a.chart);
    std::optional<SteadyTriple> t;
    switch (kind) {
    case ChartKind::Cylinder: t = SteadyTriple::cylinder(zeta, a.c, a.smin, a.smax); break;
    case ChartKind::Elliptic: t = SteadyTriple::elliptic(zeta, a.smax); break;
    case ChartKind::Hyperbolic:
        t = SteadyTriple::hyperbolic(zeta, a.eps != 0 ? a.eps : (a.c < 0 ? -1 : 1), a.c, a.radius);
        break;
    }
    VerifyOptions opt;
    opt.grid = a.grid;
    opt.levels = a.levels;
    opt.h = a.h;
    auto rep = verify_triple(*t, opt);
    Json j = to_json(rep);
    if (kind == ChartKind::Hyperbolic) {
        j["rotated"] = t->rotated();
        j["radius"] = t->radius();
    }
    emit(c, j);
    return rep.passed() ? Ok : Internal;
}

int cmd_certificate(const Common& c, const std::string& gp, const std::string& cp, bool force)
{
    auto g = load(c, gp);
    require_valid(g);
    auto circ = circulation_from_json(g, read_json_file(cp));
    Verdict v = is_balanced(circ, c.tol);
    if (!v.holds() && !force) {
        Json j;
        j["ok"] = false;
        j["balanced"] = to_json(v, g);
        emit(c, j);
        return Negative;
    }
    auto cert = graph_certificate(circ, force);
    emit(c, to_json(cert));
    return cert.ok ? Ok : Negative;
}

int cmd_extract(const Common& c, const std::string& mesh_path, const std::string& diag)
{
    Mesh m = load_mesh(mesh_path);
    auto r = extract_reeb(m);
    if (!diag.empty()) {
        Json d;
        d["saddles"] = diagnostics_json(r);
        d["compatibility"] = to_json(compatibility_check(r.graph, m));
        write_text_file(diag, dump(d));
    }
    emit(c, to_json(r.graph));
    return Ok;
}

int cmd_generate(const Common& c, const std::string& family, int genus, int boundary, int leaves,
                 std::uint64_t seed)
{
    gen::FamilyParams p;
    p.family = gen::parse_family(family);
    p.genus = genus;
    p.boundary = boundary;
    p.max_side_leaves = leaves;
    gen::Rng rng(seed);
    emit(c, to_json(gen::random_graph(rng, p)));
    return Ok;
}

void report_error(const std::string& kind, const std::string& msg)
{
    Json j;
    j["error"] = kind;
    j["message"] = msg;
    std::cerr << dump(j);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady Euler flows from measured Reeb graphs"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--arith", common.arith, "exact or float (default: exact when the input is rational)")
        ->check(CLI::IsMember({"exact", "float"}));
    app.add_option("--tol", common.tol, "comparison tolerance for float values");
    app.add_option("--order", common.order, "highest moment order");
    app.add_option("--out", common.out, "write the report here instead of stdout");
    app.add_option("--coords", common.coords, "coordinates as VERTEX:EDGE,... limit functionals");

    std::string g1, g2, c1, c2, point, a, csv, diag, mesh_path, family = "closed";
    bool vertices = false, force = false;
    int genus = 1, boundary = 1, leaves = 2;
    std::uint64_t seed = 1;
    TripleArgs ta;

    auto* validate = app.add_subcommand("validate", "check graph well-formedness");
    validate->add_option("graph", g1)->required();
    auto* space = app.add_subcommand("circulation-space", "affine space of circulation functions");
    space->add_option("graph", g1)->required();
    space->add_option("--point", point, "emit the circulation function at these coordinates");
    auto* steady = app.add_subcommand("check-steady", "does the orbit admit a steady flow");
    steady->add_option("graph", g1)->required();
    steady->add_option("--a", a, "override edge weights, comma separated in edge order");
    auto* poly = app.add_subcommand("polytope", "polytope of totally negative circulation functions");
    poly->add_option("graph", g1)->required();
    poly->add_flag("--vertices", vertices, "enumerate vertices and rays");
    auto* cas = app.add_subcommand("casimirs", "per-edge moment table");
    cas->add_option("graph", g1)->required();
    cas->add_option("--csv", csv, "also write the table as CSV");
    auto* orbit = app.add_subcommand("orbit-equiv", "compare two circulation graphs");
    orbit->add_option("graph1", g1)->required();
    orbit->add_option("graph2", g2)->required();
    orbit->add_option("--c1", c1, "circulation function for graph1");
    orbit->add_option("--c2", c2, "circulation function for graph2");
    auto* verify = app.add_subcommand("verify-triple", "verify a local steady triple");
    verify->add_option("--chart", ta.chart)->check(CLI::IsMember({"cylinder", "elliptic", "hyperbolic"}));
    verify->add_option("--zeta", ta.zeta, "vorticity profile as a polynomial in s");
    verify->add_option("--c", ta.c, "circulation");
    verify->add_option("--eps", ta.eps, "hyperbolic sign, +1 or -1 (default: sign of c)");
    verify->add_option("--smin", ta.smin);
    verify->add_option("--smax", ta.smax);
    verify->add_option("--radius", ta.radius);
    verify->add_option("--grid", ta.grid);
    verify->add_option("--levels", ta.levels);
    verify->add_option("--fd-step", ta.h, "finite-difference step");
    auto* cert = app.add_subcommand("certificate", "graph-form certificate for a balanced circulation");
    cert->add_option("graph", g1)->required();
    cert->add_option("circulation", c1)->required();
    cert->add_flag("--force", force, "skip the balance precondition and report failures");
    auto* extract = app.add_subcommand("reeb-extract", "measured Reeb graph from a triangle mesh");
    extract->add_option("mesh", mesh_path)->required();
    extract->add_option("--diagnostics", diag, "write saddle log-fit samples and compatibility checks");
    auto* generate = app.add_subcommand("generate", "random graph from a family");
    generate->add_option("--family", family)->check(CLI::IsMember({"tree", "closed", "bordered"}));
    generate->add_option("--genus", genus);
    generate->add_option("--boundary", boundary);
    generate->add_option("--leaves", leaves);
    generate->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return Usage;
    }

    try {
        if (*validate)
            return cmd_validate(common, g1);
        if (*space)
            return cmd_space(common, g1, point);
        if (*steady)
            return cmd_check_steady(common, g1, a);
        if (*poly)
            return cmd_polytope(common, g1, vertices);
        if (*cas)
            return cmd_casimirs(common, g1, csv);
        if (*orbit)
            return cmd_orbit(common, g1, g2, c1, c2);
        if (*verify)
            return cmd_verify(common, ta);
        if (*cert)
            return cmd_certificate(common, g1, c1, force);
        if (*extract)
            return cmd_extract(common, mesh_path, diag);
        if (*generate)
            return cmd_generate(common, family, genus, boundary, leaves, seed);
    } catch (const InvalidGraphError& e) {
        Json j;
        j["error"] = "invalid graph";
        j["report"] = to_json(e.report());
        std::cerr << dump(j);
        return BadInput;
    } catch (const ParseError& e) {
        report_error("parse", e.what());
        return BadInput;
    } catch (const MeshError& e) {
        report_error("mesh " + e.kind(), e.what());
        return BadInput;
    } catch (const InputError& e) {
        report_error("input", e.what());
        return BadInput;
    } catch (const QuadratureError& e) {
        report_error("tolerance", e.what());
        return Internal;
    } catch (const std::invalid_argument& e) {
        report_error("input", e.what());
        return BadInput;
    } catch (const std::domain_error& e) {
        report_error("input", e.what());
        return BadInput;
    } catch (const std::exception& e) {
        report_error("internal", e.what());
        return Internal;
    }
    std::cerr << app.help();
    return Usage;
}
