#include "reebflow/reeb_graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace reebflow {

const char* to_string(VertexRole r)
{
    switch (r) {
    case VertexRole::Min: return "min";
    case VertexRole::Max: return "max";
    case VertexRole::Saddle: return "saddle";
    case VertexRole::Boundary: return "boundary";
    case VertexRole::Marker: return "marker";
    }
    return "?";
}

VertexRole parse_role(const std::string& s)
{
    std::string t;
    for (char c : s)
        t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "min") return VertexRole::Min;
    if (t == "max") return VertexRole::Max;
    if (t == "saddle") return VertexRole::Saddle;
    if (t == "boundary") return VertexRole::Boundary;
    if (t == "marker") return VertexRole::Marker;
    throw std::invalid_argument("unknown vertex role '" + s + "'");
}

bool natural_less(const std::string& a, const std::string& b)
{
    std::size_t i = 0, j = 0;
    auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
    while (i < a.size() && j < b.size()) {
        if (digit(a[i]) && digit(b[j])) {
            std::size_t i2 = i, j2 = j;
            while (i2 < a.size() && digit(a[i2])) ++i2;
            while (j2 < b.size() && digit(b[j2])) ++j2;
            std::string x = a.substr(i, i2 - i), y = b.substr(j, j2 - j);
            x.erase(0, std::min(x.find_first_not_of('0'), x.size()));
            y.erase(0, std::min(y.find_first_not_of('0'), y.size()));
            if (x.size() != y.size())
                return x.size() < y.size();
            if (x != y)
                return x < y;
            i = i2;
            j = j2;
        } else {
            if (a[i] != b[j])
                return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    if ((i < a.size()) != (j < b.size()))
        return i >= a.size();
    return a < b;
}

MeasuredReebGraph::MeasuredReebGraph() : d_(std::make_shared<Data>()) {}

MeasuredReebGraph::MeasuredReebGraph(std::vector<Vertex> vertices, std::vector<Edge> edges, SurfaceInfo surface,
                                     std::vector<LimitRef> coordinates, double tol)
{
    auto d = std::make_shared<Data>();
    std::stable_sort(vertices.begin(), vertices.end(),
                     [](const Vertex& a, const Vertex& b) { return natural_less(a.id, b.id); });
    std::stable_sort(edges.begin(), edges.end(),
                     [](const Edge& a, const Edge& b) { return natural_less(a.id, b.id); });
    d->vertices = std::move(vertices);
    d->edges = std::move(edges);
    d->surface = surface;
    d->coordinates = std::move(coordinates);
    d->tol = tol;
    for (std::size_t v = 0; v < d->vertices.size(); ++v)
        d->vindex.emplace(d->vertices[v].id, v);
    for (std::size_t e = 0; e < d->edges.size(); ++e)
        d->eindex.emplace(d->edges[e].id, e);
    d->in.assign(d->vertices.size(), {});
    d->out.assign(d->vertices.size(), {});
    for (std::size_t e = 0; e < d->edges.size(); ++e) {
        auto t = d->vindex.find(d->edges[e].tail);
        auto h = d->vindex.find(d->edges[e].head);
        d->tail.push_back(t == d->vindex.end() ? npos : t->second);
        d->head.push_back(h == d->vindex.end() ? npos : h->second);
        if (d->tail.back() != npos)
            d->out[d->tail.back()].push_back(e);
        if (d->head.back() != npos)
            d->in[d->head.back()].push_back(e);
    }
    d_ = std::move(d);
}

std::optional<std::size_t> MeasuredReebGraph::find_vertex(const std::string& id) const
{
    auto it = d_->vindex.find(id);
    if (it == d_->vindex.end())
        return std::nullopt;
    return it->second;
}

std::optional<std::size_t> MeasuredReebGraph::find_edge(const std::string& id) const
{
    auto it = d_->eindex.find(id);
    if (it == d_->eindex.end())
        return std::nullopt;
    return it->second;
}

std::size_t MeasuredReebGraph::vertex_index(const std::string& id) const
{
    auto v = find_vertex(id);
    if (!v)
        throw std::invalid_argument("unknown vertex '" + id + "'");
    return *v;
}

std::size_t MeasuredReebGraph::edge_index(const std::string& id) const
{
    auto e = find_edge(id);
    if (!e)
        throw std::invalid_argument("unknown edge '" + id + "'");
    return *e;
}

Interval MeasuredReebGraph::domain(std::size_t e) const
{
    std::size_t t = tail(e), h = head(e);
    if (t == npos || h == npos)
        throw std::invalid_argument("edge '" + edge(e).id + "' has an unresolved endpoint");
    return {vertex(t).f, vertex(h).f};
}

std::size_t MeasuredReebGraph::boundary_count() const
{
    return static_cast<std::size_t>(std::count_if(d_->vertices.begin(), d_->vertices.end(),
                                                  [](const Vertex& v) { return v.role == VertexRole::Boundary; }));
}

std::vector<std::size_t> MeasuredReebGraph::saddles() const
{
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < d_->vertices.size(); ++v)
        if (d_->vertices[v].role == VertexRole::Saddle)
            out.push_back(v);
    return out;
}

bool MeasuredReebGraph::is_exact() const
{
    for (const auto& v : d_->vertices)
        if (!v.f.is_exact())
            return false;
    for (const auto& e : d_->edges) {
        if (e.weight) {
            if (!e.weight->is_exact())
                return false;
        } else if (!e.measure.is_exact()) {
            return false;
        }
    }
    return true;
}

MeasuredReebGraph MeasuredReebGraph::with_weights(const std::vector<Scalar>& weights) const
{
    if (weights.size() != edge_count())
        throw std::invalid_argument("expected " + std::to_string(edge_count()) + " weights, got "
                                    + std::to_string(weights.size()));
    auto edges = d_->edges;
    for (std::size_t e = 0; e < edges.size(); ++e)
        edges[e].weight = weights[e];
    return MeasuredReebGraph(d_->vertices, std::move(edges), d_->surface, d_->coordinates, d_->tol);
}

MeasuredReebGraph MeasuredReebGraph::with_coordinates(std::vector<LimitRef> coords) const
{
    return MeasuredReebGraph(d_->vertices, d_->edges, d_->surface, std::move(coords), d_->tol);
}

MeasuredReebGraph MeasuredReebGraph::with_surface(SurfaceInfo s) const
{
    return MeasuredReebGraph(d_->vertices, d_->edges, s, d_->coordinates, d_->tol);
}

MeasuredReebGraph MeasuredReebGraph::as_float() const
{
    auto vertices = d_->vertices;
    for (auto& v : vertices)
        v.f = v.f.as_float();
    auto edges = d_->edges;
    for (auto& e : edges) {
        if (e.weight)
            e.weight = e.weight->as_float();
        const auto& m = e.measure;
        if (m.kind() == EdgeMeasure::Kind::PolyLog) {
            std::vector<Scalar> c;
            for (const auto& x : m.poly().coeffs())
                c.push_back(x.as_float());
            auto logs = m.logs();
            for (auto& t : logs)
                if (t.at)
                    t.at = t.at->as_float();
            auto patches = m.patches();
            for (auto& p : patches) {
                p.lo = p.lo.as_float();
                p.hi = p.hi.as_float();
                std::vector<Scalar> pc;
                for (const auto& x : p.poly.coeffs())
                    pc.push_back(x.as_float());
                p.poly = ScalarPoly(std::move(pc));
            }
            e.measure = EdgeMeasure::poly_log(ScalarPoly(std::move(c)), std::move(logs), std::move(patches));
        }
    }
    return MeasuredReebGraph(std::move(vertices), std::move(edges), d_->surface, d_->coordinates, d_->tol);
}

bool ValidationReport::has(const std::string& kind) const
{
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

namespace {

std::string report_summary(const ValidationReport& r)
{
    std::ostringstream os;
    os << "invalid graph:";
    for (const auto& v : r.violations)
        os << " [" << v.kind << " " << v.subject << ": " << v.message << "]";
    return os.str();
}

}  // namespace

InvalidGraphError::InvalidGraphError(ValidationReport r)
    : std::runtime_error(report_summary(r)), report_(std::move(r))
{
}

ValidationReport validate_graph(const MeasuredReebGraph& g)
{
    ValidationReport rep;
    auto add = [&](std::string kind, std::string subject, std::string msg) {
        rep.violations.push_back({std::move(kind), std::move(subject), std::move(msg)});
    };
    if (g.vertex_count() == 0) {
        add("empty graph", "", "graph has no vertices");
        return rep;
    }

    std::set<std::string> seen;
    for (const auto& v : g.vertices())
        if (!seen.insert(v.id).second)
            add("duplicate id", v.id, "vertex id used more than once");
    seen.clear();
    for (const auto& e : g.edges())
        if (!seen.insert(e.id).second)
            add("duplicate id", e.id, "edge id used more than once");

    bool structural_ok = true;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        if (g.tail(e) == npos || g.head(e) == npos) {
            add("dangling endpoint", ed.id, "endpoint '" + (g.tail(e) == npos ? ed.tail : ed.head) + "' is not a vertex");
            structural_ok = false;
            continue;
        }
        if (g.tail(e) == g.head(e)) {
            add("self-loop", ed.id, "edge starts and ends at '" + ed.tail + "'");
            structural_ok = false;
            continue;
        }
        const Scalar& ft = g.vertex(g.tail(e)).f;
        const Scalar& fh = g.vertex(g.head(e)).f;
        Scalar diff = fh - ft;
        bool increasing = diff.is_exact() ? diff > Scalar(0) : diff.to_double() > g.tolerance();
        if (!increasing) {
            add("non-monotone edge", ed.id,
                "height does not increase from tail (" + ft.to_string() + ") to head (" + fh.to_string() + ")");
            structural_ok = false;
        }
    }

    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        const Vertex& vx = g.vertex(v);
        std::size_t in = g.in_edges(v).size(), out = g.out_edges(v).size();
        std::string pattern = std::to_string(in) + " in / " + std::to_string(out) + " out";
        switch (vx.role) {
        case VertexRole::Min:
            if (in + out != 1) add("valence", vx.id, "min must be 1-valent, has " + pattern);
            else if (out != 1) add("in/out pattern", vx.id, "min must have one outgoing edge, has " + pattern);
            break;
        case VertexRole::Max:
            if (in + out != 1) add("valence", vx.id, "max must be 1-valent, has " + pattern);
            else if (in != 1) add("in/out pattern", vx.id, "max must have one incoming edge, has " + pattern);
            break;
        case VertexRole::Boundary:
            if (in + out != 1) add("valence", vx.id, "boundary vertex must be 1-valent, has " + pattern);
            break;
        case VertexRole::Saddle:
            if (in + out != 3) add("valence", vx.id, "saddle must be 3-valent, has " + pattern);
            else if (in == 0 || out == 0) add("in/out pattern", vx.id, "saddle needs 2 in/1 out or 1 in/2 out, has " + pattern);
            break;
        case VertexRole::Marker:
            if (in != 1 || out != 1) add("valence", vx.id, "marker must have 1 in / 1 out, has " + pattern);
            break;
        }
    }

    // connectivity over resolved edges
    std::vector<std::size_t> parent(g.vertex_count());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        if (g.tail(e) != npos && g.head(e) != npos)
            parent[find(g.tail(e))] = find(g.head(e));
    std::size_t roots = 0;
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (find(v) == v)
            ++roots;
    if (roots > 1) {
        add("disconnected", "", "graph has " + std::to_string(roots) + " connected components");
        structural_ok = false;
    }

    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (g.tail(e) == npos || g.head(e) == npos || g.tail(e) == g.head(e))
            continue;
        const Edge& ed = g.edge(e);
        Interval dom = g.domain(e);
        if (!(dom.hi > dom.lo))
            continue;
        const EdgeMeasure& m = ed.measure;
        if (m.kind() == EdgeMeasure::Kind::Table) {
            const auto& F = m.table_data().f;
            double lo = dom.lo.to_double(), hi = dom.hi.to_double();
            double slack = 1e-9 * std::max(1.0, hi - lo);
            if (std::fabs(F.front() - lo) > slack || std::fabs(F.back() - hi) > slack)
                add("measure", ed.id, "table heights do not span the edge's height range");
        }
        for (const auto& t : m.logs()) {
            if (t.at)
                continue;
            std::size_t anchor = t.side == AnchorSide::Tail ? g.tail(e) : g.head(e);
            if (g.vertex(anchor).role != VertexRole::Saddle)
                add("measure", ed.id, "log term anchored at non-saddle vertex '" + g.vertex(anchor).id + "'");
        }
        if (auto bad = m.find_nonpositive(dom)) {
            std::ostringstream os;
            os << "density not positive at f = " << *bad;
            add("measure", ed.id, os.str());
        } else {
            double mass = m.moment(dom, 0).to_double();
            if (!(mass > 0.0) || !std::isfinite(mass))
                add("measure", ed.id, "mass must be finite and positive");
        }
    }

    if (structural_ok && !rep.has("valence")) {
        int b1 = static_cast<int>(g.edge_count()) - static_cast<int>(g.vertex_count()) + 1;
        if (g.surface().genus && *g.surface().genus != b1)
            add("genus mismatch", "", "declared genus " + std::to_string(*g.surface().genus) + " but b1 = "
                                          + std::to_string(b1));
        int k = static_cast<int>(g.boundary_count());
        if (g.surface().boundary_components && *g.surface().boundary_components != k)
            add("boundary mismatch", "", "declared " + std::to_string(*g.surface().boundary_components)
                                             + " boundary components but graph has " + std::to_string(k));
    }
    return rep;
}

void require_valid(const MeasuredReebGraph& g)
{
    auto rep = validate_graph(g);
    if (!rep.ok())
        throw InvalidGraphError(std::move(rep));
}

HomologyDims homology_dimensions(const MeasuredReebGraph& g)
{
    require_valid(g);
    HomologyDims d;
    d.b1 = static_cast<int>(g.edge_count()) - static_cast<int>(g.vertex_count()) + 1;
    d.boundary_count = static_cast<int>(g.boundary_count());
    d.relative_dim = d.boundary_count == 0 ? d.b1 : d.b1 + d.boundary_count - 1;
    return d;
}

TrunkBranches trunk_and_branches(const MeasuredReebGraph& g, std::size_t v)
{
    const Vertex& vx = g.vertex(v);
    if (vx.role != VertexRole::Saddle)
        throw std::invalid_argument("vertex '" + vx.id + "' is not a saddle");
    const auto& in = g.in_edges(v);
    const auto& out = g.out_edges(v);
    TrunkBranches tb;
    if (in.size() == 1 && out.size() == 2) {
        tb.trunk = in[0];
        tb.branches = {out[0], out[1]};
    } else if (in.size() == 2 && out.size() == 1) {
        tb.trunk = out[0];
        tb.branches = {in[0], in[1]};
    } else {
        throw std::invalid_argument("saddle '" + vx.id + "' does not have a 2/1 in/out split");
    }
    return tb;
}

TrunkBranches trunk_and_branches(const MeasuredReebGraph& g, const std::string& v)
{
    return trunk_and_branches(g, g.vertex_index(v));
}

Scalar edge_moment(const MeasuredReebGraph& g, std::size_t e, unsigned i)
{
    return g.edge(e).measure.moment(g.domain(e), i);
}

Scalar edge_weight(const MeasuredReebGraph& g, std::size_t e)
{
    if (g.edge(e).weight)
        return *g.edge(e).weight;
    return edge_moment(g, e, 1);
}

std::vector<Scalar> edge_weights(const MeasuredReebGraph& g)
{
    std::vector<Scalar> w;
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        w.push_back(edge_weight(g, e));
    return w;
}

MassAndWeight total_mass_and_weight(const MeasuredReebGraph& g)
{
    MassAndWeight r{Scalar(0), Scalar(0)};
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        r.mass += edge_moment(g, e, 0);
        r.weight += edge_weight(g, e);
    }
    return r;
}

}  // namespace reebflow
