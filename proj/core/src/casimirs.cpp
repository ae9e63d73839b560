#include "reebflow/casimirs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace reebflow {

MomentTable moment_table(const MeasuredReebGraph& g, unsigned order)
{
    MomentTable t;
    t.order = order;
    t.total.assign(order + 1, Scalar(0));
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        t.edges.push_back(g.edge(e).id);
        std::vector<Scalar> row;
        for (unsigned i = 0; i <= order; ++i) {
            row.push_back(edge_moment(g, e, i));
            t.total[i] += row.back();
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string moment_table_csv(const MomentTable& t)
{
    std::ostringstream os;
    os << "edge";
    for (unsigned i = 0; i <= t.order; ++i)
        os << ",m" << i;
    os << "\n";
    auto row = [&](const std::string& name, const std::vector<Scalar>& r) {
        os << name;
        for (const auto& x : r)
            os << "," << x.to_string();
        os << "\n";
    };
    for (std::size_t e = 0; e < t.rows.size(); ++e)
        row(t.edges[e], t.rows[e]);
    row("total", t.total);
    return os.str();
}

namespace {

bool close(const Scalar& a, const Scalar& b, double tol)
{
    if (a.is_exact() && b.is_exact())
        return a == b;
    double x = a.to_double(), y = b.to_double();
    return std::fabs(x - y) <= tol * std::max({1.0, std::fabs(x), std::fabs(y)});
}

// Colour refinement over (role, height, degrees) and directed adjacency.
std::vector<std::string> refine_colours(const MeasuredReebGraph& g)
{
    const std::size_t V = g.vertex_count();
    std::vector<std::string> colour(V);
    for (std::size_t v = 0; v < V; ++v) {
        const auto& vx = g.vertex(v);
        colour[v] = std::string(to_string(vx.role)) + "|" + vx.f.to_string() + "|"
                    + std::to_string(g.in_edges(v).size()) + "|" + std::to_string(g.out_edges(v).size());
    }
    for (std::size_t round = 0; round < V; ++round) {
        std::vector<std::string> sorted = colour;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        auto id = [&](const std::string& s) {
            return std::to_string(std::lower_bound(sorted.begin(), sorted.end(), s) - sorted.begin());
        };
        std::vector<std::string> next(V);
        for (std::size_t v = 0; v < V; ++v) {
            std::vector<std::string> outs, ins;
            for (auto e : g.out_edges(v))
                outs.push_back(id(colour[g.head(e)]));
            for (auto e : g.in_edges(v))
                ins.push_back(id(colour[g.tail(e)]));
            std::sort(outs.begin(), outs.end());
            std::sort(ins.begin(), ins.end());
            std::string s = id(colour[v]) + "<";
            for (const auto& x : ins)
                s += x + ",";
            s += ">";
            for (const auto& x : outs)
                s += x + ",";
            next[v] = s;
        }
        std::size_t before = sorted.size();
        std::vector<std::string> check = next;
        std::sort(check.begin(), check.end());
        check.erase(std::unique(check.begin(), check.end()), check.end());
        colour = std::move(next);
        if (check.size() == before)
            break;
    }
    return colour;
}

}  // namespace

OrbitInvariantBundle invariant_bundle(const CirculationFunction& c, unsigned order)
{
    const auto& g = c.graph();
    OrbitInvariantBundle b;
    auto colour = refine_colours(g);
    std::vector<std::string> sorted = colour;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& s : sorted)
        b.signature += s + ";";
    b.moments = moment_table(g, order);
    std::vector<std::size_t> idx(g.edge_count());
    std::iota(idx.begin(), idx.end(), 0);
    auto key = [&](std::size_t e) {
        std::string k = colour[g.tail(e)] + "->" + colour[g.head(e)];
        for (const auto& m : b.moments.rows[e])
            k += "|" + m.to_string();
        return k;
    };
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return key(x) < key(y); });
    for (auto e : idx) {
        b.canonical_edges.push_back(g.edge(e).id);
        b.head_limits.push_back(c.head_limit(e));
    }
    return b;
}

namespace {

enum class Level { Structure, Heights, Moments, Circulation };

class IsoSearch {
public:
    IsoSearch(const CirculationFunction& c1, const CirculationFunction& c2, const MomentTable& t1,
              const MomentTable& t2, double tol)
        : g1_(c1.graph()), g2_(c2.graph()), c1_(c1), c2_(c2), t1_(t1), t2_(t2), tol_(tol)
    {
        // visit edges so that each new edge touches an already bound vertex
        std::vector<bool> seen_v(g1_.vertex_count(), false), seen_e(g1_.edge_count(), false);
        for (std::size_t start = 0; start < g1_.edge_count(); ++start) {
            if (seen_e[start])
                continue;
            std::vector<std::size_t> queue{start};
            seen_e[start] = true;
            for (std::size_t qi = 0; qi < queue.size(); ++qi) {
                std::size_t e = queue[qi];
                order_.push_back(e);
                for (auto v : {g1_.tail(e), g1_.head(e)}) {
                    if (seen_v[v])
                        continue;
                    seen_v[v] = true;
                    for (const auto* list : {&g1_.in_edges(v), &g1_.out_edges(v)})
                        for (auto e2 : *list)
                            if (!seen_e[e2]) {
                                seen_e[e2] = true;
                                queue.push_back(e2);
                            }
                }
            }
        }
    }

    // Finds an isomorphism at the given level (moments up to `upto`).
    bool run(Level level, unsigned upto)
    {
        level_ = level;
        upto_ = upto;
        vmap_.assign(g1_.vertex_count(), npos);
        vused_.assign(g2_.vertex_count(), false);
        emap_.assign(g1_.edge_count(), npos);
        eused_.assign(g2_.edge_count(), false);
        return dfs(0);
    }

    const std::vector<std::size_t>& vmap() const { return vmap_; }
    const std::vector<std::size_t>& emap() const { return emap_; }

    bool vertex_ok(std::size_t a, std::size_t b) const
    {
        const auto& x = g1_.vertex(a);
        const auto& y = g2_.vertex(b);
        if (x.role != y.role || g1_.in_edges(a).size() != g2_.in_edges(b).size()
            || g1_.out_edges(a).size() != g2_.out_edges(b).size())
            return false;
        return level_ < Level::Heights || close(x.f, y.f, tol_);
    }

    bool edge_ok(std::size_t a, std::size_t b) const
    {
        if (level_ >= Level::Moments)
            for (unsigned i = 0; i <= upto_; ++i)
                if (!close(t1_.rows[a][i], t2_.rows[b][i], tol_))
                    return false;
        return level_ < Level::Circulation || close(c1_.head_limit(a), c2_.head_limit(b), tol_);
    }

private:
    bool bind(std::size_t a, std::size_t b, std::vector<std::size_t>& bound)
    {
        if (vmap_[a] != npos)
            return vmap_[a] == b;
        if (vused_[b] || !vertex_ok(a, b))
            return false;
        vmap_[a] = b;
        vused_[b] = true;
        bound.push_back(a);
        return true;
    }

    bool dfs(std::size_t pos)
    {
        if (pos == order_.size())
            return true;
        std::size_t e = order_[pos];
        for (std::size_t f = 0; f < g2_.edge_count(); ++f) {
            if (eused_[f] || !edge_ok(e, f))
                continue;
            std::vector<std::size_t> bound;
            if (bind(g1_.tail(e), g2_.tail(f), bound) && bind(g1_.head(e), g2_.head(f), bound)) {
                emap_[e] = f;
                eused_[f] = true;
                if (dfs(pos + 1))
                    return true;
                emap_[e] = npos;
                eused_[f] = false;
            }
            for (auto v : bound) {
                vused_[vmap_[v]] = false;
                vmap_[v] = npos;
            }
        }
        return false;
    }

    const MeasuredReebGraph& g1_;
    const MeasuredReebGraph& g2_;
    const CirculationFunction& c1_;
    const CirculationFunction& c2_;
    const MomentTable& t1_;
    const MomentTable& t2_;
    double tol_;
    std::vector<std::size_t> order_;
    Level level_ = Level::Structure;
    unsigned upto_ = 0;
    std::vector<std::size_t> vmap_, emap_;
    std::vector<bool> vused_, eused_;
};

}  // namespace

OrbitComparison orbit_equivalent(const CirculationFunction& c1, const CirculationFunction& c2, unsigned order,
                                 double tol)
{
    const auto& g1 = c1.graph();
    const auto& g2 = c2.graph();
    require_valid(g1);
    require_valid(g2);
    if (g1.edge_count() > 64 || g2.edge_count() > 64)
        throw std::invalid_argument("orbit_equivalent searches isomorphisms only for graphs with at most 64 edges");

    OrbitComparison out;
    if (g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count()) {
        out.invariant = "structure";
        out.detail = "vertex/edge counts differ";
        return out;
    }
    MomentTable t1 = moment_table(g1, order), t2 = moment_table(g2, order);
    IsoSearch search(c1, c2, t1, t2, tol);

    if (!search.run(Level::Structure, 0)) {
        out.invariant = "structure";
        out.detail = "no direction- and role-preserving graph isomorphism";
        return out;
    }
    auto prev_v = search.vmap();
    auto prev_e = search.emap();

    if (!search.run(Level::Heights, 0)) {
        out.invariant = "height";
        for (std::size_t v = 0; v < g1.vertex_count(); ++v)
            if (!close(g1.vertex(v).f, g2.vertex(prev_v[v]).f, tol)) {
                out.subject = g1.vertex(v).id;
                out.detail = "f = " + g1.vertex(v).f.to_string() + " vs " + g2.vertex(prev_v[v]).f.to_string();
                break;
            }
        return out;
    }
    prev_v = search.vmap();
    prev_e = search.emap();

    for (unsigned i = 0; i <= order; ++i)
        if (!close(t1.total[i], t2.total[i], tol)) {
            out.invariant = "total_moment";
            out.order = i;
            out.detail = "m" + std::to_string(i) + " = " + t1.total[i].to_string() + " vs " + t2.total[i].to_string();
            return out;
        }

    for (unsigned i = 0; i <= order; ++i) {
        if (search.run(Level::Moments, i)) {
            prev_v = search.vmap();
            prev_e = search.emap();
            continue;
        }
        out.invariant = "edge_moment";
        out.order = i;
        for (std::size_t e = 0; e < g1.edge_count(); ++e)
            if (!close(t1.rows[e][i], t2.rows[prev_e[e]][i], tol)) {
                out.subject = g1.edge(e).id;
                out.detail = "m" + std::to_string(i) + "," + g1.edge(e).id + " = " + t1.rows[e][i].to_string()
                             + " vs " + t2.rows[prev_e[e]][i].to_string() + " on " + g2.edge(prev_e[e]).id;
                break;
            }
        return out;
    }

    if (!search.run(Level::Circulation, order)) {
        out.invariant = "circulation";
        for (std::size_t e = 0; e < g1.edge_count(); ++e)
            if (!close(c1.head_limit(e), c2.head_limit(prev_e[e]), tol)) {
                out.subject = g1.edge(e).id;
                out.detail = "head limit " + c1.head_limit(e).to_string() + " vs "
                             + c2.head_limit(prev_e[e]).to_string() + " on " + g2.edge(prev_e[e]).id;
                break;
            }
        return out;
    }
    out.equivalent = true;
    out.vertex_map = search.vmap();
    out.edge_map = search.emap();
    return out;
}

MeasuredReebGraph move_density_between_branches(const MeasuredReebGraph& g, const std::string& saddle,
                                                const ScalarPoly& bump, const Scalar& a, const Scalar& b,
                                                int receiving_branch)
{
    auto tb = trunk_and_branches(g, saddle);
    if (!(a < b))
        throw std::invalid_argument("bump interval must satisfy a < b");
    if (bump.is_zero())
        return g;
    std::vector<Edge> edges = g.edges();
    for (int k = 0; k < 2; ++k) {
        std::size_t e = tb.branches[k];
        Interval dom = g.domain(e);
        if (a < dom.lo || dom.hi < b)
            throw std::invalid_argument("branch '" + g.edge(e).id + "' does not span the bump interval");
        if (g.edge(e).weight)
            throw std::invalid_argument("branch '" + g.edge(e).id + "' carries a weight override");
        if (g.edge(e).measure.kind() != EdgeMeasure::Kind::PolyLog)
            throw std::invalid_argument("branch '" + g.edge(e).id + "' has a tabulated measure");
        const auto& m = g.edge(e).measure;
        auto patches = m.patches();
        ScalarPoly p = k == receiving_branch ? bump : bump * Scalar(-1);
        patches.push_back({a, b, p});
        EdgeMeasure moved = EdgeMeasure::poly_log(m.poly(), m.logs(), std::move(patches));
        if (auto bad = moved.find_nonpositive(dom))
            throw std::invalid_argument("density on '" + g.edge(e).id + "' is not positive at f = "
                                        + std::to_string(*bad));
        edges[e].measure = std::move(moved);
    }
    return MeasuredReebGraph(g.vertices(), std::move(edges), g.surface(), g.coordinates(), g.tolerance());
}

}  // namespace reebflow
