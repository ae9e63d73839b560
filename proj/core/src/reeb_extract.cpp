#include "reebflow/mesh.hpp"
#include "reebflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace reebflow {

const char* to_string(CriticalRole r)
{
    switch (r) {
    case CriticalRole::Regular: return "regular";
    case CriticalRole::Min: return "min";
    case CriticalRole::Max: return "max";
    case CriticalRole::Saddle: return "saddle";
    }
    return "?";
}

namespace {

struct UnionFind {
    std::vector<std::size_t> p;
    explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (p[x] != x)
            x = p[x] = p[p[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { p[find(a)] = find(b); }
};

// Area of {F < s} inside a triangle with sorted values f0 <= f1 <= f2.
double area_below(const std::array<double, 3>& f, double A, double s)
{
    if (s <= f[0])
        return 0.0;
    if (s >= f[2])
        return A;
    double span = f[2] - f[0];
    if (s <= f[1]) {
        double d = f[1] - f[0];
        return d > 0 ? A * (s - f[0]) * (s - f[0]) / (span * d) : 0.0;
    }
    double d = f[2] - f[1];
    return d > 0 ? A - A * (f[2] - s) * (f[2] - s) / (span * d) : A;
}

std::array<double, 3> sorted_values(const Mesh& m, std::size_t t)
{
    const auto& tr = m.triangles()[t];
    std::array<double, 3> f{m.values()[tr[0]], m.values()[tr[1]], m.values()[tr[2]]};
    std::sort(f.begin(), f.end());
    return f;
}

// Rotation order of the link of an interior vertex.
std::vector<std::size_t> link_cycle(const Mesh& m, std::size_t v)
{
    std::unordered_map<std::size_t, std::size_t> next;
    for (auto t : m.vertex_triangles(v)) {
        const auto& tr = m.triangles()[t];
        int i = tr[0] == v ? 0 : tr[1] == v ? 1 : 2;
        next[tr[(i + 1) % 3]] = tr[(i + 2) % 3];
    }
    std::vector<std::size_t> cyc;
    std::size_t start = next.begin()->first, w = start;
    do {
        cyc.push_back(w);
        w = next.at(w);
    } while (w != start && cyc.size() <= next.size());
    return cyc;
}

}  // namespace

std::vector<std::size_t> vertex_ranks(const Mesh& m)
{
    const auto& F = m.values();
    const auto& loops = m.boundary_loops();
    double lo = *std::min_element(F.begin(), F.end()), hi = *std::max_element(F.begin(), F.end());
    double tol = 1e-9 * std::max(1.0, hi - lo);
    for (std::size_t l = 0; l < loops.size(); ++l) {
        double a = F[loops[l][0]], b = a;
        for (auto v : loops[l]) {
            a = std::min(a, F[v]);
            b = std::max(b, F[v]);
        }
        if (b - a > tol)
            throw MeshError("boundary", "F is not constant on boundary loop " + std::to_string(l));
    }

    // one unit per interior vertex and per loop, keyed by (F, smallest index)
    struct Unit {
        double f;
        std::size_t index;
        std::size_t loop;
    };
    std::vector<Unit> units;
    for (std::size_t v = 0; v < m.vertex_count(); ++v)
        if (m.loop_of(v) == npos)
            units.push_back({F[v], v, npos});
    for (std::size_t l = 0; l < loops.size(); ++l) {
        double mean = 0.0;
        for (auto v : loops[l])
            mean += F[v];
        units.push_back({mean / loops[l].size(), *std::min_element(loops[l].begin(), loops[l].end()), l});
    }
    std::sort(units.begin(), units.end(),
              [](const Unit& a, const Unit& b) { return a.f != b.f ? a.f < b.f : a.index < b.index; });
    std::vector<std::size_t> rank(m.vertex_count());
    for (std::size_t r = 0; r < units.size(); ++r) {
        if (units[r].loop == npos)
            rank[units[r].index] = r;
        else
            for (auto v : loops[units[r].loop])
                rank[v] = r;
    }

    for (std::size_t l = 0; l < loops.size(); ++l) {
        const std::size_t r = rank[loops[l][0]];
        bool above = false, below = false;
        for (auto v : loops[l])
            for (auto t : m.vertex_triangles(v))
                for (auto w : m.triangles()[t]) {
                    if (rank[w] > r)
                        above = true;
                    else if (rank[w] < r)
                        below = true;
                }
        if (above && below)
            throw MeshError("boundary", "F has a critical point on boundary loop " + std::to_string(l));
    }
    return rank;
}

std::vector<CriticalPoint> classify_critical(const Mesh& m)
{
    auto rank = vertex_ranks(m);
    std::vector<CriticalPoint> out;
    for (std::size_t v = 0; v < m.vertex_count(); ++v) {
        if (m.loop_of(v) != npos)
            continue;
        auto cyc = link_cycle(m, v);
        std::size_t changes = 0, upper = 0;
        for (std::size_t i = 0; i < cyc.size(); ++i) {
            bool a = rank[cyc[i]] > rank[v], b = rank[cyc[(i + 1) % cyc.size()]] > rank[v];
            changes += a != b;
            upper += a;
        }
        CriticalRole role = CriticalRole::Regular;
        if (changes == 0)
            role = upper ? CriticalRole::Min : CriticalRole::Max;
        else if (changes == 4)
            role = CriticalRole::Saddle;
        else if (changes > 4)
            throw MeshError("non-simple-morse", "vertex " + std::to_string(v) + " is a degenerate saddle ("
                                                    + std::to_string(changes / 2) + " lower sectors)");
        if (role != CriticalRole::Regular)
            out.push_back({v, role});
    }
    std::sort(out.begin(), out.end(),
              [&](const CriticalPoint& a, const CriticalPoint& b) { return rank[a.vertex] < rank[b.vertex]; });
    return out;
}

ExtractionResult extract_reeb(const Mesh& m, const ExtractOptions& opt)
{
    const auto rank = vertex_ranks(m);
    const auto crit = classify_critical(m);
    const auto& F = m.values();
    const auto& loops = m.boundary_loops();
    const std::size_t T = m.triangle_count();

    // nodes in rank order
    struct Node {
        std::size_t rank;
        double f;
        VertexRole role;
        std::size_t vertex = npos, loop = npos;
    };
    std::vector<Node> nodes;
    for (const auto& c : crit) {
        VertexRole role = c.role == CriticalRole::Min   ? VertexRole::Min
                          : c.role == CriticalRole::Max ? VertexRole::Max
                                                        : VertexRole::Saddle;
        nodes.push_back({rank[c.vertex], F[c.vertex], role, c.vertex, npos});
    }
    for (std::size_t l = 0; l < loops.size(); ++l) {
        double mean = 0.0;
        for (auto v : loops[l])
            mean += F[v];
        nodes.push_back({rank[loops[l][0]], mean / loops[l].size(), VertexRole::Boundary, npos, l});
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.rank < b.rank; });
    const std::size_t L = nodes.size();
    if (L < 2)
        throw MeshError("non-simple-morse", "F has fewer than two critical levels");
    std::vector<std::size_t> level_rank(L);
    std::vector<double> level_f(L);
    for (std::size_t j = 0; j < L; ++j) {
        level_rank[j] = nodes[j].rank;
        level_f[j] = nodes[j].f;
    }

    // slab coverage of a rank interval (lo, hi): slabs k with lo < ρ_{k+1}, hi > ρ_k
    auto slab_range = [&](std::size_t lo, std::size_t hi) -> std::pair<long, long> {
        long k1 = static_cast<long>(std::upper_bound(level_rank.begin(), level_rank.end(), lo) - level_rank.begin()) - 1;
        long k2 = static_cast<long>(std::lower_bound(level_rank.begin(), level_rank.end(), hi) - level_rank.begin()) - 1;
        return {std::max(k1, 0L), k2};
    };
    auto tri_ranks = [&](std::size_t t) {
        const auto& tr = m.triangles()[t];
        std::array<std::size_t, 3> r{rank[tr[0]], rank[tr[1]], rank[tr[2]]};
        std::sort(r.begin(), r.end());
        return r;
    };

    // pieces (t, k)
    std::vector<std::size_t> base(T + 1, 0);
    std::vector<long> first_slab(T, 0);
    for (std::size_t t = 0; t < T; ++t) {
        auto r = tri_ranks(t);
        auto [k1, k2] = slab_range(r[0], r[2]);
        first_slab[t] = k1;
        base[t + 1] = base[t] + static_cast<std::size_t>(std::max(0L, k2 - k1 + 1));
    }
    const std::size_t P = base[T];
    auto piece = [&](std::size_t t, long k) { return base[t] + static_cast<std::size_t>(k - first_slab[t]); };
    auto piece_count = [&](std::size_t t) { return base[t + 1] - base[t]; };
    std::vector<std::size_t> piece_tri(P);
    std::vector<long> piece_slab(P);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t i = 0; i < piece_count(t); ++i) {
            piece_tri[base[t] + i] = t;
            piece_slab[base[t] + i] = first_slab[t] + static_cast<long>(i);
        }

    UnionFind uf(P);
    for (std::size_t e = 0; e < m.edge_count(); ++e) {
        const auto& ts = m.edge_triangles(e);
        if (ts.size() != 2)
            continue;
        auto [u, v] = m.edges()[e];
        auto [k1, k2] = slab_range(std::min(rank[u], rank[v]), std::max(rank[u], rank[v]));
        for (long k = k1; k <= k2; ++k)
            uf.unite(piece(ts[0], k), piece(ts[1], k));
    }

    // level components: per level, triangles crossing it or incident to the node
    std::vector<std::unordered_map<std::size_t, std::size_t>> level_comp(L);  // triangle -> comp
    std::vector<std::size_t> node_comp(L);
    for (std::size_t j = 0; j < L; ++j) {
        const std::size_t rho = level_rank[j];
        std::vector<std::size_t> members;
        for (std::size_t t = 0; t < T; ++t) {
            auto r = tri_ranks(t);
            if (r[0] <= rho && rho <= r[2] && r[0] < r[2])
                members.push_back(t);
            else if (r[0] == rho)  // flat boundary triangle
                members.push_back(t);
        }
        std::unordered_map<std::size_t, std::size_t> local;
        for (std::size_t i = 0; i < members.size(); ++i)
            local[members[i]] = i;
        UnionFind lu(members.size() + 1);
        const std::size_t sentinel = members.size();
        for (std::size_t i = 0; i < members.size(); ++i) {
            std::size_t t = members[i];
            auto r = tri_ranks(t);
            if (r[0] == rho || r[1] == rho || r[2] == rho)
                lu.unite(i, sentinel);
            const auto& tr = m.triangles()[t];
            for (int a = 0; a < 3; ++a) {
                std::size_t u = tr[a], v = tr[(a + 1) % 3];
                if (std::min(rank[u], rank[v]) < rho && rho < std::max(rank[u], rank[v]))
                    for (auto t2 : m.edge_triangles(m.edge_index(u, v)))
                        if (auto it = local.find(t2); it != local.end())
                            lu.unite(i, it->second);
            }
        }
        node_comp[j] = lu.find(sentinel);
        for (std::size_t i = 0; i < members.size(); ++i)
            level_comp[j][members[i]] = lu.find(i);
    }

    // attach every piece class to the level components above and below it
    std::unordered_map<std::size_t, std::pair<std::size_t, std::size_t>> attach;  // root -> (bottom comp, top comp)
    for (std::size_t p = 0; p < P; ++p) {
        std::size_t root = uf.find(p);
        auto& a = attach.try_emplace(root, npos, npos).first->second;
        std::size_t t = piece_tri[p];
        long k = piece_slab[p];
        auto r = tri_ranks(t);
        if (a.first == npos && r[0] <= level_rank[k])
            a.first = level_comp[k].at(t);
        if (a.second == npos && r[2] >= level_rank[k + 1])
            a.second = level_comp[k + 1].at(t);
    }
    std::vector<std::size_t> roots;
    for (const auto& [root, a] : attach) {
        if (a.first == npos || a.second == npos)
            throw std::runtime_error("Reeb sweep: slab component without both ends");
        roots.push_back(root);
    }
    std::sort(roots.begin(), roots.end());

    // glue classes across regular level components
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> above, below;  // (level, comp) -> roots
    for (auto root : roots) {
        long k = piece_slab[root];
        const auto& a = attach.at(root);
        below[{static_cast<std::size_t>(k + 1), a.second}].push_back(root);
        above[{static_cast<std::size_t>(k), a.first}].push_back(root);
    }
    UnionFind eu(P);
    for (const auto& [lc, from_below] : below) {
        if (lc.second == node_comp[lc.first])
            continue;
        auto it = above.find(lc);
        if (from_below.size() != 1 || it == above.end() || it->second.size() != 1)
            throw std::runtime_error("Reeb sweep: regular level component does not join exactly two slabs");
        eu.unite(from_below[0], it->second[0]);
    }

    struct Arc {
        long k_lo = 0, k_hi = 0;
        std::vector<std::size_t> roots;
    };
    std::map<std::size_t, Arc> arcs;
    for (auto root : roots) {
        long k = piece_slab[root];
        auto [it, fresh] = arcs.try_emplace(eu.find(root));
        Arc& a = it->second;
        if (fresh || k < a.k_lo)
            a.k_lo = k;
        if (fresh || k > a.k_hi)
            a.k_hi = k;
        a.roots.push_back(root);
    }

    // order arcs by (tail, head, first root)
    struct Built {
        std::size_t tail, head, first;
        Arc arc;
    };
    std::vector<Built> built;
    for (auto& [id, a] : arcs) {
        (void)id;
        std::size_t lowest = npos, highest = npos;
        for (auto root : a.roots) {
            if (piece_slab[root] == a.k_lo)
                lowest = root;
            if (piece_slab[root] == a.k_hi)
                highest = root;
        }
        if (attach.at(lowest).first != node_comp[a.k_lo] || attach.at(highest).second != node_comp[a.k_hi + 1])
            throw std::runtime_error("Reeb sweep: arc does not end at critical levels");
        built.push_back({static_cast<std::size_t>(a.k_lo), static_cast<std::size_t>(a.k_hi + 1),
                         *std::min_element(a.roots.begin(), a.roots.end()), std::move(a)});
    }
    std::sort(built.begin(), built.end(), [](const Built& a, const Built& b) {
        return std::tie(a.tail, a.head, a.first) < std::tie(b.tail, b.head, b.first);
    });

    ExtractionResult res;
    std::vector<std::size_t> root_arc(P, npos);
    for (std::size_t i = 0; i < built.size(); ++i)
        for (auto root : built[i].arc.roots)
            root_arc[root] = i;

    res.edges.resize(built.size());
    std::vector<std::map<std::size_t, std::pair<long, long>>> tri_slabs(built.size());
    for (std::size_t p = 0; p < P; ++p) {
        std::size_t i = root_arc[uf.find(p)];
        auto [it, fresh] = tri_slabs[i].try_emplace(piece_tri[p], piece_slab[p], piece_slab[p]);
        if (!fresh) {
            it->second.first = std::min(it->second.first, piece_slab[p]);
            it->second.second = std::max(it->second.second, piece_slab[p]);
        }
    }
    for (std::size_t i = 0; i < built.size(); ++i) {
        auto& ee = res.edges[i];
        ee.tail = built[i].tail;
        ee.head = built[i].head;
        for (const auto& [t, ks] : tri_slabs[i]) {
            auto f = sorted_values(m, t);
            double x1 = std::max(f[0], level_f[static_cast<std::size_t>(ks.first)]);
            double x2 = std::min(f[2], level_f[static_cast<std::size_t>(ks.second) + 1]);
            ee.pieces.push_back({t, {x1, x2}});
        }
    }

    // flat triangles on a boundary loop go to an adjacent arc at that level
    for (std::size_t t = 0; t < T; ++t) {
        if (piece_count(t) != 0)
            continue;
        auto r = tri_ranks(t);
        std::size_t j = static_cast<std::size_t>(std::lower_bound(level_rank.begin(), level_rank.end(), r[0])
                                                 - level_rank.begin());
        std::size_t best = npos;
        for (std::size_t i = 0; i < built.size() && best == npos; ++i)
            if (res.edges[i].tail == j || res.edges[i].head == j)
                best = i;
        if (best == npos)
            throw std::runtime_error("Reeb sweep: flat triangle with no adjacent arc");
        res.edges[best].flat_area += m.triangle_area(t);
    }

    // graph
    std::vector<Vertex> gv;
    for (std::size_t j = 0; j < L; ++j) {
        gv.push_back({"v" + std::to_string(j + 1), nodes[j].role, Scalar(nodes[j].f)});
        res.node_vertex.push_back(nodes[j].vertex);
        res.node_loop.push_back(nodes[j].loop);
    }
    std::vector<Edge> ge(built.size());
    for (std::size_t i = 0; i < built.size(); ++i) {
        const auto& ee = res.edges[i];
        const double lo = level_f[ee.tail], hi = level_f[ee.head];
        std::vector<double> events{lo, hi};
        for (const auto& [t, range] : ee.pieces)
            for (auto v : m.triangles()[t])
                if (F[v] > lo && F[v] < hi)
                    events.push_back(F[v]);
        std::sort(events.begin(), events.end());
        const double gap = 1e-12 * std::max(1.0, hi - lo);
        std::vector<double> ev;
        for (double x : events)
            if (ev.empty() || x - ev.back() > gap)
                ev.push_back(x);
        if (ev.back() != hi) {
            if (ev.size() > 1 && hi - ev[ev.size() - 2] <= gap)
                ev.pop_back();
            ev.back() = hi;
        }
        std::vector<double> s;
        for (std::size_t k = 0; k + 1 < ev.size(); ++k) {
            s.push_back(ev[k]);
            for (int q = 1; q <= opt.subsamples; ++q)
                s.push_back(ev[k] + (ev[k + 1] - ev[k]) * q / (opt.subsamples + 1));
        }
        s.push_back(ev.back());

        std::vector<double> cum(s.size(), 0.0), tail_add(s.size() + 1, 0.0);
        for (const auto& [t, range] : ee.pieces) {
            auto f = sorted_values(m, t);
            const double A = m.triangle_area(t);
            const double base_area = area_below(f, A, range[0]);
            auto it = std::upper_bound(s.begin(), s.end(), range[0]);
            for (; it != s.end() && *it < range[1]; ++it)
                cum[static_cast<std::size_t>(it - s.begin())] += area_below(f, A, *it) - base_area;
            tail_add[static_cast<std::size_t>(it - s.begin())] += area_below(f, A, range[1]) - base_area;
        }
        double run = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            run += tail_add[k];
            cum[k] += run;
        }
        if (ee.flat_area > 0) {
            if (nodes[ee.tail].role == VertexRole::Boundary)
                for (std::size_t k = 1; k < s.size(); ++k)
                    cum[k] += ee.flat_area;
            else
                cum.back() += ee.flat_area;
        }
        ge[i].id = "e" + std::to_string(i + 1);
        ge[i].tail = gv[ee.tail].id;
        ge[i].head = gv[ee.head].id;
        ge[i].measure = EdgeMeasure::table({std::move(s), std::move(cum)});
    }
    SurfaceInfo surf;
    surf.genus = m.genus();
    surf.boundary_components = static_cast<int>(loops.size());
    res.graph = MeasuredReebGraph(std::move(gv), std::move(ge), surf);

    // saddle diagnostics for the log-coefficient fit
    for (auto v : res.graph.saddles()) {
        auto tb = trunk_and_branches(res.graph, v);
        if (tb.trunk == npos || tb.branches[0] == npos || tb.branches[1] == npos)
            continue;
        const double fv = res.graph.vertex(v).f.to_double();
        std::array<std::size_t, 3> inc{tb.trunk, tb.branches[0], tb.branches[1]};
        double shortest = std::numeric_limits<double>::infinity();
        for (auto e : inc) {
            auto d = res.graph.domain(e);
            shortest = std::min(shortest, d.hi.to_double() - d.lo.to_double());
        }
        const double w = opt.fit_window * shortest;
        SaddleSamples ss;
        ss.saddle = res.graph.vertex(v).id;
        for (int i = 0; i < 3; ++i) {
            std::size_t e = inc[static_cast<std::size_t>(i)];
            ss.edges[static_cast<std::size_t>(i)] = res.graph.edge(e).id;
            const auto& tab = res.graph.edge(e).measure.table_data();
            const bool from_tail = res.graph.tail(e) == v;
            auto& out = ss.samples[static_cast<std::size_t>(i)];
            for (std::size_t k = 0; k < tab.f.size(); ++k) {
                double df = tab.f[k] - fv;
                if (df == 0.0 || std::fabs(df) > w)
                    continue;
                out.f.push_back(df);
                out.mu.push_back(from_tail ? tab.cumulative[k] : tab.cumulative.back() - tab.cumulative[k]);
            }
        }
        res.diagnostics.push_back(std::move(ss));
    }
    return res;
}

std::vector<LogFit> saddle_log_fits(const ExtractionResult& r)
{
    std::vector<LogFit> out;
    for (const auto& d : r.diagnostics)
        out.push_back(fit_log_coefficients(d.samples));
    return out;
}

bool CompatibilityReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

CompatibilityReport compatibility_check(const MeasuredReebGraph& g, const Mesh& m, double rtol)
{
    CompatibilityReport rep;
    auto dims = homology_dimensions(g);
    const int genus = m.genus();
    const int k = static_cast<int>(m.boundary_loops().size());
    rep.checks.push_back({"genus", dims.b1 == genus,
                          "b1(graph) = " + std::to_string(dims.b1) + ", mesh genus = " + std::to_string(genus)});
    rep.checks.push_back({"boundary", static_cast<int>(g.boundary_count()) == k,
                          "graph boundary vertices = " + std::to_string(g.boundary_count())
                              + ", mesh boundary loops = " + std::to_string(k)});
    double mass = total_mass_and_weight(g).mass.to_double();
    double area = m.area();
    bool vol_ok = std::fabs(mass - area) <= rtol * area;
    rep.checks.push_back({"volume", vol_ok,
                          "graph mass = " + std::to_string(mass) + ", mesh area = " + std::to_string(area)});
    if (m.declared().genus)
        rep.checks.push_back({"declared-genus", *m.declared().genus == dims.b1,
                              "declared genus = " + std::to_string(*m.declared().genus)
                                  + ", b1(graph) = " + std::to_string(dims.b1)});
    if (m.declared().boundary_components)
        rep.checks.push_back({"declared-boundary", *m.declared().boundary_components == k,
                              "declared boundary components = " + std::to_string(*m.declared().boundary_components)
                                  + ", mesh boundary loops = " + std::to_string(k)});
    return rep;
}

OneForm exact_one_form(const Mesh& m, const std::vector<double>& potential)
{
    if (potential.size() != m.vertex_count())
        throw std::invalid_argument("potential needs one value per vertex");
    OneForm w(m.edge_count());
    for (std::size_t e = 0; e < m.edge_count(); ++e)
        w[e] = potential[m.edges()[e].second] - potential[m.edges()[e].first];
    return w;
}

OneForm one_form_from(const Mesh& m, const std::function<double(std::size_t, std::size_t)>& integral)
{
    OneForm w(m.edge_count());
    for (std::size_t e = 0; e < m.edge_count(); ++e)
        w[e] = integral(m.edges()[e].first, m.edges()[e].second);
    return w;
}

PushforwardCirculation pushforward_circulation(const Mesh& m, const OneForm& form, const ExtractionResult& r,
                                               int levels_per_edge)
{
    if (form.size() != m.edge_count())
        throw std::invalid_argument("1-form needs one value per mesh edge");
    if (levels_per_edge < 1)
        throw std::invalid_argument("levels_per_edge must be positive");
    const auto& F = m.values();
    auto omega = [&](std::size_t u, std::size_t v) {
        double x = form[m.edge_index(u, v)];
        return u < v ? x : -x;
    };
    auto curl = [&](std::size_t t) {
        const auto& tr = m.triangles()[t];
        return omega(tr[0], tr[1]) + omega(tr[1], tr[2]) + omega(tr[2], tr[0]);
    };

    const auto& g = r.graph;
    PushforwardCirculation out;
    out.edges.resize(g.edge_count());
    parallel_for(g.edge_count(), [&](std::size_t e) {
        const auto& ee = r.edges[e];
        auto dom = g.domain(e);
        const double lo = dom.lo.to_double(), hi = dom.hi.to_double();
        EdgeCirculation ec;
        ec.edge = g.edge(e).id;

        std::vector<double> vals;
        for (const auto& [t, range] : ee.pieces)
            for (auto v : m.triangles()[t])
                vals.push_back(F[v]);
        std::sort(vals.begin(), vals.end());
        const double nudge = 1e-9 * (hi - lo);

        for (const auto& [t, range] : ee.pieces) {
            auto f = sorted_values(m, t);
            double A = m.triangle_area(t);
            ec.curl += curl(t) * (area_below(f, A, range[1]) - area_below(f, A, range[0])) / A;
        }

        for (int k = 0; k < levels_per_edge; ++k) {
            double s = lo + (hi - lo) * (k + 0.5) / levels_per_edge;
            for (int tries = 0; tries < 100; ++tries) {
                auto it = std::lower_bound(vals.begin(), vals.end(), s - nudge);
                if (it == vals.end() || *it > s + nudge)
                    break;
                s += 3 * nudge;
            }
            double value = 0.0, above = 0.0;
            for (const auto& [t, range] : ee.pieces) {
                auto f = sorted_values(m, t);
                double A = m.triangle_area(t);
                if (range[1] > s)
                    above += curl(t) * (area_below(f, A, range[1]) - area_below(f, A, std::max(s, range[0]))) / A;
                if (!(range[0] < s && s < range[1] && f[0] < s && s < f[2]))
                    continue;
                const auto& tr = m.triangles()[t];
                // crossing points in barycentric coordinates
                std::array<std::array<double, 3>, 2> pts{};
                int n = 0;
                for (int a = 0; a < 3 && n < 2; ++a) {
                    int b = (a + 1) % 3;
                    double fa = F[tr[a]], fb = F[tr[b]];
                    if ((fa - s) * (fb - s) < 0) {
                        double u = (s - fa) / (fb - fa);
                        std::array<double, 3> lam{0, 0, 0};
                        lam[a] = 1 - u;
                        lam[b] = u;
                        pts[n++] = lam;
                    }
                }
                if (n != 2)
                    continue;
                int low = 0;
                for (int a = 1; a < 3; ++a)
                    if (F[tr[a]] < F[tr[low]])
                        low = a;
                // orient so the lower vertex lies on the left
                std::array<double, 3> el{0, 0, 0};
                el[low] = 1;
                auto det3 = [](const std::array<double, 3>& x, const std::array<double, 3>& y,
                               const std::array<double, 3>& z) {
                    return x[0] * (y[1] * z[2] - y[2] * z[1]) - x[1] * (y[0] * z[2] - y[2] * z[0])
                           + x[2] * (y[0] * z[1] - y[1] * z[0]);
                };
                auto p = pts[0], q = pts[1];
                if (det3(p, q, el) < 0)
                    std::swap(p, q);
                std::array<double, 3> mid{};
                for (int a = 0; a < 3; ++a)
                    mid[a] = 0.5 * (p[a] + q[a]);
                for (int a = 0; a < 3; ++a) {
                    int b = (a + 1) % 3;
                    double w = omega(tr[a], tr[b]);
                    value += w * (mid[a] * (q[b] - p[b]) - mid[b] * (q[a] - p[a]));
                }
            }
            ec.levels.push_back(s);
            ec.values.push_back(value);
            ec.head_estimates.push_back(value + above);
        }
        double sum = 0.0;
        for (double h : ec.head_estimates)
            sum += h;
        ec.head_limit = sum / static_cast<double>(ec.head_estimates.size());
        ec.tail_limit = ec.head_limit - ec.curl;
        out.edges[e] = std::move(ec);
    });

    for (const auto& ec : out.edges) {
        out.head_limits.push_back(Scalar(ec.head_limit));
        out.scale = std::max({out.scale, std::fabs(ec.head_limit), std::fabs(ec.tail_limit)});
    }
    for (auto v : g.saddles()) {
        double s = 0.0;
        for (auto e : g.in_edges(v))
            s += out.edges[e].head_limit;
        for (auto e : g.out_edges(v))
            s -= out.edges[e].tail_limit;
        out.kirchhoff_residual = std::max(out.kirchhoff_residual, std::fabs(s));
    }
    return out;
}

}  // namespace reebflow
