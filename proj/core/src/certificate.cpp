#include "reebflow/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace reebflow {

SignCoboundary sign_coboundary(const Digraph& g, const std::vector<int>& eps)
{
    if (eps.size() != g.edges.size())
        throw std::invalid_argument("sign function must have one entry per edge");
    const std::size_t V = g.vertices;
    // reorient: eps = -1 reverses the edge
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto [t, h] = g.edges[e];
        if (t >= V || h >= V)
            throw std::invalid_argument("edge endpoint out of range");
        if (eps[e] != 1 && eps[e] != -1)
            throw std::invalid_argument("sign function values must be +1 or -1");
        arcs.push_back(eps[e] > 0 ? std::make_pair(t, h) : std::make_pair(h, t));
    }
    std::vector<std::vector<std::size_t>> out(V), in(V);
    std::vector<std::size_t> indeg(V, 0);
    for (std::size_t e = 0; e < arcs.size(); ++e) {
        out[arcs[e].first].push_back(e);
        in[arcs[e].second].push_back(e);
        ++indeg[arcs[e].second];
    }

    SignCoboundary res;
    res.potential.assign(V, 0);
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t v = 0; v < V; ++v)
        if (indeg[v] == 0)
            ready.push(v);
    std::vector<bool> done(V, false);
    long long rank = 0;
    while (!ready.empty()) {
        std::size_t v = ready.top();
        ready.pop();
        done[v] = true;
        res.potential[v] = ++rank;
        for (auto e : out[v])
            if (--indeg[arcs[e].second] == 0)
                ready.push(arcs[e].second);
    }

    if (static_cast<std::size_t>(rank) == V) {
        res.ok = true;
        for (const auto& [t, h] : g.edges)
            res.xi.push_back(res.potential[h] - res.potential[t]);
        return res;
    }

    // every unfinished vertex keeps an in-arc from another unfinished vertex;
    // walking those backwards must revisit a vertex
    std::size_t v = 0;
    while (done[v])
        ++v;
    std::vector<std::size_t> seen_at(V, npos);
    std::vector<std::size_t> walk;
    while (seen_at[v] == npos) {
        seen_at[v] = walk.size();
        std::size_t step = npos;
        for (auto e : in[v])
            if (!done[arcs[e].first]) {
                step = e;
                break;
            }
        walk.push_back(step);
        v = arcs[step].first;
    }
    res.cycle.assign(walk.begin() + static_cast<std::ptrdiff_t>(seen_at[v]), walk.end());
    std::reverse(res.cycle.begin(), res.cycle.end());
    res.potential.clear();
    return res;
}

namespace {

int sign_int(const Scalar& x)
{
    Sign s = x.sign(1e-12 * std::max(1.0, std::fabs(x.to_double())));
    if (s == Sign::Indeterminate)
        return 0;
    return static_cast<int>(s);
}

}  // namespace

GraphCertificate graph_certificate(const CirculationFunction& c, bool force)
{
    if (!force) {
        Verdict v = is_balanced(c);
        if (!v.holds())
            throw std::invalid_argument("graph_certificate needs a balanced circulation function");
    }
    GraphCertificate cert;
    cert.refined = refine_at_zeros(c.graph(), c);
    const auto& g = cert.refined.graph;
    const auto& cr = *cert.refined.circulation;

    Digraph d;
    d.vertices = g.vertex_count();
    std::vector<int> eps;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        Interval dom = g.domain(e);
        Scalar mid = (dom.lo + dom.hi) / Scalar(2);
        CertificateEdge ce;
        ce.id = g.edge(e).id;
        ce.origin = cert.refined.origin[e];
        ce.lo = dom.lo;
        ce.hi = dom.hi;
        ce.sign_f = sign_int(mid);
        ce.sign_c = sign_int(evaluate(cr, e, mid));
        if (ce.sign_f == 0 || ce.sign_c == 0)
            throw std::runtime_error("f or c vanishes inside refined edge '" + ce.id + "'");
        ce.eps = -ce.sign_f * ce.sign_c;
        eps.push_back(ce.eps);
        d.edges.emplace_back(g.tail(e), g.head(e));
        cert.edges.push_back(std::move(ce));
    }

    SignCoboundary sc = sign_coboundary(d, eps);
    if (!sc.ok) {
        for (auto e : sc.cycle)
            cert.cycle.push_back(g.edge(e).id);
        if (!force)
            throw std::logic_error("internal consistency fault: balanced circulation produced a sign cycle");
        return cert;
    }
    cert.ok = true;
    cert.potential = sc.potential;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        auto& ce = cert.edges[e];
        ce.xi = sc.xi[e];
        // ∫_lo^hi g f df = g (hi² - lo²)/2 = ξ; hi² - lo² has the sign of f
        Scalar span = ce.hi * ce.hi - ce.lo * ce.lo;
        ce.density = Scalar(2) * Scalar(static_cast<long>(ce.xi)) / span;
    }

    // fundamental cycles of a BFS spanning forest
    const std::size_t V = g.vertex_count();
    std::vector<std::size_t> parent_edge(V, npos), depth(V, 0);
    std::vector<bool> visited(V, false), tree(g.edge_count(), false);
    for (std::size_t root = 0; root < V; ++root) {
        if (visited[root])
            continue;
        visited[root] = true;
        std::queue<std::size_t> q;
        q.push(root);
        while (!q.empty()) {
            std::size_t v = q.front();
            q.pop();
            for (const auto* list : {&g.out_edges(v), &g.in_edges(v)})
                for (auto e : *list) {
                    std::size_t w = g.tail(e) == v ? g.head(e) : g.tail(e);
                    if (visited[w])
                        continue;
                    visited[w] = true;
                    parent_edge[w] = e;
                    depth[w] = depth[v] + 1;
                    tree[e] = true;
                    q.push(w);
                }
        }
    }
    auto edge_integral = [&](std::size_t e) {
        const auto& ce = cert.edges[e];
        double lo = ce.lo.to_double(), hi = ce.hi.to_double();
        return ce.density.to_double() * (hi * hi - lo * lo) / 2.0;
    };
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (tree[e])
            continue;
        // walk tail -> head along e, then back from head to tail in the tree
        double sum = edge_integral(e);
        std::size_t a = g.head(e), b = g.tail(e);
        // path from a up to the common ancestor is traversed child -> parent
        // (sign -1 if the tree edge points parent -> child); b's side reversed
        auto step_up = [&](std::size_t& v, double orient) {
            std::size_t pe = parent_edge[v];
            std::size_t p = g.tail(pe) == v ? g.head(pe) : g.tail(pe);
            double dir = g.tail(pe) == v ? 1.0 : -1.0;  // +1 when pe is traversed along its orientation
            sum += orient * dir * edge_integral(pe);
            v = p;
        };
        while (a != b) {
            if (depth[a] >= depth[b])
                step_up(a, 1.0);
            else
                step_up(b, -1.0);
        }
        cert.cycle_integrals.push_back(sum);
        cert.max_cycle_integral = std::max(cert.max_cycle_integral, std::fabs(sum));
    }
    return cert;
}

}  // namespace reebflow
