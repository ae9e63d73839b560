#include "reebflow/generators.hpp"

#include <algorithm>
#include <stdexcept>

namespace reebflow::gen {

namespace {

ScalarPoly x_times(const ScalarPoly& p)
{
    return p * ScalarPoly(std::vector<Scalar>{Scalar(0), Scalar(1)});
}

Scalar weight_of(const ScalarPoly& density, const Scalar& lo, const Scalar& hi)
{
    return x_times(density).integrate(lo, hi);
}

}  // namespace

EdgeMeasure realize_weight(const Scalar& lo, const Scalar& hi, const Scalar& w)
{
    if (!(lo < hi))
        throw std::invalid_argument("realize_weight needs lo < hi");
    const Scalar zero(0);
    if ((lo >= zero && !(w > zero)) || (hi <= zero && !(w < zero)))
        throw std::invalid_argument("no positive density on [" + lo.to_string() + ", " + hi.to_string()
                                    + "] has weight " + w.to_string());
    const Scalar span2 = hi * hi - lo * lo;
    if (span2 != zero && (w / span2) > zero)
        return EdgeMeasure::uniform(Scalar(2) * w / span2);

    const Scalar L = hi - lo;
    const ScalarPoly down(std::vector<Scalar>{hi / L, Scalar(-1) / L});   // (hi - f)/L
    const ScalarPoly up(std::vector<Scalar>{-lo / L, Scalar(1) / L});     // (f - lo)/L
    Scalar Wlo = weight_of(down, lo, hi), Whi = weight_of(up, lo, hi);
    if (Wlo < zero && Whi > zero) {
        Scalar p(1), r(1);
        if (w >= zero)
            r = (w - Wlo) / Whi;
        else
            p = (w - Whi) / Wlo;
        return EdgeMeasure::poly_log(down * p + up * r);
    }

    // One side of f = 0 is too thin for a linear density. Put unit density
    // everywhere and the remainder in a C¹ bump (f-a)²(b-f)² on the side
    // whose sign matches it.
    const Scalar rest = w - weight_of(ScalarPoly::constant(Scalar(1)), lo, hi);
    if (rest == zero)
        return EdgeMeasure::uniform();
    const Scalar a = rest < zero ? lo : zero, b = rest < zero ? zero : hi;
    const ScalarPoly fa(std::vector<Scalar>{-a, Scalar(1)}), bf(std::vector<Scalar>{b, Scalar(-1)});
    const ScalarPoly bump = fa * fa * bf * bf;
    return EdgeMeasure::poly_log(ScalarPoly::constant(Scalar(1)), {},
                                 {PolyPatch{a, b, bump * (rest / weight_of(bump, a, b))}});
}

const char* to_string(Family f)
{
    switch (f) {
    case Family::Tree: return "tree";
    case Family::Closed: return "closed";
    case Family::Bordered: return "bordered";
    }
    return "?";
}

Family parse_family(const std::string& s)
{
    if (s == "tree")
        return Family::Tree;
    if (s == "closed")
        return Family::Closed;
    if (s == "bordered")
        return Family::Bordered;
    throw std::invalid_argument("unknown graph family '" + s + "'");
}

namespace {

struct Skeleton {
    std::vector<VertexRole> role;
    std::vector<Scalar> h;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    std::size_t add_vertex(VertexRole r, Scalar height)
    {
        role.push_back(r);
        h.push_back(std::move(height));
        return role.size() - 1;
    }
    Scalar lo(std::size_t e) const { return h[edges[e].first]; }
    Scalar hi(std::size_t e) const { return h[edges[e].second]; }

    // Inserts a saddle at height x on e; returns the saddle.
    std::size_t split_edge(std::size_t e, const Scalar& x)
    {
        auto [t, hd] = edges[e];
        std::size_t s = add_vertex(VertexRole::Saddle, x);
        edges[e] = {t, s};
        edges.push_back({s, hd});
        return s;
    }
};

Scalar strictly_between(Rng& rng, const Scalar& a, const Scalar& b)
{
    std::uniform_int_distribution<int> n(1, 15);
    return a + (b - a) * Scalar(Rational(n(rng), 16));
}

std::size_t pick(Rng& rng, std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

void add_handle(Rng& rng, Skeleton& s)
{
    std::size_t e = pick(rng, s.edges.size());
    Scalar h1 = strictly_between(rng, s.lo(e), s.hi(e));
    std::size_t a = s.split_edge(e, h1);
    std::vector<std::size_t> cand;
    for (std::size_t f = 0; f < s.edges.size(); ++f)
        if (s.hi(f) > h1)
            cand.push_back(f);
    std::size_t f = cand[pick(rng, cand.size())];
    Scalar lo = s.lo(f) > h1 ? s.lo(f) : h1;
    Scalar h2 = strictly_between(rng, lo, s.hi(f));
    std::size_t b = s.split_edge(f, h2);
    s.edges.push_back({a, b});
}

// A leaf of role r attached through a new saddle: above the saddle for Max,
// below for Min, either way for Boundary.
void add_leaf(Rng& rng, Skeleton& s, VertexRole r)
{
    std::size_t e = pick(rng, s.edges.size());
    Scalar x = strictly_between(rng, s.lo(e), s.hi(e));
    std::size_t sd = s.split_edge(e, x);
    bool up = r == VertexRole::Max || (r == VertexRole::Boundary && rng() % 2 == 0);
    Scalar reach = Scalar(Rational(static_cast<long>(1 + rng() % 32), 4));
    if (up)
        s.edges.push_back({sd, s.add_vertex(r, x + reach)});
    else
        s.edges.push_back({s.add_vertex(r, x - reach), sd});
}

Skeleton random_skeleton(Rng& rng, const FamilyParams& p)
{
    Skeleton s;
    std::size_t lo = s.add_vertex(VertexRole::Min, Scalar(0));
    std::size_t hi = s.add_vertex(VertexRole::Max, Scalar(16));
    s.edges.push_back({lo, hi});
    int handles = p.family == Family::Tree ? 0 : p.genus;
    for (int i = 0; i < handles; ++i)
        add_handle(rng, s);
    int leaves = p.max_side_leaves > 0 ? static_cast<int>(rng() % (p.max_side_leaves + 1)) : 0;
    for (int i = 0; i < leaves; ++i)
        add_leaf(rng, s, rng() % 2 ? VertexRole::Max : VertexRole::Min);
    if (p.family == Family::Bordered)
        for (int i = 0; i < std::max(1, p.boundary); ++i)
            add_leaf(rng, s, VertexRole::Boundary);
    return s;
}

ScalarPoly random_density(Rng& rng, const Scalar& lo, const Scalar& hi)
{
    // positive coefficients in u = (f - lo)/L, so positive on the edge
    int deg = static_cast<int>(rng() % 3);
    std::vector<Scalar> c;
    for (int j = 0; j <= deg; ++j)
        c.push_back(Scalar(Rational(static_cast<long>(1 + rng() % 8), 4)));
    ScalarPoly u(c);
    Scalar L = hi - lo;
    return u.scaled(Scalar(1) / L).shifted(-lo);
}

MeasuredReebGraph build(const Skeleton& s, const std::vector<EdgeMeasure>& measures, SurfaceInfo surf,
                        std::vector<LimitRef> coords = {}, const std::vector<std::string>& vnames = {})
{
    std::vector<Vertex> vs;
    auto vid = [&](std::size_t v) { return vnames.empty() ? "v" + std::to_string(v + 1) : vnames[v]; };
    for (std::size_t v = 0; v < s.role.size(); ++v)
        vs.push_back({vid(v), s.role[v], s.h[v]});
    std::vector<Edge> es;
    for (std::size_t e = 0; e < s.edges.size(); ++e)
        es.push_back({"e" + std::to_string(e + 1), vid(s.edges[e].first), vid(s.edges[e].second), measures[e], {}});
    return MeasuredReebGraph(std::move(vs), std::move(es), surf, std::move(coords));
}

SurfaceInfo surface_of(const FamilyParams& p)
{
    SurfaceInfo surf;
    surf.genus = p.family == Family::Tree ? 0 : p.genus;
    surf.boundary_components = p.family == Family::Bordered ? std::max(1, p.boundary) : 0;
    return surf;
}

}  // namespace

MeasuredReebGraph random_graph(Rng& rng, const FamilyParams& p)
{
    if (p.genus < 0 || (p.family == Family::Bordered && p.boundary < 1))
        throw std::invalid_argument("bad family parameters");
    Skeleton s = random_skeleton(rng, p);
    std::vector<ScalarPoly> dens;
    for (std::size_t e = 0; e < s.edges.size(); ++e)
        dens.push_back(random_density(rng, s.lo(e), s.hi(e)));
    if (p.family != Family::Bordered) {
        // shift heights by ρ/μ so the total weight vanishes
        Scalar mass(0), rho(0);
        for (std::size_t e = 0; e < s.edges.size(); ++e) {
            mass += dens[e].integrate(s.lo(e), s.hi(e));
            rho += weight_of(dens[e], s.lo(e), s.hi(e));
        }
        Scalar d = rho / mass;
        for (auto& h : s.h)
            h -= d;
        for (auto& q : dens)
            q = q.shifted(d);
    }
    std::vector<EdgeMeasure> ms;
    for (auto& q : dens)
        ms.push_back(EdgeMeasure::poly_log(q));
    return build(s, ms, surface_of(p));
}

SteadyInstance random_totally_negative(Rng& rng, int genus, int max_side_leaves)
{
    FamilyParams p;
    p.family = genus == 0 ? Family::Tree : Family::Closed;
    p.genus = genus;
    p.max_side_leaves = max_side_leaves;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Skeleton s = random_skeleton(rng, p);
        // centre the heights so extrema sit on the right side of zero
        Scalar shift = strictly_between(rng, Scalar(4), Scalar(12));
        for (auto& h : s.h)
            h -= shift;
        const std::size_t V = s.role.size(), E = s.edges.size();
        std::vector<std::vector<std::size_t>> in(V), out(V);
        for (std::size_t e = 0; e < E; ++e) {
            out[s.edges[e].first].push_back(e);
            in[s.edges[e].second].push_back(e);
        }
        std::vector<Scalar> head(E, Scalar(0)), tail(E, Scalar(0));
        auto neg = [&] { return Scalar(Rational(-static_cast<long>(1 + rng() % 16), 4)); };
        for (std::size_t v = 0; v < V; ++v) {
            if (s.role[v] != VertexRole::Saddle)
                continue;
            if (in[v].size() == 1) {
                Scalar a = neg(), b = neg();
                tail[out[v][0]] = a;
                tail[out[v][1]] = b;
                head[in[v][0]] = a + b;
            } else {
                Scalar a = neg(), b = neg();
                head[in[v][0]] = a;
                head[in[v][1]] = b;
                tail[out[v][0]] = a + b;
            }
        }
        std::vector<EdgeMeasure> ms;
        bool ok = true;
        for (std::size_t e = 0; e < E && ok; ++e) {
            try {
                ms.push_back(realize_weight(s.lo(e), s.hi(e), head[e] - tail[e]));
            } catch (const std::invalid_argument&) {
                ok = false;
            }
        }
        if (ok)
            return {build(s, ms, surface_of(p)), head};
    }
    throw std::runtime_error("random_totally_negative: no admissible instance found");
}

namespace {

Skeleton torus_skeleton(const Scalar& fmin, const Scalar& fd, const Scalar& fe, const Scalar& fmax)
{
    Skeleton s;
    s.add_vertex(VertexRole::Min, fmin);
    s.add_vertex(VertexRole::Saddle, fd);
    s.add_vertex(VertexRole::Saddle, fe);
    s.add_vertex(VertexRole::Max, fmax);
    s.edges = {{0, 1}, {1, 2}, {1, 2}, {2, 3}};
    return s;
}

std::vector<EdgeMeasure> realize_all(const Skeleton& s, const std::vector<Scalar>& w)
{
    std::vector<EdgeMeasure> ms;
    for (std::size_t e = 0; e < s.edges.size(); ++e)
        ms.push_back(realize_weight(s.lo(e), s.hi(e), w[e]));
    return ms;
}

}  // namespace

MeasuredReebGraph torus_graph(const std::vector<Scalar>& a)
{
    if (a.size() != 4)
        throw std::invalid_argument("torus graph needs four edge weights");
    Skeleton s = torus_skeleton(Scalar(-2), Scalar(-1), Scalar(1), Scalar(2));
    SurfaceInfo surf;
    surf.genus = 1;
    surf.boundary_components = 0;
    return build(s, realize_all(s, a), surf, {{"D", "e2"}}, {"A", "D", "E", "B"});
}

MeasuredReebGraph pretzel_graph()
{
    Skeleton s;
    s.add_vertex(VertexRole::Min, Scalar(-3));     // C
    s.add_vertex(VertexRole::Saddle, Scalar(-2));  // D
    s.add_vertex(VertexRole::Saddle, Scalar(-1));  // G
    s.add_vertex(VertexRole::Saddle, Scalar(1));   // H
    s.add_vertex(VertexRole::Saddle, Scalar(2));   // E
    s.add_vertex(VertexRole::Max, Scalar(3));      // F
    s.edges = {{0, 1}, {1, 2}, {2, 3}, {2, 3}, {1, 4}, {3, 4}, {4, 5}};
    std::vector<Scalar> w{-1, -1, 0, 0, 0, 1, 1};
    SurfaceInfo surf;
    surf.genus = 2;
    surf.boundary_components = 0;
    return build(s, realize_all(s, w), surf, {{"G", "e3"}, {"G", "e4"}}, {"C", "D", "G", "H", "E", "F"});
}

MeasuredReebGraph positive_disk_graph()
{
    Skeleton s;
    s.add_vertex(VertexRole::Min, Scalar(1));
    s.add_vertex(VertexRole::Saddle, Scalar(2));
    s.add_vertex(VertexRole::Max, Scalar(3));
    s.add_vertex(VertexRole::Boundary, Scalar(4));
    s.edges = {{0, 1}, {1, 2}, {1, 3}};
    SurfaceInfo surf;
    surf.genus = 0;
    surf.boundary_components = 1;
    return build(s, realize_all(s, {Scalar(2), Scalar(3), Scalar(1)}), surf, {}, {"m", "s", "M", "b"});
}

MeasuredReebGraph split_graph()
{
    Skeleton s;
    s.add_vertex(VertexRole::Min, Scalar(-3));
    s.add_vertex(VertexRole::Saddle, Scalar(-1));
    s.add_vertex(VertexRole::Max, Scalar(2));
    s.add_vertex(VertexRole::Max, Scalar(2));
    s.edges = {{0, 1}, {1, 2}, {1, 3}};
    // weights -4, 2, 2 sum to zero
    const Scalar d(Rational(4, 3));
    std::vector<EdgeMeasure> ms{EdgeMeasure::uniform(), EdgeMeasure::uniform(d), EdgeMeasure::uniform(d)};
    SurfaceInfo surf;
    surf.genus = 0;
    surf.boundary_components = 0;
    return build(s, ms, surf, {}, {"m", "s", "M1", "M2"});
}

MeasuredReebGraph annulus_graph()
{
    Skeleton s;
    s.add_vertex(VertexRole::Boundary, Scalar(0));
    s.add_vertex(VertexRole::Boundary, Scalar(1));
    s.edges = {{0, 1}};
    SurfaceInfo surf;
    surf.genus = 0;
    surf.boundary_components = 2;
    return build(s, {EdgeMeasure::uniform()}, surf, {}, {"b0", "b1"});
}

WitnessInstance unbalanced_witness()
{
    Skeleton s = torus_skeleton(Scalar(-2), Scalar(1), Scalar(2), Scalar(3));
    std::vector<Scalar> w{-3, 1, 1, 1};
    SurfaceInfo surf;
    surf.genus = 1;
    surf.boundary_components = 0;
    // limit at D along e2 is +1: c > 0 on e2, c < 0 on e3
    return {build(s, realize_all(s, w), surf, {}, {"A", "D", "E", "B"}), {Scalar(-3), Scalar(2), Scalar(-3), Scalar(0)}};
}

}  // namespace reebflow::gen
