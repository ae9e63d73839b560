#include "reebflow/refine.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace reebflow {

RefinedGraph refine_at_zeros(const MeasuredReebGraph& g, const std::optional<CirculationFunction>& c)
{
    require_valid(g);
    std::vector<Vertex> vertices = g.vertices();
    std::vector<Edge> edges;
    std::map<std::string, std::string> origin_of;
    std::map<std::string, Scalar> head_of;
    RefinedGraph out;

    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        const Interval dom = g.domain(e);
        const EdgeMeasure& m = ed.measure;
        const Scalar zero(0);

        std::vector<Scalar> cuts;
        if (dom.lo < zero && zero < dom.hi)
            cuts.push_back(zero);

        if (c) {
            const Scalar lam = c->head_limit(e);
            auto c_at = [&](const Scalar& f) { return lam - m.moment(dom, 1, f, dom.hi); };
            // c is monotone on each side of f = 0, so each side holds at most one root
            std::vector<Scalar> knots{dom.lo};
            if (!cuts.empty())
                knots.push_back(zero);
            knots.push_back(dom.hi);
            const double scale = std::max({1.0, std::fabs(lam.to_double()), std::fabs(c->tail_limit(e).to_double())});
            const double ztol = 1e-12 * scale;
            auto sgn_of = [&](const Scalar& v) {
                if (v.is_exact())
                    return static_cast<int>(v.sign());
                double d = v.to_double();
                return std::fabs(d) <= ztol ? 0 : (d < 0 ? -1 : 1);
            };
            for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
                Scalar ca = k == 0 ? c->tail_limit(e) : c_at(knots[k]);
                Scalar cb = k + 2 == knots.size() ? lam : c_at(knots[k + 1]);
                int sa = sgn_of(ca), sb = sgn_of(cb);
                if (sa == 0 && sb == 0)
                    throw std::runtime_error("degenerate zero set: circulation vanishes on a whole piece of edge '"
                                             + ed.id + "'");
                if (sa * sb >= 0)
                    continue;
                const double a = knots[k].to_double(), b = knots[k + 1].to_double();
                auto fn = [&](double f) { return lam.to_double() - m.moment(dom, 1, Scalar(f), dom.hi).to_double(); };
                boost::uintmax_t iters = 200;
                auto bracket = boost::math::tools::toms748_solve(fn, a, b, ca.to_double(), cb.to_double(),
                                                                 boost::math::tools::eps_tolerance<double>(52), iters);
                double root = 0.5 * (bracket.first + bracket.second);
                if (root <= a || root >= b)
                    continue;
                cuts.push_back(Scalar(root));
            }
        }

        std::sort(cuts.begin(), cuts.end(), [](const Scalar& x, const Scalar& y) { return x < y; });
        if (cuts.empty()) {
            edges.push_back(ed);
            origin_of[ed.id] = ed.id;
            if (c)
                head_of[ed.id] = c->head_limit(e);
            continue;
        }
        if (ed.weight)
            throw std::invalid_argument("edge '" + ed.id + "' has an explicit weight; refinement needs measure weights");

        std::string prev = ed.tail;
        Scalar prev_f = dom.lo;
        for (std::size_t k = 0; k <= cuts.size(); ++k) {
            std::string next;
            Scalar next_f;
            if (k < cuts.size()) {
                next = ed.id + ".m" + std::to_string(k + 1);
                next_f = cuts[k];
                vertices.push_back({next, VertexRole::Marker, next_f});
                out.markers.push_back(next);
            } else {
                next = ed.head;
                next_f = dom.hi;
            }
            Edge piece;
            piece.id = ed.id + "." + std::to_string(k + 1);
            piece.tail = prev;
            piece.head = next;
            piece.measure = m.restricted(dom, {prev_f, next_f});
            edges.push_back(piece);
            origin_of[piece.id] = ed.id;
            if (c)
                head_of[piece.id] = k < cuts.size()
                                        ? Scalar(c->head_limit(e) - m.moment(dom, 1, next_f, dom.hi))
                                        : c->head_limit(e);
            prev = next;
            prev_f = next_f;
        }
    }

    out.graph = MeasuredReebGraph(std::move(vertices), std::move(edges), g.surface(), {}, g.tolerance());
    for (const auto& ed : out.graph.edges())
        out.origin.push_back(origin_of.at(ed.id));
    if (c) {
        std::vector<Scalar> h;
        for (const auto& ed : out.graph.edges())
            h.push_back(head_of.at(ed.id));
        out.circulation = CirculationFunction(out.graph, std::move(h));
    }
    return out;
}

MeasuredReebGraph merge_markers(const RefinedGraph& r)
{
    const auto& g = r.graph;
    std::vector<Vertex> vertices;
    for (const auto& v : g.vertices())
        if (v.role != VertexRole::Marker)
            vertices.push_back(v);

    // chain pieces of each original edge from its tail upwards
    std::map<std::string, std::vector<std::size_t>> pieces;
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        pieces[r.origin.at(e)].push_back(e);

    std::vector<Edge> edges;
    for (auto& [id, list] : pieces) {
        std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
            return g.domain(a).lo < g.domain(b).lo;
        });
        for (std::size_t k = 1; k < list.size(); ++k)
            if (g.tail(list[k]) != g.head(list[k - 1]))
                throw std::invalid_argument("pieces of edge '" + id + "' are not contiguous");
        Edge merged;
        merged.id = id;
        merged.tail = g.edge(list.front()).tail;
        merged.head = g.edge(list.back()).head;
        Interval dom{g.domain(list.front()).lo, g.domain(list.back()).hi};
        if (list.size() == 1) {
            merged.measure = g.edge(list.front()).measure;
            merged.weight = g.edge(list.front()).weight;
            edges.push_back(std::move(merged));
            continue;
        }
        const EdgeMeasure& first = g.edge(list.front()).measure;
        if (first.kind() == EdgeMeasure::Kind::Table) {
            CumulativeTable t;
            double offset = first.table_data().cumulative.front();
            for (std::size_t k = 0; k < list.size(); ++k) {
                const auto& pt = g.edge(list[k]).measure.table_data();
                double base = pt.cumulative.front();
                for (std::size_t i = (k == 0 ? 0 : 1); i < pt.f.size(); ++i) {
                    t.f.push_back(pt.f[i]);
                    t.cumulative.push_back(offset + pt.cumulative[i] - base);
                }
                offset += pt.cumulative.back() - base;
            }
            merged.measure = EdgeMeasure::table(std::move(t));
        } else {
            std::vector<LogTerm> logs = first.logs();
            for (auto& l : logs) {
                if (l.at && *l.at == dom.lo) {
                    l.side = AnchorSide::Tail;
                    l.at.reset();
                } else if (l.at && *l.at == dom.hi) {
                    l.side = AnchorSide::Head;
                    l.at.reset();
                }
            }
            std::vector<PolyPatch> patches;
            for (auto e : list)
                for (const auto& p : g.edge(e).measure.patches()) {
                    if (!patches.empty() && patches.back().hi == p.lo && patches.back().poly == p.poly)
                        patches.back().hi = p.hi;
                    else
                        patches.push_back(p);
                }
            merged.measure = EdgeMeasure::poly_log(first.poly(), std::move(logs), std::move(patches));
        }
        edges.push_back(std::move(merged));
    }
    return MeasuredReebGraph(std::move(vertices), std::move(edges), g.surface(), {}, g.tolerance());
}

}  // namespace reebflow
