#include "reebflow/reports.hpp"

namespace reebflow {

namespace {

Json scalars(const std::vector<Scalar>& v)
{
    Json a = Json::array();
    for (const auto& x : v)
        a.push_back(to_json(x));
    return a;
}

Json residual(const Residual& r)
{
    return Json{{"analytic", r.analytic}, {"finite_difference", r.finite_difference}};
}

}  // namespace

Json to_json(const MomentTable& t)
{
    Json rows = Json::object();
    for (std::size_t e = 0; e < t.edges.size(); ++e)
        rows[t.edges[e]] = scalars(t.rows[e]);
    return Json{{"order", t.order}, {"edges", rows}, {"total", scalars(t.total)}};
}

Json to_json(const OrbitComparison& c, const MeasuredReebGraph& g1, const MeasuredReebGraph& g2)
{
    Json j;
    j["equivalent"] = c.equivalent;
    if (c.equivalent) {
        Json vm = Json::object(), em = Json::object();
        for (std::size_t v = 0; v < c.vertex_map.size(); ++v)
            vm[g1.vertex(v).id] = g2.vertex(c.vertex_map[v]).id;
        for (std::size_t e = 0; e < c.edge_map.size(); ++e)
            em[g1.edge(e).id] = g2.edge(c.edge_map[e]).id;
        j["vertex_map"] = vm;
        j["edge_map"] = em;
    } else {
        j["invariant"] = c.invariant;
        if (c.order)
            j["order"] = *c.order;
        if (!c.subject.empty())
            j["subject"] = c.subject;
        j["detail"] = c.detail;
    }
    return j;
}

Json to_json(const VerificationReport& r)
{
    Json j;
    j["chart"] = to_string(r.kind);
    j["grid"] = r.grid;
    j["points"] = r.points;
    j["h"] = r.h;
    j["tolerances"] = {{"analytic", r.tol_analytic}, {"finite_difference", r.tol_fd}};
    j["dalpha_minus_F_omega"] = residual(r.dalpha);
    j["j_squared_plus_id"] = r.j_squared;
    j["metric"] = {{"asymmetry", r.metric_asymmetry}, {"min_eigenvalue", r.metric_min_eigenvalue}};
    j["pullback_plus_dH"] = residual(r.pullback);
    Json s = {{"levels_checked", r.levels_checked},
              {"levels_skipped", r.levels_skipped},
              {"failures", r.sign_rule_failures}};
    if (r.first_failing_level)
        s["first_failing_level"] = *r.first_failing_level;
    j["sign_rule"] = s;
    j["passed"] = r.passed();
    return j;
}

Json to_json(const GraphCertificate& c)
{
    Json j;
    j["ok"] = c.ok;
    if (!c.ok) {
        j["cycle"] = c.cycle;
        return j;
    }
    const auto& g = c.refined.graph;
    Json edges = Json::array();
    for (const auto& e : c.edges)
        edges.push_back({{"edge", e.id},
                         {"origin", e.origin},
                         {"lo", to_json(e.lo)},
                         {"hi", to_json(e.hi)},
                         {"sign_f", e.sign_f},
                         {"sign_c", e.sign_c},
                         {"eps", e.eps},
                         {"xi", e.xi},
                         {"density", to_json(e.density)}});
    Json pot = Json::object();
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        pot[g.vertex(v).id] = c.potential[v];
    j["potential"] = pot;
    j["edges"] = edges;
    j["cycle_integrals"] = c.cycle_integrals;
    j["max_cycle_integral"] = c.max_cycle_integral;
    return j;
}

Json to_json(const BalancedRegion& r)
{
    Json signs = Json::object();
    for (std::size_t i = 0; i < r.saddles.size(); ++i)
        signs[r.saddles[i]] = r.signs[i] > 0 ? "+" : "-";
    return {{"signs", signs}, {"H", to_json(r.system)}, {"feasibility", to_json(r.verdict)}};
}

Json to_json(const CompatibilityReport& r)
{
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"passed", r.passed()}, {"checks", checks}};
}

Json to_json(const LogFit& f)
{
    return {{"kappa", f.kappa}, {"residual_rms", f.residual_rms}, {"kappa_stderr", f.kappa_stderr}};
}

Json diagnostics_json(const ExtractionResult& r)
{
    Json out = Json::array();
    for (const auto& d : r.diagnostics) {
        Json j;
        j["saddle"] = d.saddle;
        j["edges"] = d.edges;
        Json samples = Json::array();
        for (const auto& s : d.samples)
            samples.push_back({{"f", s.f}, {"mu", s.mu}});
        j["samples"] = samples;
        try {
            LogFit fit = fit_log_coefficients(d.samples);
            j["fit"] = to_json(fit);
            if (fit.kappa[0] != 0.0)
                j["ratios"] = {2.0, 2.0 * fit.kappa[1] / fit.kappa[0], 2.0 * fit.kappa[2] / fit.kappa[0]};
        } catch (const std::invalid_argument& e) {
            j["fit_error"] = e.what();
        }
        out.push_back(j);
    }
    return out;
}

Json to_json(const PushforwardCirculation& p)
{
    Json edges = Json::array();
    for (const auto& e : p.edges)
        edges.push_back({{"edge", e.edge},
                         {"levels", e.levels},
                         {"values", e.values},
                         {"head_limit", e.head_limit},
                         {"tail_limit", e.tail_limit},
                         {"curl", e.curl}});
    return {{"edges", edges}, {"kirchhoff_residual", p.kirchhoff_residual}, {"scale", p.scale}};
}

}  // namespace reebflow
