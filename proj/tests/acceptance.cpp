// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "reebflow/casimirs.hpp"
#include "reebflow/certificate.hpp"
#include "reebflow/circulation.hpp"
#include "reebflow/generators.hpp"
#include "reebflow/io.hpp"
#include "reebflow/mesh.hpp"
#include "reebflow/polytope.hpp"
#include "reebflow/steady_triple.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace reebflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::ostringstream note;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            if (!pass)
                note << "; ";
            pass = false;
            note << what;
        }
    }
};

Scalar q(long n, long d = 1)
{
    return Scalar(Rational(n, d));
}

AffineCirculationSpace declared_space(const MeasuredReebGraph& g)
{
    return std::get<AffineCirculationSpace>(solve_with_declared_coordinates(g));
}

// stdout of the CLI, empty when it could not run
std::string cli(const std::string& args, int& code)
{
    std::string cmd = "\"" + std::string(REEB_STEADY_BIN) + "\" " + args + " 2>/dev/null";
    std::string out;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) {
        code = -1;
        return out;
    }
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0)
        out.append(buf, n);
    int status = ::pclose(p);
    code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

std::set<std::vector<Scalar>> as_set(const std::vector<std::vector<Scalar>>& v)
{
    return {v.begin(), v.end()};
}

// 1. torus interval (-1, 0) and the empty case
void torus_interval(Outcome& o)
{
    auto t0 = Clock::now();
    auto open = enumerate_vertices(negative_system(declared_space(gen::torus_graph({q(-3), q(-1), q(2), q(2)}))));
    auto h_empty = negative_system(declared_space(gen::torus_graph({q(-1), q(-4), q(2), q(3)})));
    double dt = seconds_since(t0);

    o.require(as_set(open.vertices) == std::set<std::vector<Scalar>>{{q(-1)}, {q(0)}} && open.rays.empty(),
              "vertices are not {-1, 0}");
    o.require(!feasibility(h_empty).feasible, "(-1,-4,2,3) is feasible");
    o.require(dt < 0.1, "took " + std::to_string(dt) + " s");

    int code = 0;
    auto j = Json::parse(cli("check-steady \"" + std::string(REEBFLOW_TEST_DATA) + "/torus.json\" --a \"-3,-1,2,2\"",
                             code));
    o.require(code == 0 && j["interval"] == Json::parse(R"(["-1", "0"])") && j["interval_open"] == true,
              "check-steady interval");
    auto e = Json::parse(cli("check-steady \"" + std::string(REEBFLOW_TEST_DATA) + "/torus.json\" --a \"-1,-4,2,3\"",
                             code));
    o.require(code == 2 && e["status"] == "empty polytope", "check-steady empty case");
    o.note << (o.pass ? "" : "; ") << "interval (-1, 0), " << dt * 1e3 << " ms";
}

// 2. pretzel trapezoid
void pretzel_vertices(Outcome& o)
{
    auto t0 = Clock::now();
    auto h = negative_system(declared_space(gen::pretzel_graph()));
    auto v = enumerate_vertices(h);
    auto b = boundedness(h);
    double dt = seconds_since(t0);
    std::set<std::vector<Scalar>> want{{q(-2), q(0)}, {q(-1), q(0)}, {q(0), q(-1)}, {q(0), q(-2)}};
    o.require(as_set(v.vertices) == want, "vertex set differs");
    o.require(v.rays.empty() && b.bounded, "not bounded");
    o.require(h.labels == std::vector<std::string>{"c(G;e3)", "c(G;e4)"}, "coordinates are not the G limits");
    o.require(dt < 0.1, "took " + std::to_string(dt) + " s");

    int code = 0;
    auto j = Json::parse(cli("polytope \"" + std::string(REEBFLOW_TEST_DATA) + "/pretzel.json\" --vertices", code));
    o.require(code == 0 && j["V"]["vertices"].size() == 4 && j["V"]["rays"].empty(), "CLI V-rep");
    o.note << (o.pass ? "" : "; ") << v.vertices.size() << " vertices, " << dt * 1e3 << " ms";
}

// 3. nullspace dimension against κ and κ + k - 1, with κ = E - V + 1
void dimension_formula(Outcome& o)
{
    gen::Rng rng(2024);
    int checked = 0;
    for (auto fam : {gen::Family::Tree, gen::Family::Closed, gen::Family::Bordered})
        for (int k = 0; k < 200; ++k) {
            gen::FamilyParams p{fam, 1 + k % 3, fam == gen::Family::Bordered ? 1 + (k / 3) % 3 : 0, 2};
            auto g = gen::random_graph(rng, p);
            auto sol = solve_circulation_space(g);
            if (!std::holds_alternative<AffineCirculationSpace>(sol)) {
                o.require(false, std::string(gen::to_string(fam)) + " graph without a solution space");
                return;
            }
            int kappa = static_cast<int>(g.edge_count()) - static_cast<int>(g.vertex_count()) + 1;
            int bnd = 0;
            for (std::size_t v = 0; v < g.vertex_count(); ++v)
                bnd += g.vertex(v).role == VertexRole::Boundary;
            int want = fam == gen::Family::Bordered ? kappa + bnd - 1 : kappa;
            if (fam == gen::Family::Closed && kappa != p.genus)
                o.require(false, "closed graph with κ != genus");
            if (fam == gen::Family::Bordered && bnd != p.boundary)
                o.require(false, "bordered graph with wrong boundary count");
            int got = std::get<AffineCirculationSpace>(sol).dim();
            if (got != want) {
                o.require(false, std::string(gen::to_string(fam)) + " dim " + std::to_string(got) + " != "
                                     + std::to_string(want));
                return;
            }
            ++checked;
        }
    o.note << checked << " graphs";
}

// 4. balanced iff totally negative on closed graphs
void balanced_iff_negative(Outcome& o)
{
    gen::Rng rng(4);
    std::mt19937_64 pick(41);
    std::uniform_int_distribution<long> d(-64, 64);
    int decided = 0, agree = 0, negative = 0;
    for (int k = 0; k < 1000; ++k) {
        std::optional<CirculationFunction> c;
        if (k % 2 == 0) {
            auto inst = gen::random_totally_negative(rng, 1 + k % 3);
            c.emplace(inst.graph, inst.head_limits);
        } else {
            auto sp = std::get<AffineCirculationSpace>(
                solve_circulation_space(gen::random_graph(rng, {gen::Family::Closed, 1 + k % 3, 0, 2})));
            std::vector<Scalar> t;
            for (int i = 0; i < sp.dim(); ++i)
                t.push_back(q(d(pick), 8));
            c.emplace(sp.point(t));
        }
        auto b = is_balanced(*c, 1e-9), n = is_totally_negative(*c, 1e-9);
        if (b.status == Verdict::Status::Indeterminate || n.status == Verdict::Status::Indeterminate)
            continue;
        ++decided;
        agree += b.holds() == n.holds();
        negative += n.holds();
    }
    o.require(agree == decided, std::to_string(decided - agree) + " disagreements");
    o.require(decided >= 900, "only " + std::to_string(decided) + " decidable samples");
    o.note << (o.pass ? "" : "; ") << agree << "/" << decided << " agree, " << negative << " totally negative";
}

// 5. recession cone {0} on feasible closed systems
void boundedness_closed(Outcome& o)
{
    gen::Rng rng(5);
    int feasible = 0, bounded = 0;
    for (int k = 0; k < 200; ++k) {
        MeasuredReebGraph g = k % 2 ? gen::random_totally_negative(rng, 1 + k % 3, 1).graph
                                    : gen::random_graph(rng, {gen::Family::Closed, 1 + k % 3, 0, 1});
        auto h = negative_system(std::get<AffineCirculationSpace>(solve_circulation_space(g)));
        if (!feasibility(h).feasible)
            continue;
        ++feasible;
        bounded += boundedness(h).bounded;
    }
    o.require(bounded == feasible, std::to_string(feasible - bounded) + " unbounded");
    o.require(feasible >= 100, "only " + std::to_string(feasible) + " feasible systems");
    o.note << (o.pass ? "" : "; ") << bounded << "/" << feasible << " feasible systems bounded";
}

// 6. all-positive disk has no balanced region
void positive_disk(Outcome& o)
{
    auto regions = balanced_regions(declared_space(gen::positive_disk_graph()));
    o.require(regions.size() == 2, std::to_string(regions.size()) + " sign patterns");
    for (const auto& r : regions)
        o.require(!r.verdict.feasible, "a sign pattern is feasible");
    o.note << (o.pass ? "" : "; ") << regions.size() << " sign patterns, all empty";
}

// 7. local steady triples
void triples(Outcome& o)
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> coef(-4, 4);
    std::uniform_int_distribution<int> deg(1, 4);
    int passed = 0, levels = 0;
    double worst_a = 0, worst_fd = 0;
    for (int k = 0; k < 50; ++k) {
        std::vector<Scalar> c{Scalar(coef(rng))};
        int dg = deg(rng);
        for (int i = 1; i <= dg; ++i)
            c.push_back(Scalar(coef(rng)));
        if (c[1] == Scalar(0))
            c[1] = Scalar(1);
        if (c.back() == Scalar(0))
            c.back() = Scalar(1);
        ScalarPoly z(c);
        std::optional<SteadyTriple> t;
        switch (k % 3) {
        case 0: t = SteadyTriple::cylinder(z, 0.5 * static_cast<double>(coef(rng))); break;
        case 1: t = SteadyTriple::elliptic(z, 0.8); break;
        default: {
            int eps = k % 2 ? 1 : -1;
            double circ = 2.0 + std::fabs(c[0].to_double());
            t = SteadyTriple::hyperbolic(z, eps, eps * circ);
        }
        }
        VerifyOptions opt;
        opt.h = 1e-4;
        opt.levels = 100;
        auto rep = verify_triple(*t, opt);
        worst_a = std::max({worst_a, rep.dalpha.analytic, rep.j_squared, rep.pullback.analytic});
        worst_fd = std::max({worst_fd, rep.dalpha.finite_difference, rep.pullback.finite_difference});
        levels += rep.levels_checked;
        if (rep.passed() && rep.levels_checked + rep.levels_skipped == 100)
            ++passed;
        else
            o.require(false, std::string("triple ") + std::to_string(k) + " (" + to_string(t->kind()) + ")");
    }
    o.note << (o.pass ? "" : "; ") << passed << "/50 triples, " << levels << " levels, analytic " << worst_a
           << ", fd " << worst_fd;
}

// 8. Casimirs do not separate orbits
void casimir_incompleteness(Outcome& o)
{
    auto g = gen::split_graph();
    // (f+1)²(2-f)²/10 on the branch range [-1, 2]
    ScalarPoly l({Scalar(1), Scalar(1)}), r({Scalar(2), Scalar(-1)});
    auto bump = l * l * r * r * q(1, 10);
    auto moved = move_density_between_branches(g, "s", bump, q(-1), q(2), 0);
    auto a = moment_table(g, 10), b = moment_table(moved, 10);
    double worst = 0;
    for (std::size_t i = 0; i <= 10; ++i)
        worst = std::max(worst, abs(a.total[i] - b.total[i]).to_double());
    o.require(worst < 1e-12, "total moments differ by " + std::to_string(worst));
    auto forced = [](const MeasuredReebGraph& x) { return declared_space(x).particular_function(); };
    auto cmp = orbit_equivalent(forced(g), forced(moved));
    o.require(!cmp.equivalent, "orbit_equivalent says equivalent");
    o.require(cmp.invariant == "edge_moment" && cmp.order.has_value() && !cmp.subject.empty(),
              "witness is " + cmp.invariant);
    o.note << (o.pass ? "" : "; ") << "totals m0..m10 differ by " << worst << ", witness m"
           << (cmp.order ? std::to_string(*cmp.order) : "?") << " on " << cmp.subject;
}

// brute force: a potential in {1..n}^n with coboundary of sign eps
bool coboundary_exists(const Digraph& g, const std::vector<int>& eps)
{
    std::vector<long long> pot(g.vertices, 1);
    for (;;) {
        bool ok = true;
        for (std::size_t e = 0; e < g.edges.size() && ok; ++e)
            ok = (pot[g.edges[e].second] - pot[g.edges[e].first]) * eps[e] > 0;
        if (ok)
            return true;
        std::size_t k = 0;
        while (k < g.vertices && ++pot[k] > static_cast<long long>(g.vertices))
            pot[k++] = 1;
        if (k == g.vertices)
            return false;
    }
}

bool answer_is_valid(const Digraph& g, const std::vector<int>& eps, const SignCoboundary& r)
{
    if (r.ok) {
        if (r.xi.size() != g.edges.size())
            return false;
        for (std::size_t e = 0; e < g.edges.size(); ++e)
            if (r.xi[e] != r.potential[g.edges[e].second] - r.potential[g.edges[e].first] || r.xi[e] * eps[e] <= 0)
                return false;
        return true;
    }
    if (r.cycle.empty())
        return false;
    auto ends = [&](std::size_t e) {
        auto [a, b] = g.edges[e];
        return eps[e] > 0 ? std::pair{a, b} : std::pair{b, a};
    };
    for (std::size_t k = 0; k < r.cycle.size(); ++k)
        if (ends(r.cycle[k]).second != ends(r.cycle[(k + 1) % r.cycle.size()]).first)
            return false;
    return true;
}

// 9. sign coboundaries against brute force
void coboundary(Outcome& o)
{
    auto t0 = Clock::now();
    long cases = 0, mismatches = 0;
    auto check = [&](const Digraph& g) {
        for (std::size_t mask = 0; mask < (1u << g.edges.size()); ++mask) {
            std::vector<int> eps;
            for (std::size_t e = 0; e < g.edges.size(); ++e)
                eps.push_back(mask >> e & 1 ? 1 : -1);
            auto r = sign_coboundary(g, eps);
            mismatches += r.ok != coboundary_exists(g, eps) || !answer_is_valid(g, eps, r);
            ++cases;
        }
    };
    // every multiset of up to 5 ordered pairs (loops included) on n <= 4 vertices
    for (std::size_t n = 1; n <= 4; ++n) {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                pairs.push_back({a, b});
        std::function<void(Digraph&, std::size_t)> grow = [&](Digraph& g, std::size_t from) {
            check(g);
            if (g.edges.size() == 5)
                return;
            for (std::size_t p = from; p < pairs.size(); ++p) {
                g.edges.push_back(pairs[p]);
                grow(g, p);
                g.edges.pop_back();
            }
        };
        Digraph g{n, {}};
        grow(g, 0);
    }
    long exhaustive = cases;
    // connected graphs on 5 and 6 vertices: a random spanning tree plus extra edges up to 5
    std::mt19937_64 rng(9);
    for (int k = 0; k < 20000; ++k) {
        std::size_t n = 5 + k % 2;
        Digraph g{n, {}};
        for (std::size_t v = 1; v < n; ++v) {
            std::size_t u = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
            g.edges.push_back(rng() % 2 ? std::pair{u, v} : std::pair{v, u});
        }
        std::uniform_int_distribution<std::size_t> any(0, n - 1);
        while (g.edges.size() < 5)
            g.edges.push_back({any(rng), any(rng)});
        std::vector<int> eps;
        for (std::size_t e = 0; e < g.edges.size(); ++e)
            eps.push_back(rng() % 2 ? 1 : -1);
        auto r = sign_coboundary(g, eps);
        mismatches += r.ok != coboundary_exists(g, eps) || !answer_is_valid(g, eps, r);
        ++cases;
    }
    double dt = seconds_since(t0);
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    o.require(exhaustive == 618496, "exhaustive count " + std::to_string(exhaustive));
    o.require(dt < 60, "took " + std::to_string(dt) + " s");
    o.note << (o.pass ? "" : "; ") << exhaustive << " exhaustive + " << cases - exhaustive << " random cases, " << dt
           << " s";
}

// 10. every balanced instance certifies
void certificates(Outcome& o)
{
    gen::Rng rng(10);
    int ok = 0, faults = 0;
    double worst = 0;
    for (int k = 0; k < 500; ++k) {
        auto inst = gen::random_totally_negative(rng, 1 + k % 3, 1 + k % 2);
        CirculationFunction c(inst.graph, inst.head_limits);
        if (!is_balanced(c).holds()) {
            o.require(false, "instance " + std::to_string(k) + " not balanced");
            continue;
        }
        try {
            auto cert = graph_certificate(c);
            bool good = cert.ok && static_cast<int>(cert.cycle_integrals.size()) == homology_dimensions(inst.graph).b1
                        && cert.max_cycle_integral < 1e-12;
            ok += good;
            worst = std::max(worst, cert.max_cycle_integral);
        } catch (const std::logic_error&) {
            ++faults;
        }
    }
    o.require(ok == 500, std::to_string(500 - ok) + " instances without a certificate");
    o.require(faults == 0, std::to_string(faults) + " internal faults");
    o.note << (o.pass ? "" : "; ") << ok << "/500 certified, max cycle integral " << worst;
}

// 11. mesh pipeline on the torus height field
void mesh_pipeline(Outcome& o)
{
    auto t0 = Clock::now();
    auto m = make_torus(50, 50);
    auto r = extract_reeb(m);
    const auto& g = r.graph;
    int mins = 0, maxs = 0, saddles = 0;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        mins += g.vertex(v).role == VertexRole::Min;
        maxs += g.vertex(v).role == VertexRole::Max;
        saddles += g.vertex(v).role == VertexRole::Saddle;
    }
    o.require(mins == 1 && maxs == 1 && saddles == 2, "critical census");
    o.require(homology_dimensions(g).b1 == 1, "b1 != 1");
    // the two saddles joined by the double edge
    auto sd = g.saddles();
    if (sd.size() == 2) {
        std::size_t lo = g.vertex(sd[0]).f < g.vertex(sd[1]).f ? sd[0] : sd[1];
        std::size_t hi = lo == sd[0] ? sd[1] : sd[0];
        int joined = 0;
        for (auto e : g.out_edges(lo))
            joined += g.head(e) == hi;
        o.require(joined == 2, "saddles not joined by a double edge");
    }
    double mass = total_mass_and_weight(g).mass.to_double();
    double rel = std::fabs(mass - m.area()) / m.area();
    o.require(rel < 0.005, "mass off by " + std::to_string(rel));

    auto fine = extract_reeb(make_torus(100, 100));
    double worst = 0;
    for (const auto& f : saddle_log_fits(fine))
        for (int b = 1; b < 3; ++b)
            worst = std::max(worst, std::fabs(f.kappa[b] / f.kappa[0] + 0.5) / 0.5);
    o.require(worst < 0.2, "log ratio error " + std::to_string(worst));
    double dt = seconds_since(t0);
    o.require(dt < 5, "took " + std::to_string(dt) + " s");
    o.note << (o.pass ? "" : "; ") << "mass error " << rel << ", log ratio error " << worst << ", " << dt << " s";
}

}  // namespace

int main()
{
    struct Criterion {
        const char* name;
        void (*run)(Outcome&);
    };
    const Criterion all[] = {
        {"torus admissibility interval", torus_interval},
        {"pretzel polytope vertices", pretzel_vertices},
        {"circulation space dimension", dimension_formula},
        {"balanced iff totally negative", balanced_iff_negative},
        {"closed systems bounded", boundedness_closed},
        {"positive disk obstruction", positive_disk},
        {"steady triple identities", triples},
        {"Casimir incompleteness", casimir_incompleteness},
        {"sign coboundary existence", coboundary},
        {"certificate totality", certificates},
        {"mesh pipeline", mesh_pipeline},
    };
    int failed = 0, i = 0;
    for (const auto& c : all) {
        ++i;
        Outcome o;
        auto t0 = Clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << i << " " << c.name << " (" << o.note.str() << ") ["
                  << seconds_since(t0) << " s]" << std::endl;
    }
    return failed ? 1 : 0;
}
