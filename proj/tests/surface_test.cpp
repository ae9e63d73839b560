#include "reebflow/mesh.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace reebflow;
using namespace reebflow::testing;

namespace {

constexpr double pi = std::numbers::pi;

const char* octahedron_json = R"({
  "vertices": [
    {"id": "px", "xyz": [1, 0, 0], "F": 0.1}, {"id": "nx", "xyz": [-1, 0, 0], "F": -0.1},
    {"id": "py", "xyz": [0, 1, 0], "F": 0.05}, {"id": "ny", "xyz": [0, -1, 0], "F": -0.05},
    {"id": "pz", "xyz": [0, 0, 1], "F": 1}, {"id": "nz", "xyz": [0, 0, -1], "F": -1}
  ],
  "triangles": [[0,2,4],[2,1,4],[1,3,4],[3,0,4],[2,0,5],[1,2,5],[3,1,5],[0,3,5]]
})";

struct Census {
    int mins = 0, maxs = 0, saddles = 0, boundary = 0;
    std::size_t edges = 0;
    int b1 = 0;
    bool operator==(const Census&) const = default;
};

Census census(const MeasuredReebGraph& g)
{
    Census c;
    for (const auto& v : g.vertices()) {
        c.mins += v.role == VertexRole::Min;
        c.maxs += v.role == VertexRole::Max;
        c.saddles += v.role == VertexRole::Saddle;
        c.boundary += v.role == VertexRole::Boundary;
    }
    c.edges = g.edge_count();
    c.b1 = homology_dimensions(g).b1;
    return c;
}

double total_mass(const MeasuredReebGraph& g)
{
    return total_mass_and_weight(g).mass.to_double();
}

// Möbius band, n quads along the core circle, one across.
Mesh moebius(int n)
{
    std::vector<Point3> xyz;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2; ++j) {
            double u = 2 * pi * i / n, w = j ? 0.3 : -0.3;
            xyz.push_back({(1 + w * std::cos(u / 2)) * std::cos(u), (1 + w * std::cos(u / 2)) * std::sin(u),
                           w * std::sin(u / 2)});
        }
    std::vector<Tri> tris;
    for (int i = 0; i < n; ++i) {
        std::size_t a0 = 2 * i, a1 = 2 * i + 1;
        std::size_t b0 = 2 * ((i + 1) % n), b1 = b0 + 1;
        if (i == n - 1)
            std::swap(b0, b1);  // the half twist
        tris.push_back({a0, b0, b1});
        tris.push_back({a0, b1, a1});
    }
    std::vector<double> F;
    for (const auto& p : xyz)
        F.push_back(p[2]);
    return Mesh(xyz, F, tris);
}

// Hexagonal bipyramid; the apex sees its six neighbours alternate above and
// below, three lower-link components.
Mesh monkey_bipyramid()
{
    std::vector<Point3> xyz;
    std::vector<double> F;
    for (int k = 0; k < 6; ++k) {
        xyz.push_back({std::cos(pi * k / 3), std::sin(pi * k / 3), 0});
        F.push_back(k % 2 ? 1.0 : -1.0);
    }
    xyz.push_back({0, 0, 1});
    F.push_back(0.0);
    xyz.push_back({0, 0, -1});
    F.push_back(-5.0);
    std::vector<Tri> tris;
    for (std::size_t k = 0; k < 6; ++k) {
        tris.push_back({k, (k + 1) % 6, 6});
        tris.push_back({(k + 1) % 6, k, 7});
    }
    return Mesh(xyz, F, tris);
}

// minor angle of the standard torus (axis z, R = 2)
double tube_angle(const Point3& p)
{
    return std::atan2(p[2], std::hypot(p[0], p[1]) - 2.0);
}

int mesh_error_kind(const std::function<void()>& f, std::string& kind)
{
    try {
        f();
    } catch (const MeshError& e) {
        kind = e.kind();
        return 1;
    }
    return 0;
}

}  // namespace

TEST(Load, OctahedronJson)
{
    auto m = read_mesh_json(octahedron_json);
    EXPECT_EQ(m.vertex_count(), 6u);
    EXPECT_EQ(m.euler_characteristic(), 2);
    EXPECT_EQ(m.genus(), 0);
    auto crit = classify_critical(m);
    int mins = 0, maxs = 0, saddles = 0;
    for (const auto& c : crit) {
        mins += c.role == CriticalRole::Min;
        maxs += c.role == CriticalRole::Max;
        saddles += c.role == CriticalRole::Saddle;
    }
    EXPECT_EQ(mins, 1);
    EXPECT_EQ(maxs, 1);
    EXPECT_EQ(saddles, 0);

    auto r = extract_reeb(m);
    EXPECT_EQ(census(r.graph), (Census{1, 1, 0, 0, 1, 0}));
    EXPECT_NEAR(total_mass(r.graph), m.area(), 1e-9 * m.area());
    EXPECT_TRUE(validate_graph(r.graph).ok());
}

TEST(Load, OffRoundTrip)
{
    auto m = make_torus(12, 8);
    std::istringstream in(write_off(m));
    auto back = read_off(in);
    EXPECT_EQ(back.vertex_count(), m.vertex_count());
    EXPECT_EQ(back.triangles(), m.triangles());
    EXPECT_EQ(back.values(), m.values());
    auto file = load_mesh(data_path("torus_small.off"));
    EXPECT_EQ(file.euler_characteristic(), 0);
}

TEST(Load, TorusGridIsValid)
{
    auto m = make_torus(50, 50);
    EXPECT_EQ(m.euler_characteristic(), 0);
    EXPECT_EQ(m.genus(), 1);
    EXPECT_TRUE(m.boundary_loops().empty());
}

TEST(Load, Rejections)
{
    std::string kind;
    // a third triangle on the edge (0, 2)
    EXPECT_TRUE(mesh_error_kind(
        [] {
            auto base = read_mesh_json(octahedron_json);
            auto xyz = base.positions();
            auto F = base.values();
            auto tris = base.triangles();
            xyz.push_back({0.5, 0.5, 0.5});
            F.push_back(0.3);
            tris.push_back({0, 2, 6});
            Mesh(xyz, F, tris);
        },
        kind));
    EXPECT_EQ(kind, "non-manifold");

    EXPECT_TRUE(mesh_error_kind([] { moebius(12); }, kind));
    EXPECT_EQ(kind, "non-orientable");

    EXPECT_TRUE(mesh_error_kind([] { Mesh({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {0, 1, 2}, {{0, 1, 2}}); }, kind));
    EXPECT_EQ(kind, "zero-area");

    EXPECT_TRUE(mesh_error_kind(
        [] {
            Mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 0, 0}, {6, 0, 0}, {5, 1, 0}}, {0, 1, 2, 3, 4, 5},
                 {{0, 1, 2}, {3, 4, 5}});
        },
        kind));
    EXPECT_EQ(kind, "disconnected");

    EXPECT_TRUE(mesh_error_kind([] { read_mesh_json("{\"vertices\": 3}"); }, kind));
    EXPECT_EQ(kind, "format");
}

TEST(Classify, BoundaryMustBeALevel)
{
    // a square with F = x: the boundary loop is not constant
    Mesh sq({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {0, 1, 1.1, 0.1}, {{0, 1, 2}, {0, 2, 3}});
    std::string kind;
    EXPECT_TRUE(mesh_error_kind([&] { classify_critical(sq); }, kind));
    EXPECT_EQ(kind, "boundary");
}

TEST(Classify, MonkeySaddleRejected)
{
    auto m = monkey_bipyramid();
    std::string kind;
    EXPECT_TRUE(mesh_error_kind([&] { classify_critical(m); }, kind));
    EXPECT_EQ(kind, "non-simple-morse");
}

TEST(Classify, TorusHeight)
{
    auto m = make_torus(50, 50);
    int mins = 0, maxs = 0, saddles = 0;
    for (const auto& c : classify_critical(m)) {
        mins += c.role == CriticalRole::Min;
        maxs += c.role == CriticalRole::Max;
        saddles += c.role == CriticalRole::Saddle;
    }
    EXPECT_EQ(mins, 1);
    EXPECT_EQ(maxs, 1);
    EXPECT_EQ(saddles, 2);
    EXPECT_EQ(mins - saddles + maxs, m.euler_characteristic());
}

TEST(Extract, TorusShape)
{
    auto m = make_torus(50, 50);
    auto r = extract_reeb(m);
    const auto& g = r.graph;
    EXPECT_EQ(census(g), (Census{1, 1, 2, 0, 4, 1}));
    EXPECT_TRUE(validate_graph(g).ok());
    // Min -> S1 => S2 -> Max with the double edge between the saddles
    auto saddles = g.saddles();
    ASSERT_EQ(saddles.size(), 2u);
    std::size_t lo = saddles[0], hi = saddles[1];
    if (g.vertex(hi).f < g.vertex(lo).f)
        std::swap(lo, hi);
    EXPECT_EQ(g.out_edges(lo).size(), 2u);
    EXPECT_EQ(g.in_edges(hi).size(), 2u);
    for (auto e : g.out_edges(lo))
        EXPECT_EQ(g.head(e), hi);
    auto rep = compatibility_check(g, m);
    EXPECT_TRUE(rep.passed());
}

TEST(Extract, DiskWithBoundary)
{
    auto m = make_bump_disk(16, 48);
    auto r = extract_reeb(m);
    auto c = census(r.graph);
    EXPECT_EQ(c.boundary, 1);
    EXPECT_EQ(c.mins, 1);
    EXPECT_EQ(c.maxs, 1);
    EXPECT_EQ(c.saddles, 1);
    EXPECT_EQ(c.b1, 0);
    EXPECT_TRUE(validate_graph(r.graph).ok());
    EXPECT_TRUE(compatibility_check(r.graph, m).passed());
}

TEST(Compatibility, DeclaredGenusMismatch)
{
    auto m = make_sphere(2).with_declared(SurfaceInfo{1, 0});
    auto r = extract_reeb(m);
    auto rep = compatibility_check(r.graph, m);
    EXPECT_FALSE(rep.passed());
    bool flagged = false;
    for (const auto& c : rep.checks)
        flagged |= c.name == "declared-genus" && !c.passed;
    EXPECT_TRUE(flagged);
}

TEST(Compatibility, DroppedMeasureFailsVolume)
{
    auto m = make_torus(24, 16);
    auto r = extract_reeb(m);
    auto edges = r.graph.edges();
    auto dom = r.graph.domain(1);
    // the edge keeps a sliver of its mass so the graph stays valid
    edges[1].measure = EdgeMeasure::uniform(Scalar(1e-6 / (dom.hi - dom.lo).to_double()));
    MeasuredReebGraph dropped(r.graph.vertices(), edges, r.graph.surface());
    auto rep = compatibility_check(dropped, m);
    for (const auto& c : rep.checks)
        EXPECT_EQ(c.passed, c.name != "volume") << c.name << ": " << c.detail;
}

TEST(Property, AreaConserved)
{
    std::vector<Mesh> meshes{make_sphere(3, 0.1), make_torus(30, 20, 2.0, 1.0, 0.05), make_bump_disk(12, 36),
                             make_double_plate(24, 8)};
    for (const auto& m : meshes) {
        auto r = extract_reeb(m);
        EXPECT_NEAR(total_mass(r.graph), m.area(), 1e-9 * m.area());
    }
}

TEST(Property, RefinementKeepsTopology)
{
    std::vector<std::pair<Mesh, Mesh>> pairs;
    pairs.push_back({make_sphere(2, 0.1), make_sphere(3, 0.1)});
    pairs.push_back({make_torus(20, 14), make_torus(40, 28)});
    pairs.push_back({make_bump_disk(12, 36), make_bump_disk(24, 72)});
    pairs.push_back({make_double_plate(24, 8), make_double_plate(48, 16)});
    for (const auto& [coarse, fine] : pairs) {
        auto a = census(extract_reeb(coarse).graph), b = census(extract_reeb(fine).graph);
        EXPECT_EQ(a, b);
    }
    auto plate = census(extract_reeb(make_double_plate(24, 8)).graph);
    EXPECT_EQ(plate.b1, 2);
    EXPECT_EQ(plate.saddles, 4);
}

TEST(Property, CycleRankFromEulerCharacteristic)
{
    std::vector<Mesh> meshes{make_sphere(2), make_torus(16, 12), make_double_plate(24, 8), make_torus(24, 18, 2.0, 0.7, 0.3)};
    for (const auto& m : meshes) {
        auto r = extract_reeb(m);
        EXPECT_EQ(2 * homology_dimensions(r.graph).b1, 2 - m.euler_characteristic());
    }
}

TEST(Property, LogRatiosApproachTwoToMinusOne)
{
    // trunk : branch : branch -> 2 : -1 : -1, compared as branch / trunk
    double prev = 1e9;
    for (int n : {40, 80}) {
        auto r = extract_reeb(make_torus(n, n));
        auto fits = saddle_log_fits(r);
        ASSERT_EQ(fits.size(), 2u);
        double worst = 0;
        for (const auto& f : fits)
            for (int b = 1; b < 3; ++b)
                worst = std::max(worst, std::fabs(f.kappa[b] / f.kappa[0] + 0.5) / 0.5);
        EXPECT_LT(worst, prev + 0.02) << "n = " << n;
        prev = worst;
    }
    EXPECT_LT(prev, 0.2);
}

TEST(Pushforward, ExactFormHasZeroCirculation)
{
    auto m = make_torus(24, 16);
    auto r = extract_reeb(m);
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<double> pot(m.vertex_count());
    for (auto& p : pot)
        p = d(rng);
    auto pf = pushforward_circulation(m, exact_one_form(m, pot), r);
    for (const auto& e : pf.edges) {
        for (double v : e.values)
            EXPECT_NEAR(v, 0.0, 1e-12);
        EXPECT_NEAR(e.curl, 0.0, 1e-12);
    }
    EXPECT_LT(pf.kirchhoff_residual, 1e-12);
}

TEST(Pushforward, TubeAngleOnDoubleEdge)
{
    auto m = make_torus(40, 30);
    auto r = extract_reeb(m);
    const auto& xyz = m.positions();
    auto form = one_form_from(m, [&](std::size_t u, std::size_t v) {
        return std::remainder(tube_angle(xyz[v]) - tube_angle(xyz[u]), 2 * pi);
    });
    auto pf = pushforward_circulation(m, form, r);
    const auto& g = r.graph;
    std::vector<double> loop_values;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        bool between_saddles = g.vertex(g.tail(e)).role == VertexRole::Saddle
                               && g.vertex(g.head(e)).role == VertexRole::Saddle;
        for (double v : pf.edges[e].values) {
            if (between_saddles)
                EXPECT_NEAR(std::fabs(v), 2 * pi, 1e-9) << g.edge(e).id;
            else
                EXPECT_NEAR(v, 0.0, 1e-9) << g.edge(e).id;
        }
        if (between_saddles)
            loop_values.push_back(pf.edges[e].values.front());
    }
    ASSERT_EQ(loop_values.size(), 2u);
    // the two tubes carry opposite circulations, summing to the trunk's zero
    EXPECT_NEAR(loop_values[0] + loop_values[1], 0.0, 1e-9);
    EXPECT_LT(pf.kirchhoff_residual, 1e-9);
}

TEST(Pushforward, NonClosedFormObeysStokes)
{
    auto m = make_torus(40, 30);
    auto r = extract_reeb(m);
    const auto& xyz = m.positions();
    // y dz integrated exactly along each straight mesh edge
    auto form = one_form_from(m, [&](std::size_t u, std::size_t v) {
        return 0.5 * (xyz[u][1] + xyz[v][1]) * (xyz[v][2] - xyz[u][2]);
    });
    auto pf = pushforward_circulation(m, form, r);
    EXPECT_LT(pf.kirchhoff_residual, 1e-9 * std::max(1.0, pf.scale));
    bool varies = false;
    for (const auto& e : pf.edges) {
        // level value plus curl above it is the same head limit at every level
        for (double h : e.head_estimates)
            EXPECT_NEAR(h, e.head_limit, 1e-9 * std::max(1.0, pf.scale)) << e.edge;
        EXPECT_NEAR(e.head_limit - e.tail_limit, e.curl, 1e-12);
        auto [lo, hi] = std::minmax_element(e.values.begin(), e.values.end());
        varies |= *hi - *lo > 1e-3;
    }
    EXPECT_TRUE(varies);
}
