#include "reebflow/casimirs.hpp"
#include "reebflow/generators.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace reebflow;
using namespace reebflow::testing;

namespace {

const Scalar bump_a(-1), bump_b(2);

// (f - a)²(b - f)² / 10 on the split graph's branch interval [-1, 2]
ScalarPoly bump()
{
    ScalarPoly l({Scalar(1), Scalar(1)});   // f + 1
    ScalarPoly r({Scalar(2), Scalar(-1)});  // 2 - f
    return l * l * r * r * q(1, 10);
}

CirculationFunction forced(const MeasuredReebGraph& g)
{
    return space_of(g).particular_function();
}

}  // namespace

TEST(MomentTable, UniformSegment)
{
    auto t = moment_table(segment(), 5);
    ASSERT_EQ(t.rows.size(), 1u);
    for (unsigned i = 0; i <= 5; ++i)
        EXPECT_EQ(t.rows[0][i], q(1, i + 1));
    EXPECT_EQ(t.total, t.rows[0]);
}

TEST(MomentTable, TorusFirstMomentsAreWeights)
{
    std::vector<Scalar> a{-3, -1, 2, 2};
    auto g = gen::torus_graph(a);
    auto t = moment_table(g, 3);
    EXPECT_EQ(t.edges, (std::vector<std::string>{"e1", "e2", "e3", "e4"}));
    for (std::size_t e = 0; e < 4; ++e) {
        EXPECT_EQ(t.rows[e][1], a[e]);
        EXPECT_TRUE(Scalar(0) < t.rows[e][0]);
    }
    EXPECT_EQ(t.total[1], Scalar(0));
}

TEST(MomentTable, CsvHasHeaderAndTotal)
{
    auto csv = moment_table_csv(moment_table(segment(), 2));
    EXPECT_EQ(csv, "edge,m0,m1,m2\ne1,1,1/2,1/3\ntotal,1,1/2,1/3\n");
}

TEST(MomentTable, ColumnSumsMatchQuadrature)
{
    // random_graph's narrow edges carry monomial coefficients near 1e9, too
    // ill-conditioned for a 1e-12 quadrature; realize_weight densities are not
    gen::Rng rng(51);
    std::vector<MeasuredReebGraph> graphs{gen::torus_graph({-3, -1, 2, 2}), gen::pretzel_graph(),
                                          gen::split_graph(), gen::positive_disk_graph()};
    for (int k = 0; k < 10; ++k)
        graphs.push_back(gen::random_totally_negative(rng, 1 + k % 3, 2).graph);
    for (const auto& g : graphs) {
        auto t = moment_table(g, 6);
        for (unsigned i = 0; i <= 6; ++i) {
            double direct = 0, scale = 0;
            for (std::size_t e = 0; e < g.edge_count(); ++e) {
                auto dom = g.domain(e);
                double mag = 1 + std::fabs(t.rows[e][i].to_double());
                direct += g.edge(e).measure.quadrature_moment(dom, i, dom.lo.to_double(), dom.hi.to_double(),
                                                             1e-13 * mag);
                scale += mag;
            }
            double tol = 1e-12 * scale;
            EXPECT_NEAR(t.total[i].to_double(), direct, tol) << "order " << i;
        }
    }
}

TEST(MoveDensity, TotalsKeptBranchesShifted)
{
    auto g = gen::split_graph();
    auto moved = move_density_between_branches(g, "s", bump(), bump_a, bump_b, 0);
    auto before = moment_table(g, 10), after = moment_table(moved, 10);
    EXPECT_EQ(before.total, after.total);

    // ∫ f · bump over [-1, 2] = 81/200, computed by hand with u = f - 1/2
    const Scalar shift = q(81, 200);
    EXPECT_EQ(EdgeMeasure::poly_log(bump()).moment(Interval{bump_a, bump_b}, 1), shift);
    auto tb = trunk_and_branches(g, "s");
    std::size_t recv = tb.branches[0], give = tb.branches[1];
    EXPECT_EQ(after.rows[recv][1] - before.rows[recv][1], shift);
    EXPECT_EQ(after.rows[give][1] - before.rows[give][1], Scalar(0) - shift);
    EXPECT_EQ(after.rows[tb.trunk], before.rows[tb.trunk]);

    // a positive bump moves mass, so the branch masses already differ
    auto cmp = orbit_equivalent(forced(g), forced(moved));
    EXPECT_FALSE(cmp.equivalent);
    EXPECT_EQ(cmp.invariant, "edge_moment");
    ASSERT_TRUE(cmp.order);
    EXPECT_EQ(*cmp.order, 0u);
    EXPECT_TRUE(cmp.subject == g.edge(recv).id || cmp.subject == g.edge(give).id) << cmp.subject;
}

TEST(MoveDensity, MassNeutralBumpSeparatesAtFirstMoment)
{
    // bump · (f - 1/2) is odd about the midpoint: zero mass, first moment
    // ∫ u² bump du = 729/2800
    auto g = gen::split_graph();
    auto odd = bump() * ScalarPoly({q(-1, 2), Scalar(1)});
    EXPECT_EQ(EdgeMeasure::poly_log(odd).moment(Interval{bump_a, bump_b}, 0), Scalar(0));
    EXPECT_EQ(EdgeMeasure::poly_log(odd).moment(Interval{bump_a, bump_b}, 1), q(729, 2800));
    auto moved = move_density_between_branches(g, "s", odd, bump_a, bump_b, 1);
    EXPECT_EQ(moment_table(moved, 10).total, moment_table(g, 10).total);
    auto cmp = orbit_equivalent(forced(g), forced(moved));
    EXPECT_FALSE(cmp.equivalent);
    EXPECT_EQ(cmp.invariant, "edge_moment");
    ASSERT_TRUE(cmp.order);
    EXPECT_EQ(*cmp.order, 1u);
}

TEST(MoveDensity, ZeroBumpIsIdentity)
{
    auto g = gen::split_graph();
    auto same = move_density_between_branches(g, "s", ScalarPoly(), bump_a, bump_b);
    EXPECT_EQ(moment_table(same, 10).rows, moment_table(g, 10).rows);
    EXPECT_TRUE(orbit_equivalent(forced(g), forced(same)).equivalent);
}

TEST(MoveDensity, PositivityIsEnforced)
{
    auto g = gen::split_graph();
    // peak 81/16 · 2 exceeds the branch density 4/3
    EXPECT_THROW(move_density_between_branches(g, "s", bump() * Scalar(20), bump_a, bump_b), std::invalid_argument);
    // the trunk lives below the saddle, so [-2, 0] is not spanned by the branches
    EXPECT_THROW(move_density_between_branches(g, "s", bump(), Scalar(-2), Scalar(0)), std::invalid_argument);
}

TEST(Orbit, RelabeledIsEquivalent)
{
    for (const auto& g : {gen::torus_graph({-3, -1, 2, 2}), gen::pretzel_graph(), gen::split_graph()}) {
        auto sp = space_of(g);
        std::vector<Scalar> t(sp.dim(), q(-1, 2));
        auto c = sp.point(t);
        auto h = relabeled(g, "x");
        auto c2 = CirculationFunction(h, [&] {
            // relabeling reverses the edge order
            std::vector<Scalar> rev(c.head_limits().rbegin(), c.head_limits().rend());
            return rev;
        }());
        auto cmp = orbit_equivalent(c, c2);
        ASSERT_TRUE(cmp.equivalent) << cmp.invariant << " " << cmp.detail;
        // symmetric branches admit several maps; any returned one must carry
        // heights, moments and limits across
        auto m1 = moment_table(g, 10), m2 = moment_table(h, 10);
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            std::size_t f = cmp.edge_map[e];
            EXPECT_EQ(m1.rows[e], m2.rows[f]);
            EXPECT_EQ(c.head_limit(e), c2.head_limit(f));
            EXPECT_EQ(cmp.vertex_map[g.tail(e)], h.tail(f));
            EXPECT_EQ(cmp.vertex_map[g.head(e)], h.head(f));
        }

        auto b1 = invariant_bundle(c, 6), b2 = invariant_bundle(c2, 6);
        EXPECT_EQ(b1.signature, b2.signature);
        EXPECT_EQ(b1.moments.total, b2.moments.total);
        EXPECT_EQ(b1.head_limits, b2.head_limits);
    }
}

TEST(Orbit, CirculationSeparates)
{
    auto sp = space_of(gen::torus_graph({-3, -1, 2, 2}));
    auto cmp = orbit_equivalent(sp.point({q(-3, 10)}), sp.point({q(-1, 2)}));
    EXPECT_FALSE(cmp.equivalent);
    EXPECT_EQ(cmp.invariant, "circulation");
}

TEST(Property, EquivalenceRelationOnCorpus)
{
    std::vector<CirculationFunction> corpus;
    auto add = [&](const MeasuredReebGraph& g, const std::vector<Scalar>& t) {
        auto c = space_of(g).point(t);
        corpus.push_back(c);
        std::vector<Scalar> rev(c.head_limits().rbegin(), c.head_limits().rend());
        corpus.push_back(CirculationFunction(relabeled(g, "r"), rev));
    };
    add(gen::torus_graph({-3, -1, 2, 2}), {q(-1, 2)});
    add(gen::torus_graph({-3, -1, 2, 2}), {q(-3, 10)});
    add(gen::torus_graph({-3, -2, 2, 3}), {q(-1, 2)});
    add(gen::split_graph(), {});
    add(move_density_between_branches(gen::split_graph(), "s", bump(), bump_a, bump_b), {});
    add(gen::positive_disk_graph(), {});
    gen::Rng rng(52);
    for (int k = 0; k < 4; ++k) {
        auto g = gen::random_graph(rng, {gen::Family::Tree, 0, 0, 2});
        add(g, {});
    }
    const std::size_t n = corpus.size();
    std::vector<std::vector<bool>> eq(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            eq[i][j] = orbit_equivalent(corpus[i], corpus[j]).equivalent;
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_TRUE(eq[i][i]);
        // each entry is equivalent to its relabeled twin
        EXPECT_TRUE(eq[i][i ^ 1]);
        for (std::size_t j = 0; j < n; ++j) {
            EXPECT_EQ(eq[i][j], eq[j][i]);
            for (std::size_t k = 0; k < n; ++k)
                if (eq[i][j] && eq[j][k]) {
                    EXPECT_TRUE(eq[i][k]);
                }
        }
    }
    // distinct inputs stay distinct
    EXPECT_FALSE(eq[0][2]);
    EXPECT_FALSE(eq[0][4]);
    EXPECT_FALSE(eq[6][8]);
}

TEST(Property, ForcedCirculationMomentsDecide)
{
    // relative_dim 0: whenever two graphs match on moments, the forced
    // circulations match too, so "circulation" never separates them
    gen::Rng rng(53);
    for (int k = 0; k < 30; ++k) {
        auto g = gen::random_graph(rng, {gen::Family::Tree, 0, 0, 2});
        ASSERT_EQ(homology_dimensions(g).relative_dim, 0);
        auto h = relabeled(g, "y");
        auto cmp = orbit_equivalent(forced(g), forced(h));
        EXPECT_TRUE(cmp.equivalent) << cmp.invariant;

        auto other = gen::random_graph(rng, {gen::Family::Tree, 0, 0, 2});
        auto d = orbit_equivalent(forced(g), forced(other));
        if (!d.equivalent) {
            EXPECT_NE(d.invariant, "circulation");
        }
    }
    auto disk = gen::positive_disk_graph();
    EXPECT_TRUE(orbit_equivalent(forced(disk), forced(relabeled(disk, "z"))).equivalent);
}

TEST(Property, MovedDensityKeepsTotalsAcrossBumps)
{
    auto g = gen::split_graph();
    auto base = moment_table(g, 10);
    for (int k = 1; k <= 5; ++k) {
        auto p = bump() * q(k, 5);
        for (int side = 0; side < 2; ++side) {
            auto moved = move_density_between_branches(g, "s", p, bump_a, bump_b, side);
            auto t = moment_table(moved, 10);
            for (unsigned i = 0; i <= 10; ++i)
                EXPECT_NEAR(t.total[i].to_double(), base.total[i].to_double(),
                            1e-12 * (1 + std::fabs(base.total[i].to_double())));
            // some per-edge moment moved by at least the bump's first moment
            Scalar first = EdgeMeasure::poly_log(p).moment(Interval{bump_a, bump_b}, 1);
            bool moved_enough = false;
            for (std::size_t e = 0; e < g.edge_count(); ++e) {
                Scalar d = t.rows[e][1] - base.rows[e][1];
                moved_enough |= !(abs(d) < first);
            }
            EXPECT_TRUE(moved_enough);
            EXPECT_FALSE(orbit_equivalent(forced(g), forced(moved)).equivalent);
        }
    }
}
