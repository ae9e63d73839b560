#include "reebflow/generators.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace reebflow;
using namespace reebflow::testing;

namespace {

const Interval unit{Scalar(0), Scalar(1)};

EdgeMeasure minus_log()
{
    return EdgeMeasure::poly_log(ScalarPoly(), {LogTerm{AnchorSide::Tail, -1.0, std::nullopt}});
}

}  // namespace

TEST(Moment, UniformUnitInterval)
{
    auto m = EdgeMeasure::uniform();
    EXPECT_EQ(m.moment(unit, 0), Scalar(1));
    EXPECT_EQ(m.moment(unit, 2), q(1, 3));
    EXPECT_TRUE(m.moment(unit, 2).is_exact());
}

TEST(Moment, LogDensityMatchesQuadrature)
{
    auto m = minus_log();
    EXPECT_FALSE(m.is_exact());
    double closed = m.moment(unit, 1).to_double();
    EXPECT_NEAR(closed, 0.25, 1e-14);
    EXPECT_NEAR(m.quadrature_moment(unit, 1, 0.0, 1.0), 0.25, 1e-12);
}

TEST(Moment, LogMomentClosedForm)
{
    // ∫_0^1 f ln f = -1/4, ∫_{-1}^{2} ln|f| = 2 ln 2 - 3
    EXPECT_NEAR(log_moment(1, 0.0, 0.0, 1.0), -0.25, 1e-14);
    EXPECT_NEAR(log_moment(0, 0.0, -1.0, 2.0), 2 * std::log(2.0) - 3.0, 1e-13);
}

TEST(Weight, TorusWeightsReproduced)
{
    std::vector<Scalar> a{-3, -1, 2, 2};
    auto g = gen::torus_graph(a);
    auto w = edge_weights(g);
    EXPECT_EQ(w, a);
    auto mw = total_mass_and_weight(g);
    EXPECT_EQ(mw.weight, Scalar(0));
    EXPECT_TRUE(Scalar(0) < mw.mass);
}

TEST(Weight, SymmetricDensityHasZeroWeight)
{
    auto g = segment(Scalar(-1), Scalar(1), EdgeMeasure::poly_log(ScalarPoly({Scalar(2), Scalar(0), Scalar(1)})));
    EXPECT_EQ(edge_weight(g, 0), Scalar(0));
}

TEST(Weight, PretzelWeightsSumToZero)
{
    auto g = gen::pretzel_graph();
    std::vector<Scalar> expect{-1, -1, 0, 0, 0, 1, 1};
    EXPECT_EQ(edge_weights(g), expect);
    EXPECT_EQ(total_mass_and_weight(g).weight, Scalar(0));
}

TEST(Weight, ExplicitOverride)
{
    auto g = segment().with_weights({q(3, 10)});
    EXPECT_EQ(total_mass_and_weight(g).weight, q(3, 10));
}

TEST(Measure, TableMoments)
{
    // cumulative f² on [0, 2] sampled finely: density 2f
    CumulativeTable t;
    for (int k = 0; k <= 2000; ++k) {
        double f = 2.0 * k / 2000;
        t.f.push_back(f);
        t.cumulative.push_back(f * f);
    }
    auto m = EdgeMeasure::table(t);
    Interval dom{Scalar(0), Scalar(2)};
    EXPECT_NEAR(m.moment(dom, 0).to_double(), 4.0, 1e-12);
    EXPECT_NEAR(m.moment(dom, 1).to_double(), 16.0 / 3.0, 1e-5);
}

TEST(Measure, RestrictionIsAdditive)
{
    auto m = EdgeMeasure::poly_log(ScalarPoly({Scalar(1), Scalar(2), Scalar(3)}));
    Interval dom{Scalar(-1), Scalar(2)};
    Interval left{Scalar(-1), q(1, 3)}, right{q(1, 3), Scalar(2)};
    for (unsigned i = 0; i <= 6; ++i)
        EXPECT_EQ(m.restricted(dom, left).moment(left, i) + m.restricted(dom, right).moment(right, i),
                  m.moment(dom, i));

    auto lg = EdgeMeasure::poly_log(ScalarPoly({Scalar(3)}), {LogTerm{AnchorSide::Head, 0.5, std::nullopt}});
    for (unsigned i = 0; i <= 6; ++i) {
        double whole = lg.moment(dom, i).to_double();
        double parts = lg.restricted(dom, left).moment(left, i).to_double()
            + lg.restricted(dom, right).moment(right, i).to_double();
        EXPECT_NEAR(parts, whole, 1e-12 * (1 + std::fabs(whole)));
    }
}

TEST(Measure, NonPositiveDensityFound)
{
    auto m = EdgeMeasure::poly_log(ScalarPoly({Scalar(1), Scalar(-2)}));
    auto bad = m.find_nonpositive(unit);
    ASSERT_TRUE(bad);
    EXPECT_GE(*bad, 0.5);
    EXPECT_FALSE(EdgeMeasure::uniform().find_nonpositive(unit));
}

TEST(Measure, QuadratureErrorWhenUnreachable)
{
    auto osc = [](double x) { return std::sin(1.0 / x) / x; };
    EXPECT_THROW(integrate_adaptive(osc, 1e-9, 1.0, 1e-15), QuadratureError);
}

TEST(LogFit, RecoversSyntheticModel)
{
    std::array<LogFitSamples, 3> s;
    const std::array<double, 3> kappa{2.0, -1.0, -1.0};
    for (int i = 0; i < 3; ++i)
        for (int k = 1; k <= 40; ++k) {
            double f = 0.5 * k / 40;
            s[i].f.push_back(f);
            s[i].mu.push_back(kappa[i] * f * std::log(f) + 0.3 * f - 0.1 * f * f);
        }
    auto fit = fit_log_coefficients(s);
    for (int i = 0; i < 3; ++i)
        EXPECT_NEAR(fit.kappa[i], kappa[i], 1e-9);
    EXPECT_NEAR(2 * fit.kappa[1] / fit.kappa[0], -1.0, 1e-9);
}

TEST(LogFit, SmoothMeasureHasNoLogTerm)
{
    std::array<LogFitSamples, 3> s;
    for (int i = 0; i < 3; ++i)
        for (int k = 1; k <= 40; ++k) {
            double f = 0.5 * k / 40;
            s[i].f.push_back(f);
            s[i].mu.push_back((1.0 + i) * f + 0.5 * f * f);
        }
    auto fit = fit_log_coefficients(s);
    for (int i = 0; i < 3; ++i)
        EXPECT_LT(std::fabs(fit.kappa[i]), 1e-9);
}

TEST(Property, MassPositiveAndDensityPositive)
{
    gen::Rng rng(21);
    for (int k = 0; k < 100; ++k) {
        gen::FamilyParams p{static_cast<gen::Family>(k % 3), 1 + k % 3, 1 + k % 2, 2};
        auto g = gen::random_graph(rng, p);
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            auto dom = g.domain(e);
            EXPECT_TRUE(Scalar(0) < g.edge(e).measure.moment(dom, 0));
            EXPECT_FALSE(g.edge(e).measure.find_nonpositive(dom, 1000));
        }
    }
}

TEST(Property, QuadratureAgreesWithClosedForms)
{
    // polynomial x log integrands up to degree 10
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> coef(0.1, 2.0);
    Interval dom{Scalar(-1), Scalar(2)};
    for (int deg = 0; deg <= 10; ++deg) {
        std::vector<Scalar> c;
        for (int k = 0; k <= deg; ++k)
            c.push_back(Scalar(Rational(static_cast<long>(coef(rng) * 64), 64)));
        for (auto side : {AnchorSide::Tail, AnchorSide::Head}) {
            auto m = EdgeMeasure::poly_log(ScalarPoly(c), {LogTerm{side, -0.25, std::nullopt}});
            for (unsigned i = 0; i + deg <= 10; ++i) {
                double closed = m.moment(dom, i).to_double();
                // moments reach ~1e6 here, so the request is relative
                double tol = 1e-12 * (1 + std::fabs(closed));
                double quad = m.quadrature_moment(dom, i, -1.0, 2.0, tol);
                EXPECT_NEAR(quad, closed, 2 * tol) << "deg " << deg << " i " << i;
            }
        }
    }
}

TEST(Generators, RealizeWeightHitsTarget)
{
    std::vector<std::pair<Interval, Scalar>> cases{
        {{Scalar(-2), Scalar(-1)}, Scalar(-3)}, {{Scalar(-1), Scalar(1)}, q(-7, 2)},
        {{Scalar(-1), Scalar(1)}, Scalar(5)},   {{Scalar(-1), Scalar(3)}, Scalar(0)},
        {{Scalar(1), Scalar(2)}, q(1, 100)},
    };
    for (const auto& [dom, w] : cases) {
        auto m = gen::realize_weight(dom.lo, dom.hi, w);
        EXPECT_EQ(m.moment(dom, 1), w);
        EXPECT_FALSE(m.find_nonpositive(dom));
    }
    EXPECT_THROW(gen::realize_weight(Scalar(1), Scalar(2), Scalar(-1)), std::invalid_argument);
}
