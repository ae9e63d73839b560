#include "reebflow/steady_triple.hpp"

#include "reebflow/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace reebflow {

const char* to_string(ChartKind k)
{
    switch (k) {
    case ChartKind::Cylinder: return "cylinder";
    case ChartKind::Elliptic: return "elliptic";
    case ChartKind::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

ChartKind parse_chart(const std::string& s)
{
    if (s == "cylinder")
        return ChartKind::Cylinder;
    if (s == "elliptic")
        return ChartKind::Elliptic;
    if (s == "hyperbolic")
        return ChartKind::Hyperbolic;
    throw std::invalid_argument("unknown chart '" + s + "' (cylinder, elliptic, hyperbolic)");
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ½ Σ c_j S^j / (j+1), i.e. (1/2S)∫₀^S ζ without the 0/0 at S = 0.
RealPoly half_mean(const RealPoly& zeta)
{
    std::vector<double> c;
    for (std::size_t j = 0; j < zeta.coeffs().size(); ++j)
        c.push_back(0.5 * zeta.coeffs()[j] / static_cast<double>(j + 1));
    return RealPoly(std::move(c));
}

}  // namespace

SteadyTriple SteadyTriple::cylinder(const ScalarPoly& zeta, double c, double s_min, double s_max)
{
    if (!(s_min <= 0.0 && 0.0 <= s_max && s_min < s_max))
        throw std::invalid_argument("cylinder chart must satisfy s_min <= 0 <= s_max");
    SteadyTriple t;
    t.kind_ = ChartKind::Cylinder;
    t.zeta_ = to_real(zeta);
    t.c_ = c;
    t.eta_ = t.zeta_.integral() + RealPoly::constant(c / kTwoPi);
    t.H_poly_ = t.eta_.integral() * -1.0;
    t.s_min_ = s_min;
    t.s_max_ = s_max;
    return t;
}

SteadyTriple SteadyTriple::elliptic(const ScalarPoly& zeta, double s_max)
{
    if (!(s_max > 0.0))
        throw std::invalid_argument("elliptic chart needs s_max > 0");
    SteadyTriple t;
    t.kind_ = ChartKind::Elliptic;
    t.zeta_ = to_real(zeta);
    t.eta_ = half_mean(t.zeta_);
    t.H_poly_ = t.eta_.integral() * -1.0;
    t.s_min_ = 0.0;
    t.s_max_ = s_max;
    t.radius_ = std::sqrt(2.0 * s_max);
    return t;
}

SteadyTriple SteadyTriple::hyperbolic(const ScalarPoly& zeta, int eps, double c, double radius)
{
    if (eps != 1 && eps != -1)
        throw std::invalid_argument("eps must be +1 or -1");
    if (c == 0.0 || (c > 0) != (eps > 0))
        throw std::invalid_argument("hyperbolic triple needs sgn c = eps");
    SteadyTriple t;
    t.kind_ = ChartKind::Hyperbolic;
    t.zeta_ = to_real(zeta);
    double slope = t.zeta_.coeff(1);
    if (slope == 0.0)
        throw std::invalid_argument("degenerate hyperbolic point: zeta'(0) = 0");
    if (slope < 0.0) {
        t.zeta_ = t.zeta_.scaled(-1.0);
        t.rotated_ = true;
    }
    t.eta_ = half_mean(t.zeta_) * -1.0;
    t.c_ = c;
    t.eps_ = eps;
    if (std::fabs(c) <= std::fabs(t.eta_(0.0)))
        throw std::domain_error("circulation too small for chart: |c| <= |eta(0)|");
    double r = radius;
    for (;;) {
        double smax = r * r, m = 0.0;
        for (int k = 0; k <= 2000; ++k)
            m = std::max(m, std::fabs(t.eta_(-smax + 2.0 * smax * k / 2000.0)));
        // margin covers the finite-difference stencil just outside the chart
        double sm = (r + 1e-3) * (r + 1e-3);
        m = std::max({m, std::fabs(t.eta_(sm)), std::fabs(t.eta_(-sm))});
        if (std::fabs(c) > m * (1.0 + 1e-9))
            break;
        r *= 0.5;
        if (r < 1e-3)
            throw std::domain_error("circulation too small for chart");
    }
    t.radius_ = r;
    t.s_min_ = -r * r;
    t.s_max_ = r * r;
    return t;
}

SteadyTriple SteadyTriple::corrupted(const RealPoly& q) const
{
    SteadyTriple t = *this;
    t.corruption_ = t.corruption_ + q;
    return t;
}

std::array<double, 4> SteadyTriple::box() const
{
    switch (kind_) {
    case ChartKind::Cylinder: return {s_min_, s_max_, 0.0, kTwoPi};
    case ChartKind::Elliptic:
    case ChartKind::Hyperbolic: return {-radius_, radius_, -radius_, radius_};
    }
    return {};
}

bool SteadyTriple::in_chart(const Vec2& x) const
{
    auto b = box();
    if (x[0] < b[0] || x[0] > b[1] || x[1] < b[2] || x[1] > b[3])
        return false;
    return kind_ != ChartKind::Elliptic || S(x) <= s_max_;
}

double SteadyTriple::S(const Vec2& x) const
{
    switch (kind_) {
    case ChartKind::Cylinder: return x[0];
    case ChartKind::Elliptic: return 0.5 * (x[0] * x[0] + x[1] * x[1]);
    case ChartKind::Hyperbolic: return x[0] * x[1];
    }
    return 0.0;
}

Vec2 SteadyTriple::grad_S(const Vec2& x) const
{
    switch (kind_) {
    case ChartKind::Cylinder: return {1.0, 0.0};
    case ChartKind::Elliptic: return {x[0], x[1]};
    case ChartKind::Hyperbolic: return {x[1], x[0]};
    }
    return {};
}

Vec2 SteadyTriple::grad_F(const Vec2& x) const
{
    double d = zeta_.derivative()(S(x));
    auto g = grad_S(x);
    return {d * g[0], d * g[1]};
}

Vec2 SteadyTriple::alpha(const Vec2& x) const
{
    const double s = S(x), e = eta_(s);
    Vec2 a{};
    switch (kind_) {
    case ChartKind::Cylinder: a = {0.0, e}; break;
    case ChartKind::Elliptic: a = {-e * x[1], e * x[0]}; break;
    case ChartKind::Hyperbolic: a = {e * x[1] + c_ * x[0], -(e * x[0] + c_ * x[1])}; break;
    }
    if (!corruption_.is_zero()) {
        double q = corruption_(s);
        auto g = grad_S(x);
        a[0] += q * g[0];
        a[1] += q * g[1];
    }
    return a;
}

double SteadyTriple::dalpha(const Vec2& x) const
{
    const double s = S(x), e = eta_(s), de = eta_.derivative()(s);
    double d = 0.0;
    switch (kind_) {
    case ChartKind::Cylinder: d = de; break;
    case ChartKind::Elliptic: d = 2.0 * e + 2.0 * s * de; break;
    case ChartKind::Hyperbolic: d = -2.0 * (e + s * de); break;
    }
    if (!corruption_.is_zero()) {
        // ∂1(q S_2) - ∂2(q S_1) with the Hessian of S
        double q = corruption_(s), dq = corruption_.derivative()(s);
        auto g = grad_S(x);
        double s12 = kind_ == ChartKind::Hyperbolic ? 1.0 : 0.0;
        d += (dq * g[0] * g[1] + q * s12) - (dq * g[1] * g[0] + q * s12);
    }
    return d;
}

Mat2 SteadyTriple::J(const Vec2& x) const
{
    if (kind_ != ChartKind::Hyperbolic)
        return Mat2{{{0.0, -1.0}, {1.0, 0.0}}};
    const double e = eta_(S(x));
    const double k = eps_ / std::sqrt(c_ * c_ - e * e);
    return Mat2{{{k * e, -k * c_}, {k * c_, -k * e}}};
}

double SteadyTriple::H_of_S(double s) const
{
    if (kind_ != ChartKind::Hyperbolic)
        return H_poly_(s);
    auto integrand = [this](double u) {
        double e = eta_(u);
        return std::sqrt(c_ * c_ - e * e);
    };
    return eps_ * boost::math::quadrature::gauss<double, 30>::integrate(integrand, 0.0, s);
}

double SteadyTriple::dH_dS(double s) const
{
    if (kind_ != ChartKind::Hyperbolic)
        return H_poly_.derivative()(s);
    double e = eta_(s);
    return eps_ * std::sqrt(c_ * c_ - e * e);
}

double SteadyTriple::H(const Vec2& x) const
{
    return H_of_S(S(x));
}

Vec2 SteadyTriple::dH(const Vec2& x) const
{
    double d = dH_dS(S(x));
    auto g = grad_S(x);
    return {d * g[0], d * g[1]};
}

std::vector<SteadyTriple::Level> SteadyTriple::level(double s, int n) const
{
    std::vector<Level> out;
    const double dz = zeta_.derivative()(s);
    auto orient = [&](Level& l) {
        // tangent of the boundary of {F < F(s)}: ∇F rotated by +90°
        std::size_t m = l.points.size() / 2;
        const Vec2& a = l.points[m];
        const Vec2& b = l.points[m + 1];
        Vec2 mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
        Vec2 g = grad_F(mid);
        if ((b[0] - a[0]) * -g[1] + (b[1] - a[1]) * g[0] < 0.0)
            std::reverse(l.points.begin(), l.points.end());
    };
    switch (kind_) {
    case ChartKind::Cylinder: {
        Level l;
        for (int k = 0; k <= n; ++k)
            l.points.push_back({s, kTwoPi * k / n});
        if (dz < 0.0)
            std::reverse(l.points.begin(), l.points.end());
        out.push_back(std::move(l));
        break;
    }
    case ChartKind::Elliptic: {
        if (!(s > 0.0))
            break;
        double r = std::sqrt(2.0 * s);
        Level l;
        for (int k = 0; k <= n; ++k) {
            double th = kTwoPi * (k % n) / n;
            l.points.push_back({r * std::cos(th), r * std::sin(th)});
        }
        orient(l);
        out.push_back(std::move(l));
        break;
    }
    case ChartKind::Hyperbolic: {
        double r = radius_;
        if (s == 0.0 || std::fabs(s) >= r * r)
            break;
        double lo = std::log(std::fabs(s) / r), hi = std::log(r);
        for (double sign : {1.0, -1.0}) {
            Level l;
            l.closed = false;
            for (int k = 0; k <= n; ++k) {
                double p = sign * std::exp(lo + (hi - lo) * k / n);
                l.points.push_back({p, s / p});
            }
            orient(l);
            out.push_back(std::move(l));
        }
        break;
    }
    }
    return out;
}

static double segment_circulation(const SteadyTriple& t, const Vec2& u, const Vec2& v)
{
    Vec2 a = t.alpha({0.5 * (u[0] + v[0]), 0.5 * (u[1] + v[1])});
    return a[0] * (v[0] - u[0]) + a[1] * (v[1] - u[1]);
}

VerificationReport verify_triple(const SteadyTriple& t, const VerifyOptions& opt)
{
    VerificationReport rep;
    rep.kind = t.kind();
    rep.grid = opt.grid;
    rep.h = opt.h;
    rep.tol_analytic = opt.tol_analytic;
    rep.tol_fd = opt.tol_fd;
    rep.metric_min_eigenvalue = std::numeric_limits<double>::infinity();

    const auto b = t.box();
    const int n = opt.grid;
    const double h = opt.h;
    std::mutex mu;
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        VerificationReport local;
        local.metric_min_eigenvalue = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            Vec2 x{b[0] + (b[1] - b[0]) * (i + 0.5) / n, b[2] + (b[3] - b[2]) * (j + 0.5) / n};
            if (!t.in_chart(x))
                continue;
            ++local.points;
            const double F = t.F(x);
            const Vec2 a = t.alpha(x);

            local.dalpha.analytic = std::max(local.dalpha.analytic, std::fabs(t.dalpha(x) - F));
            double dB = (t.alpha({x[0] + h, x[1]})[1] - t.alpha({x[0] - h, x[1]})[1]) / (2 * h);
            double dA = (t.alpha({x[0], x[1] + h})[0] - t.alpha({x[0], x[1] - h})[0]) / (2 * h);
            local.dalpha.finite_difference = std::max(local.dalpha.finite_difference, std::fabs(dB - dA - F));

            const Mat2 J = t.J(x);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) {
                    double v = J[r][0] * J[0][c] + J[r][1] * J[1][c] + (r == c ? 1.0 : 0.0);
                    local.j_squared = std::max(local.j_squared, std::fabs(v));
                }
            // G = ΩJ with Ω = [[0, 1], [-1, 0]]
            double g00 = J[1][0], g01 = J[1][1], g10 = -J[0][0], g11 = -J[0][1];
            local.metric_asymmetry = std::max(local.metric_asymmetry, std::fabs(g01 - g10));
            double off = 0.5 * (g01 + g10), mean = 0.5 * (g00 + g11), half = 0.5 * (g00 - g11);
            local.metric_min_eigenvalue =
                std::min(local.metric_min_eigenvalue, mean - std::sqrt(half * half + off * off));

            Vec2 pull{a[0] * J[0][0] + a[1] * J[1][0], a[0] * J[0][1] + a[1] * J[1][1]};
            Vec2 dH = t.dH(x);
            local.pullback.analytic =
                std::max({local.pullback.analytic, std::fabs(pull[0] + dH[0]), std::fabs(pull[1] + dH[1])});
            double h1 = (t.H({x[0] + h, x[1]}) - t.H({x[0] - h, x[1]})) / (2 * h);
            double h2 = (t.H({x[0], x[1] + h}) - t.H({x[0], x[1] - h})) / (2 * h);
            local.pullback.finite_difference =
                std::max({local.pullback.finite_difference, std::fabs(pull[0] + h1), std::fabs(pull[1] + h2)});
        }
        std::lock_guard<std::mutex> lock(mu);
        rep.points += local.points;
        rep.dalpha.analytic = std::max(rep.dalpha.analytic, local.dalpha.analytic);
        rep.dalpha.finite_difference = std::max(rep.dalpha.finite_difference, local.dalpha.finite_difference);
        rep.j_squared = std::max(rep.j_squared, local.j_squared);
        rep.metric_asymmetry = std::max(rep.metric_asymmetry, local.metric_asymmetry);
        rep.metric_min_eigenvalue = std::min(rep.metric_min_eigenvalue, local.metric_min_eigenvalue);
        rep.pullback.analytic = std::max(rep.pullback.analytic, local.pullback.analytic);
        rep.pullback.finite_difference = std::max(rep.pullback.finite_difference, local.pullback.finite_difference);
    });

    // sign(dH/dF) = -sign(circulation) on regular levels
    const double lo = t.kind() == ChartKind::Elliptic ? 0.0 : t.s_min();
    const double hi = t.s_max();
    for (int k = 0; k < opt.levels; ++k) {
        double s = lo + (hi - lo) * (k + 0.5) / opt.levels;
        double dz = t.zeta().derivative()(s);
        auto levels = t.level(s);
        if (std::fabs(dz) < 1e-8 || levels.empty()) {
            ++rep.levels_skipped;
            continue;
        }
        // midpoint sums at full and half resolution; their difference is
        // about 3x the O(n^-2) error of the full sum
        double full = 0.0, half = 0.0;
        for (const auto& l : levels) {
            std::size_t n = l.points.size();
            for (std::size_t p = 0; p + 1 < n; ++p)
                full += segment_circulation(t, l.points[p], l.points[p + 1]);
            for (std::size_t p = 0; p + 1 < n; p += 2)
                half += segment_circulation(t, l.points[p], l.points[std::min(p + 2, n - 1)]);
        }
        double circ = (4.0 * full - half) / 3.0;
        double resolution = std::fabs(full - half) / 3.0 + 1e-12;
        double dHdF = t.dH_dS(s) / dz;
        bool flat = std::fabs(dHdF) < 1e-9;
        bool zero_circ = std::fabs(circ) <= resolution;
        if (!flat && zero_circ) {
            // sign of the circulation below quadrature resolution
            ++rep.levels_skipped;
            continue;
        }
        ++rep.levels_checked;
        bool agree = flat ? zero_circ : dHdF * circ < 0.0;
        if (!agree) {
            ++rep.sign_rule_failures;
            if (!rep.first_failing_level)
                rep.first_failing_level = s;
        }
    }
    return rep;
}

}  // namespace reebflow
