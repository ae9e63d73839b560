#pragma once

#include "reebflow/polynomial.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace reebflow {

enum class ChartKind { Cylinder, Elliptic, Hyperbolic };

const char* to_string(ChartKind k);
ChartKind parse_chart(const std::string& s);

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

// An F-steady triple (α, J, H) with F = ζ(S) on a canonical chart.
//
// Coordinates x = (x1, x2) with ω = dx1 ∧ dx2:
//   cylinder    x = (S, Θ),  S ∈ [s_min, s_max], Θ ∈ [0, 2π)
//   elliptic    x = (P, Q),  S = (P² + Q²)/2 ≤ s_max
//   hyperbolic  x = (P, Q),  S = PQ, |P|, |Q| ≤ radius
//
// α = A dx1 + B dx2, J acts on column vectors, g(u, v) = ω(u, Jv) and
// J*α is the row (A, B)·J.
class SteadyTriple {
public:
    static SteadyTriple cylinder(const ScalarPoly& zeta, double c, double s_min = -1.0, double s_max = 1.0);
    static SteadyTriple elliptic(const ScalarPoly& zeta, double s_max = 1.0);
    // sgn c must equal eps. Requires ζ'(0) ≠ 0; when ζ'(0) < 0 the chart is
    // rotated, (P, Q) -> (Q, -P), which replaces ζ(S) by ζ(-S). The radius is
    // halved until |c| > max |η| on the chart.
    static SteadyTriple hyperbolic(const ScalarPoly& zeta, int eps, double c, double radius = 1.0);

    ChartKind kind() const { return kind_; }
    const RealPoly& zeta() const { return zeta_; }
    double circulation() const { return c_; }
    int eps() const { return eps_; }
    bool rotated() const { return rotated_; }
    double s_min() const { return s_min_; }
    double s_max() const { return s_max_; }
    double radius() const { return radius_; }

    // Adds q(S) dS to α. The perturbation is closed, so dα is unchanged while
    // J*α = -dH breaks; used to exercise the verifier.
    SteadyTriple corrupted(const RealPoly& q) const;

    // Chart box [lo1, hi1] x [lo2, hi2] and membership test.
    std::array<double, 4> box() const;
    bool in_chart(const Vec2& x) const;

    double S(const Vec2& x) const;
    Vec2 grad_S(const Vec2& x) const;
    double F(const Vec2& x) const { return zeta_(S(x)); }
    Vec2 grad_F(const Vec2& x) const;

    // Radial profile of α: η(S) on the cylinder, η(S)/(2S) on the elliptic
    // chart and η(S) on the hyperbolic one.
    double profile(double s) const { return eta_(s); }

    Vec2 alpha(const Vec2& x) const;
    // ∂B/∂x1 - ∂A/∂x2 from closed-form derivatives.
    double dalpha(const Vec2& x) const;
    Mat2 J(const Vec2& x) const;
    double H(const Vec2& x) const;
    double H_of_S(double s) const;
    double dH_dS(double s) const;
    // dH from closed-form derivatives.
    Vec2 dH(const Vec2& x) const;

    // Points on the level S = s, in order along the level, with the level's
    // orientation as the boundary of {F < F(s)}; closed when `closed`.
    struct Level {
        std::vector<Vec2> points;
        bool closed = true;
    };
    std::vector<Level> level(double s, int n = 512) const;

private:
    SteadyTriple() = default;

    ChartKind kind_ = ChartKind::Cylinder;
    RealPoly zeta_;
    RealPoly eta_;
    RealPoly H_poly_;  // H as a polynomial in S (cylinder, elliptic)
    double c_ = 0.0;
    int eps_ = 1;
    bool rotated_ = false;
    double s_min_ = 0.0, s_max_ = 0.0, radius_ = 0.0;
    RealPoly corruption_;
};

struct Residual {
    double analytic = 0.0;
    double finite_difference = 0.0;
};

struct VerificationReport {
    ChartKind kind = ChartKind::Cylinder;
    int grid = 0;
    double h = 1e-4;
    double tol_analytic = 1e-10;
    double tol_fd = 1e-6;
    int points = 0;

    Residual dalpha;     // |dα - Fω|
    double j_squared = 0.0;       // |J² + Id|
    double metric_asymmetry = 0.0;
    double metric_min_eigenvalue = 0.0;
    Residual pullback;   // |J*α + dH|

    int levels_checked = 0;
    int levels_skipped = 0;   // |ζ'| below 1e-8, or ∮α below quadrature resolution
    int sign_rule_failures = 0;
    std::optional<double> first_failing_level;

    bool dalpha_ok() const { return dalpha.analytic < tol_analytic && dalpha.finite_difference < tol_fd; }
    bool j_ok() const { return j_squared < tol_analytic; }
    bool metric_ok() const { return metric_asymmetry < tol_analytic && metric_min_eigenvalue > 0.0; }
    bool pullback_ok() const { return pullback.analytic < tol_analytic && pullback.finite_difference < tol_fd; }
    bool sign_rule_ok() const { return sign_rule_failures == 0; }
    bool passed() const { return dalpha_ok() && j_ok() && metric_ok() && pullback_ok() && sign_rule_ok(); }
};

struct VerifyOptions {
    int grid = 200;
    double h = 1e-4;
    double tol_analytic = 1e-10;
    double tol_fd = 1e-6;
    int levels = 100;
};

VerificationReport verify_triple(const SteadyTriple& t, const VerifyOptions& opt = {});

// α on a cylinder S ∈ [s0, s1] assembled from boundary collar data.
struct CylinderAlpha {
    std::vector<double> s;
    std::vector<double> theta;
    std::vector<std::vector<double>> A;  // A[i][j] at (s[i], theta[j])
    std::vector<std::vector<double>> B;
    double dalpha_residual = 0.0;   // max |∂B/∂S - ∂A/∂Θ - ζ| (spectral in Θ)
    double average_residual = 0.0;  // max |∫B dΘ - η(ζ(S))|
};

using CollarField = std::function<double(double, double)>;

struct CylinderInterpOptions {
    int n_s = 101;
    int n_theta = 64;
    double collar = 0.1;  // collar width as a fraction of the chart
    double tol = 1e-8;    // for the input identities
};

// Blends collar Θ-components B1 (near s0) and B2 (near s1) through the
// reference B0(S) = η(ζ(S))/2π with a quintic smoothstep partition of unity,
// then recovers A from ∂A/∂Θ = ∂B/∂S - ζ(S) with zero Θ-mean.
CylinderAlpha interpolate_on_cylinder(const CollarField& B1, const CollarField& B2, const ScalarPoly& zeta,
                                      const std::function<double(double)>& eta, double s0, double s1,
                                      const CylinderInterpOptions& opt = {});

}  // namespace reebflow
