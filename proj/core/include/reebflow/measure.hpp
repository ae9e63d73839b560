#pragma once

#include "reebflow/polynomial.hpp"
#include "reebflow/scalar.hpp"

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace reebflow {

struct Interval {
    Scalar lo;
    Scalar hi;
};

enum class AnchorSide { Tail, Head };

// Contributes coef * ln|f - anchor| to the density. `at` pins the anchor to an
// explicit height; it is set when an edge is subdivided so the singular point
// survives restriction to a sub-edge that no longer ends at the saddle.
struct LogTerm {
    AnchorSide side = AnchorSide::Tail;
    double coef = 0.0;
    std::optional<Scalar> at;
};

// Extra polynomial density supported on [lo, hi] only.
struct PolyPatch {
    Scalar lo;
    Scalar hi;
    ScalarPoly poly;
};

// Piecewise-linear cumulative measure sampled at increasing heights.
struct CumulativeTable {
    std::vector<double> f;
    std::vector<double> cumulative;
};

class EdgeMeasure {
public:
    enum class Kind { PolyLog, Table };

    EdgeMeasure() : poly_(ScalarPoly::constant(Scalar(1))), real_poly_(RealPoly::constant(1.0)) {}

    static EdgeMeasure poly_log(ScalarPoly poly, std::vector<LogTerm> logs = {},
                                std::vector<PolyPatch> patches = {});
    static EdgeMeasure table(CumulativeTable t);
    static EdgeMeasure uniform(Scalar density = Scalar(1))
    {
        return poly_log(ScalarPoly::constant(std::move(density)));
    }

    Kind kind() const { return kind_; }
    const ScalarPoly& poly() const { return poly_; }
    const std::vector<LogTerm>& logs() const { return logs_; }
    const std::vector<PolyPatch>& patches() const { return patches_; }
    const CumulativeTable& table_data() const { return table_; }

    // True when every moment over a rational interval is a rational number.
    bool is_exact() const;

    double density(const Interval& dom, double f) const;

    // m_i over [a, b] (a sub-interval of dom). Exact when is_exact() and the
    // bounds are exact; closed form (double) with log terms or tables.
    Scalar moment(const Interval& dom, unsigned i, const Scalar& a, const Scalar& b) const;
    Scalar moment(const Interval& dom, unsigned i) const { return moment(dom, i, dom.lo, dom.hi); }

    // The same quantity by adaptive Gauss-Kronrod; throws QuadratureError if the
    // error estimate stays above `tol`.
    double quadrature_moment(const Interval& dom, unsigned i, double a, double b, double tol = 1e-12) const;

    EdgeMeasure restricted(const Interval& dom, const Interval& sub) const;

    // A height in the open domain where the density is not positive, if any.
    std::optional<double> find_nonpositive(const Interval& dom, int samples = 1000) const;

    friend bool operator==(const EdgeMeasure& a, const EdgeMeasure& b);

private:
    Kind kind_ = Kind::PolyLog;
    ScalarPoly poly_;
    std::vector<LogTerm> logs_;
    std::vector<PolyPatch> patches_;
    CumulativeTable table_;

    // double copies for density(); patches are re-centred at their midpoint
    // because narrow bumps cancel badly in the monomial basis
    struct RealPatch {
        double lo, hi, mid;
        RealPoly poly;  // in f - mid
    };
    RealPoly real_poly_;
    std::vector<RealPatch> real_patches_;
};

Scalar log_anchor(const LogTerm& t, const Interval& dom);

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

// Adaptive Gauss-Kronrod with depth cap 60 and at most 200000 cells.
double integrate_adaptive(const std::function<double(double)>& fn, double a, double b, double tol = 1e-12);

// ∫_a^b f^i ln|f - c| df in closed form.
double log_moment(unsigned i, double c, double a, double b);

// Samples of μ([v,x]) against the signed height f(x) - f(v) on one incident
// edge of a saddle v.
struct LogFitSamples {
    std::vector<double> f;
    std::vector<double> mu;
};

struct LogFit {
    std::array<double, 3> kappa{};         // trunk, branch, branch
    std::array<double, 3> residual_rms{};
    std::array<double, 3> kappa_stderr{};
};

// Least-squares fit of μ ≈ κ f ln|f| + a1 f + a2 f² + a3 f³ per edge.
LogFit fit_log_coefficients(const std::array<LogFitSamples, 3>& samples);

}  // namespace reebflow
