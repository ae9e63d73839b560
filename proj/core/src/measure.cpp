#include "reebflow/measure.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reebflow {

EdgeMeasure EdgeMeasure::poly_log(ScalarPoly poly, std::vector<LogTerm> logs, std::vector<PolyPatch> patches)
{
    EdgeMeasure m;
    m.kind_ = Kind::PolyLog;
    m.poly_ = std::move(poly);
    m.logs_ = std::move(logs);
    m.patches_ = std::move(patches);
    m.real_poly_ = to_real(m.poly_);
    for (const auto& p : m.patches_) {
        Scalar mid = (p.lo + p.hi) / Scalar(2);
        m.real_patches_.push_back({p.lo.to_double(), p.hi.to_double(), mid.to_double(), to_real(p.poly.shifted(mid))});
    }
    return m;
}

EdgeMeasure EdgeMeasure::table(CumulativeTable t)
{
    if (t.f.size() < 2 || t.f.size() != t.cumulative.size())
        throw std::invalid_argument("measure table needs matching f/cumulative arrays of length >= 2");
    for (std::size_t k = 1; k < t.f.size(); ++k)
        if (!(t.f[k] > t.f[k - 1]))
            throw std::invalid_argument("measure table heights must increase strictly");
    EdgeMeasure m;
    m.kind_ = Kind::Table;
    m.poly_ = ScalarPoly();
    m.table_ = std::move(t);
    return m;
}

bool EdgeMeasure::is_exact() const
{
    if (kind_ == Kind::Table || !logs_.empty())
        return false;
    if (!reebflow::is_exact(poly_))
        return false;
    for (const auto& p : patches_)
        if (!reebflow::is_exact(p.poly) || !p.lo.is_exact() || !p.hi.is_exact())
            return false;
    return true;
}

Scalar log_anchor(const LogTerm& t, const Interval& dom)
{
    if (t.at)
        return *t.at;
    return t.side == AnchorSide::Tail ? dom.lo : dom.hi;
}

double EdgeMeasure::density(const Interval& dom, double f) const
{
    if (kind_ == Kind::Table) {
        const auto& F = table_.f;
        auto it = std::upper_bound(F.begin(), F.end(), f);
        std::size_t k = it == F.begin() ? 0 : static_cast<std::size_t>(it - F.begin()) - 1;
        k = std::min(k, F.size() - 2);
        return (table_.cumulative[k + 1] - table_.cumulative[k]) / (F[k + 1] - F[k]);
    }
    double d = real_poly_(f);
    for (const auto& t : logs_)
        d += t.coef * std::log(std::fabs(f - log_anchor(t, dom).to_double()));
    for (const auto& p : real_patches_)
        if (f >= p.lo && f <= p.hi)
            d += p.poly(f - p.mid);
    return d;
}

double log_moment(unsigned i, double c, double a, double b)
{
    // integrate by parts with the antiderivative (f^{i+1} - c^{i+1})/(i+1),
    // which vanishes at the singular point
    const double n = i + 1.0;
    auto boundary = [&](double f) {
        double u = f - c;
        if (u == 0.0)
            return 0.0;
        return (std::pow(f, n) - std::pow(c, n)) / n * std::log(std::fabs(u));
    };
    double tail = 0.0;
    for (unsigned k = 0; k <= i; ++k)
        tail += std::pow(c, static_cast<double>(i - k)) * (std::pow(b, k + 1.0) - std::pow(a, k + 1.0)) / (k + 1.0);
    return boundary(b) - boundary(a) - tail / n;
}

namespace {

Scalar poly_moment(const ScalarPoly& p, unsigned i, const Scalar& a, const Scalar& b)
{
    if (p.is_zero())
        return Scalar(0);
    ScalarPoly q = ScalarPoly::monomial(i) * p;
    return q.integrate(a, b);
}

Scalar smax(const Scalar& a, const Scalar& b) { return a < b ? b : a; }
Scalar smin(const Scalar& a, const Scalar& b) { return a < b ? a : b; }

}  // namespace

Scalar EdgeMeasure::moment(const Interval& dom, unsigned i, const Scalar& a, const Scalar& b) const
{
    if (kind_ == Kind::Table) {
        double lo = a.to_double(), hi = b.to_double();
        double sum = 0.0;
        const auto& F = table_.f;
        for (std::size_t k = 0; k + 1 < F.size(); ++k) {
            double x1 = std::max(lo, F[k]), x2 = std::min(hi, F[k + 1]);
            if (x2 <= x1)
                continue;
            double d = (table_.cumulative[k + 1] - table_.cumulative[k]) / (F[k + 1] - F[k]);
            sum += d * (std::pow(x2, i + 1.0) - std::pow(x1, i + 1.0)) / (i + 1.0);
        }
        return Scalar(sum);
    }
    Scalar total = poly_moment(poly_, i, a, b);
    for (const auto& p : patches_) {
        Scalar lo = smax(a, p.lo), hi = smin(b, p.hi);
        if (lo < hi)
            total += poly_moment(p.poly, i, lo, hi);
    }
    for (const auto& t : logs_)
        total += Scalar(t.coef * log_moment(i, log_anchor(t, dom).to_double(), a.to_double(), b.to_double()));
    return total;
}

double integrate_adaptive(const std::function<double(double)>& fn, double a, double b, double tol)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    if (!(b > a))
        return 0.0;
    constexpr int max_depth = 60;
    // the depth cap alone would allow 2^60 cells on oscillatory integrands
    constexpr long max_cells = 200000;
    long cells = 0;
    const double width = b - a;
    double total = 0.0, total_err = 0.0;
    // explicit stack instead of recursion; each cell gets a share of the
    // absolute tolerance proportional to its width
    struct Cell { double lo, hi; int depth; };
    std::vector<Cell> stack{{a, b, 0}};
    while (!stack.empty()) {
        Cell c = stack.back();
        stack.pop_back();
        double err = 0.0;
        double est = GK::integrate(fn, c.lo, c.hi, 0, 0.0, &err);
        double local_tol = tol * (c.hi - c.lo) / width;
        double mid = 0.5 * (c.lo + c.hi);
        bool splittable = c.depth < max_depth && ++cells < max_cells && mid > c.lo && mid < c.hi;
        if (err <= local_tol || !splittable) {
            total += est;
            total_err += err;
        } else {
            stack.push_back({mid, c.hi, c.depth + 1});
            stack.push_back({c.lo, mid, c.depth + 1});
        }
    }
    if (!std::isfinite(total) || total_err > tol) {
        std::ostringstream os;
        os << "quadrature tolerance " << tol << " unreachable; achieved " << total_err;
        throw QuadratureError(os.str(), total_err);
    }
    return total;
}

double EdgeMeasure::quadrature_moment(const Interval& dom, unsigned i, double a, double b, double tol) const
{
    // split at every point where the density is singular or discontinuous
    std::vector<double> cuts{a, b};
    if (kind_ == Kind::Table) {
        for (double f : table_.f)
            cuts.push_back(f);
    } else {
        for (const auto& t : logs_)
            cuts.push_back(log_anchor(t, dom).to_double());
        for (const auto& p : patches_) {
            cuts.push_back(p.lo.to_double());
            cuts.push_back(p.hi.to_double());
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> pieces;
    for (double c : cuts)
        if (c >= a && c <= b)
            pieces.push_back(c);
    auto integrand = [&](double f) { return std::pow(f, static_cast<double>(i)) * density(dom, f); };
    double sum = 0.0;
    double share = tol / static_cast<double>(std::max<std::size_t>(1, pieces.size() - 1));
    // tanh-sinh clusters nodes at the ends of each piece, where the log
    // singularities sit after the cuts above
    static thread_local boost::math::quadrature::tanh_sinh<double> ts;
    for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
        double err = 0.0, l1 = 0.0;
        double v = ts.integrate(integrand, pieces[k], pieces[k + 1], 1e-15, &err, &l1);
        if (!std::isfinite(v) || err > share) {
            // fall back to bisection, which reports its own failure
            v = integrate_adaptive(integrand, pieces[k], pieces[k + 1], share);
        }
        sum += v;
    }
    return sum;
}

EdgeMeasure EdgeMeasure::restricted(const Interval& dom, const Interval& sub) const
{
    if (kind_ == Kind::Table) {
        double lo = sub.lo.to_double(), hi = sub.hi.to_double();
        auto cum_at = [&](double f) {
            const auto& F = table_.f;
            auto it = std::upper_bound(F.begin(), F.end(), f);
            std::size_t k = it == F.begin() ? 0 : static_cast<std::size_t>(it - F.begin()) - 1;
            k = std::min(k, F.size() - 2);
            double t = (f - F[k]) / (F[k + 1] - F[k]);
            return table_.cumulative[k] + t * (table_.cumulative[k + 1] - table_.cumulative[k]);
        };
        CumulativeTable t;
        t.f.push_back(lo);
        t.cumulative.push_back(cum_at(lo));
        for (std::size_t k = 0; k < table_.f.size(); ++k)
            if (table_.f[k] > lo && table_.f[k] < hi) {
                t.f.push_back(table_.f[k]);
                t.cumulative.push_back(table_.cumulative[k]);
            }
        t.f.push_back(hi);
        t.cumulative.push_back(cum_at(hi));
        return table(std::move(t));
    }
    std::vector<LogTerm> logs;
    for (auto t : logs_) {
        t.at = log_anchor(t, dom);
        logs.push_back(t);
    }
    std::vector<PolyPatch> patches;
    for (const auto& p : patches_) {
        Scalar lo = smax(sub.lo, p.lo), hi = smin(sub.hi, p.hi);
        if (lo < hi)
            patches.push_back({lo, hi, p.poly});
    }
    return poly_log(poly_, std::move(logs), std::move(patches));
}

std::optional<double> EdgeMeasure::find_nonpositive(const Interval& dom, int samples) const
{
    if (kind_ == Kind::Table) {
        for (std::size_t k = 0; k + 1 < table_.f.size(); ++k)
            if (!(table_.cumulative[k + 1] > table_.cumulative[k]))
                return 0.5 * (table_.f[k] + table_.f[k + 1]);
        return std::nullopt;
    }
    double lo = dom.lo.to_double(), hi = dom.hi.to_double();
    std::vector<double> pts;
    for (int k = 0; k < samples; ++k)
        pts.push_back(lo + (hi - lo) * (k + 0.5) / samples);
    // patch edges are where a subtracted bump is most likely to bite
    for (const auto& p : patches_) {
        const double plo = p.lo.to_double(), phi = p.hi.to_double();
        for (int k = 0; k <= 64; ++k)
            pts.push_back(plo + (phi - plo) * k / 64.0);
    }
    for (double f : pts) {
        if (!(f > lo && f < hi))
            continue;
        double d = density(dom, f);
        if (!(d > 0.0))
            return f;
    }
    return std::nullopt;
}

bool operator==(const EdgeMeasure& a, const EdgeMeasure& b)
{
    if (a.kind_ != b.kind_)
        return false;
    if (a.kind_ == EdgeMeasure::Kind::Table)
        return a.table_.f == b.table_.f && a.table_.cumulative == b.table_.cumulative;
    if (!(a.poly_ == b.poly_) || a.logs_.size() != b.logs_.size() || a.patches_.size() != b.patches_.size())
        return false;
    for (std::size_t k = 0; k < a.logs_.size(); ++k) {
        const auto &x = a.logs_[k], &y = b.logs_[k];
        if (x.side != y.side || x.coef != y.coef || x.at.has_value() != y.at.has_value())
            return false;
        if (x.at && !(*x.at == *y.at))
            return false;
    }
    for (std::size_t k = 0; k < a.patches_.size(); ++k) {
        const auto &x = a.patches_[k], &y = b.patches_[k];
        if (!(x.lo == y.lo) || !(x.hi == y.hi) || !(x.poly == y.poly))
            return false;
    }
    return true;
}

LogFit fit_log_coefficients(const std::array<LogFitSamples, 3>& samples)
{
    LogFit out;
    for (int e = 0; e < 3; ++e) {
        const auto& s = samples[e];
        if (s.f.size() != s.mu.size())
            throw std::invalid_argument("log fit: f and mu sample counts differ");
        if (s.f.size() < 8)
            throw std::invalid_argument("log fit: fewer than 8 samples on incident edge " + std::to_string(e));
        const Eigen::Index n = static_cast<Eigen::Index>(s.f.size());
        // normalise f so the columns are comparable in size
        double scale = 0.0;
        for (double f : s.f)
            scale = std::max(scale, std::fabs(f));
        if (scale == 0.0)
            throw std::invalid_argument("log fit: all samples at the saddle");
        Eigen::MatrixXd A(n, 4);
        Eigen::VectorXd y(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            double f = s.f[static_cast<std::size_t>(r)];
            double u = f / scale;
            A(r, 0) = f == 0.0 ? 0.0 : f * std::log(std::fabs(f));
            A(r, 1) = u;
            A(r, 2) = u * u;
            A(r, 3) = u * u * u;
            y(r) = s.mu[static_cast<std::size_t>(r)];
        }
        Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
        Eigen::VectorXd res = A * x - y;
        double rss = res.squaredNorm();
        out.kappa[e] = x(0);
        out.residual_rms[e] = std::sqrt(rss / static_cast<double>(n));
        double dof = std::max<double>(1.0, static_cast<double>(n - 4));
        Eigen::MatrixXd cov = (A.transpose() * A).inverse() * (rss / dof);
        out.kappa_stderr[e] = std::sqrt(std::max(0.0, cov(0, 0)));
    }
    return out;
}

}  // namespace reebflow
