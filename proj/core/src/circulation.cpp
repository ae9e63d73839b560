#include "reebflow/circulation.hpp"

#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reebflow {

using detail::Field;
using detail::Matrix;

CirculationFunction::CirculationFunction(MeasuredReebGraph g, std::vector<Scalar> head_limits)
    : g_(std::move(g)), head_(std::move(head_limits)), rho_(edge_weights(g_))
{
    if (head_.size() != g_.edge_count())
        throw std::invalid_argument("circulation function needs one head limit per edge");
}

Scalar CirculationFunction::limit(std::size_t v, std::size_t e) const
{
    if (g_.head(e) == v)
        return head_limit(e);
    if (g_.tail(e) == v)
        return tail_limit(e);
    throw std::invalid_argument("edge '" + g_.edge(e).id + "' is not incident to '" + g_.vertex(v).id + "'");
}

Scalar AffineForm::operator()(const std::vector<Scalar>& t) const
{
    Scalar r = constant;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        r += coeffs[k] * t.at(k);
    return r;
}

bool AffineCirculationSpace::is_exact() const
{
    for (const auto& x : particular)
        if (!x.is_exact())
            return false;
    for (const auto& b : basis)
        for (const auto& x : b)
            if (!x.is_exact())
                return false;
    return true;
}

CirculationFunction AffineCirculationSpace::point(const std::vector<Scalar>& t) const
{
    if (t.size() != basis.size())
        throw std::invalid_argument("expected " + std::to_string(basis.size()) + " coordinates");
    std::vector<Scalar> h = particular;
    for (std::size_t k = 0; k < basis.size(); ++k)
        for (std::size_t e = 0; e < h.size(); ++e)
            if (!basis[k][e].is_zero())
                h[e] += t[k] * basis[k][e];
    return CirculationFunction(graph, std::move(h));
}

AffineForm AffineCirculationSpace::head_form(std::size_t e) const
{
    AffineForm f;
    f.constant = particular.at(e);
    for (const auto& b : basis)
        f.coeffs.push_back(b.at(e));
    return f;
}

AffineForm AffineCirculationSpace::limit_form(std::size_t v, std::size_t e) const
{
    AffineForm f = head_form(e);
    if (graph.head(e) == v)
        return f;
    if (graph.tail(e) == v) {
        f.constant -= edge_weight(graph, e);
        return f;
    }
    throw std::invalid_argument("edge '" + graph.edge(e).id + "' is not incident to '" + graph.vertex(v).id + "'");
}

namespace {

template <class T>
AffineCirculationSpace reparam_impl(const AffineCirculationSpace& s, const std::vector<AffineForm>& forms,
                                    std::vector<std::string> labels)
{
    const std::size_t d = forms.size();
    Matrix<T> M(d, std::vector<T>(d));
    std::vector<T> m0(d);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t j = 0; j < d; ++j)
            M[k][j] = Field<T>::from(forms[k].coeffs[j]);
        m0[k] = Field<T>::from(forms[k].constant);
    }
    auto Minv = detail::inverse(M);
    if (!Minv)
        throw std::invalid_argument("requested limits do not form a coordinate system on the circulation space");
    // t = Minv (u - m0): head(u) = P - B Minv m0 + B Minv u
    const std::size_t E = s.particular.size();
    AffineCirculationSpace out;
    out.graph = s.graph;
    out.residual = s.residual;
    out.warning = s.warning;
    out.labels = std::move(labels);
    std::vector<T> shift(d, T(0));  // Minv m0
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k)
            shift[j] += (*Minv)[j][k] * m0[k];
    out.particular.resize(E);
    for (std::size_t e = 0; e < E; ++e) {
        T v = Field<T>::from(s.particular[e]);
        for (std::size_t j = 0; j < d; ++j)
            v -= Field<T>::from(s.basis[j][e]) * shift[j];
        out.particular[e] = Field<T>::to(v);
    }
    out.basis.assign(d, std::vector<Scalar>(E));
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t e = 0; e < E; ++e) {
            T v(0);
            for (std::size_t j = 0; j < d; ++j)
                v += Field<T>::from(s.basis[j][e]) * (*Minv)[j][k];
            out.basis[k][e] = Field<T>::to(v);
        }
    return out;
}

}  // namespace

AffineCirculationSpace AffineCirculationSpace::reparametrize(const std::vector<LimitRef>& refs) const
{
    if (refs.size() != basis.size())
        throw std::invalid_argument("need exactly " + std::to_string(basis.size()) + " coordinate limits, got "
                                    + std::to_string(refs.size()));
    std::vector<AffineForm> forms;
    std::vector<std::string> labels;
    bool exact = is_exact();
    for (const auto& r : refs) {
        std::size_t v = graph.vertex_index(r.vertex), e = graph.edge_index(r.edge);
        forms.push_back(limit_form(v, e));
        exact = exact && forms.back().constant.is_exact();
        labels.push_back("c(" + r.vertex + ";" + r.edge + ")");
    }
    if (exact)
        return reparam_impl<Rational>(*this, forms, std::move(labels));
    return reparam_impl<double>(*this, forms, std::move(labels));
}

std::vector<Scalar> AffineCirculationSpace::coordinates_of(const CirculationFunction& c) const
{
    const std::size_t d = basis.size(), E = particular.size();
    // least-squares is unnecessary: B has full column rank, pick d independent rows
    bool exact = is_exact();
    for (const auto& x : c.head_limits())
        exact = exact && x.is_exact();
    auto run = [&](auto tag) -> std::vector<Scalar> {
        using T = decltype(tag);
        Matrix<T> aug(E, std::vector<T>(d + 1));
        for (std::size_t e = 0; e < E; ++e) {
            for (std::size_t k = 0; k < d; ++k)
                aug[e][k] = Field<T>::from(basis[k][e]);
            aug[e][d] = Field<T>::from(c.head_limit(e) - particular[e]);
        }
        auto R = detail::rref(std::move(aug), d);
        if (R.pivots.size() < d)
            throw std::logic_error("circulation space basis is rank deficient");
        std::vector<Scalar> t(d);
        for (std::size_t r = 0; r < d; ++r)
            t[R.pivots[r]] = Field<T>::to(R.m[r][d]);
        return t;
    };
    if (d == 0)
        return {};
    return exact ? run(Rational()) : run(double());
}

namespace {

template <class T>
CirculationSolve solve_impl(const MeasuredReebGraph& g, const std::vector<Scalar>& rho)
{
    const std::size_t E = g.edge_count();
    std::vector<std::size_t> rows_v;
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (g.vertex(v).role != VertexRole::Boundary)
            rows_v.push_back(v);
    // Σ_in λ⁺ − Σ_out λ⁺ = −Σ_out ρ
    Matrix<T> A(rows_v.size(), std::vector<T>(E + 1, T(0)));
    for (std::size_t r = 0; r < rows_v.size(); ++r) {
        std::size_t v = rows_v[r];
        for (auto e : g.in_edges(v))
            A[r][e] += T(1);
        for (auto e : g.out_edges(v)) {
            A[r][e] -= T(1);
            A[r][E] -= Field<T>::from(rho[e]);
        }
    }
    Matrix<T> original = A;
    auto R = detail::rref(std::move(A), E);
    const std::size_t rank = R.pivots.size();

    std::vector<T> x(E, T(0));
    for (std::size_t r = 0; r < rank; ++r)
        x[R.pivots[r]] = R.m[r][E];

    double residual = 0.0;
    for (const auto& row : original) {
        T lhs(0);
        for (std::size_t e = 0; e < E; ++e)
            lhs += row[e] * x[e];
        residual = std::max(residual, Field<T>::mag(T(lhs - row[E])));
    }

    Scalar total(0);
    for (const auto& w : rho)
        total += w;

    bool infeasible = false;
    if constexpr (Field<T>::exact) {
        for (std::size_t r = rank; r < R.m.size(); ++r)
            if (!Field<T>::zero(R.m[r][E]))
                infeasible = true;
    } else {
        infeasible = residual > 1e-6;
    }
    if (infeasible) {
        std::ostringstream os;
        os << "Kirchhoff system inconsistent";
        if (!g.has_boundary())
            os << ": closed graph with total weight " << total.to_string() << " != 0";
        return Infeasible{total, residual, os.str()};
    }

    AffineCirculationSpace s;
    s.graph = g;
    s.residual = residual;
    if (!Field<T>::exact && residual > 1e-10) {
        std::ostringstream os;
        os << "Kirchhoff residual " << residual << " above 1e-10";
        s.warning = os.str();
    }
    for (std::size_t e = 0; e < E; ++e)
        s.particular.push_back(Field<T>::to(x[e]));
    std::vector<bool> pivot(E, false);
    for (auto p : R.pivots)
        pivot[p] = true;
    for (std::size_t j = 0; j < E; ++j) {
        if (pivot[j])
            continue;
        std::vector<Scalar> delta(E, Scalar(0));
        delta[j] = Scalar(1);
        for (std::size_t r = 0; r < rank; ++r)
            delta[R.pivots[r]] = Field<T>::to(T(-R.m[r][j]));
        if constexpr (!Field<T>::exact)
            for (auto& dv : delta)
                if (dv.is_zero())
                    dv = Scalar(0.0);
        s.basis.push_back(std::move(delta));
        s.free_edges.push_back(j);
        s.labels.push_back("lambda+(" + g.edge(j).id + ")");
    }
    return s;
}

}  // namespace

CirculationSolve solve_circulation_space(const MeasuredReebGraph& g)
{
    require_valid(g);
    auto rho = edge_weights(g);
    bool exact = true;
    for (const auto& w : rho)
        exact = exact && w.is_exact();
    if (exact)
        return solve_impl<Rational>(g, rho);
    return solve_impl<double>(g, rho);
}

CirculationSolve solve_with_declared_coordinates(const MeasuredReebGraph& g)
{
    auto r = solve_circulation_space(g);
    if (auto* s = std::get_if<AffineCirculationSpace>(&r); s && !g.coordinates().empty())
        return s->reparametrize(g.coordinates());
    return r;
}

Scalar evaluate(const CirculationFunction& c, std::size_t e, const Scalar& f0)
{
    const auto& g = c.graph();
    Interval dom = g.domain(e);
    if (!(f0 > dom.lo && f0 < dom.hi))
        throw std::out_of_range("height " + f0.to_string() + " outside the open range of edge '" + g.edge(e).id + "'");
    return c.head_limit(e) - g.edge(e).measure.moment(dom, 1, f0, dom.hi);
}

double kirchhoff_residual(const CirculationFunction& c)
{
    const auto& g = c.graph();
    double worst = 0.0;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (g.vertex(v).role == VertexRole::Boundary)
            continue;
        Scalar s(0);
        for (auto e : g.in_edges(v))
            s += c.head_limit(e);
        for (auto e : g.out_edges(v))
            s -= c.tail_limit(e);
        worst = std::max(worst, std::fabs(s.to_double()));
    }
    return worst;
}

SaddleLimits vertex_limits(const CirculationFunction& c, std::size_t v)
{
    auto tb = trunk_and_branches(c.graph(), v);
    SaddleLimits s;
    s.vertex = v;
    s.edges = {tb.trunk, tb.branches[0], tb.branches[1]};
    for (int k = 0; k < 3; ++k)
        s.limits[k] = c.limit(v, s.edges[k]);
    return s;
}

Verdict is_balanced(const CirculationFunction& c, double tol)
{
    Verdict out;
    bool indeterminate = false;
    for (auto v : c.graph().saddles()) {
        auto s = vertex_limits(c, v);
        bool has_pos = false, has_neg = false, has_zero = false, has_ind = false;
        for (const auto& l : s.limits) {
            switch (l.sign(tol)) {
            case Sign::Positive: has_pos = true; break;
            case Sign::Negative: has_neg = true; break;
            case Sign::Zero: has_zero = true; break;
            case Sign::Indeterminate: has_ind = true; break;
            }
        }
        if (has_zero || (has_pos && has_neg)) {
            out.status = Verdict::Status::Fails;
            out.witness = s;
            return out;
        }
        if (has_ind && !indeterminate) {
            indeterminate = true;
            out.witness = s;
        }
    }
    out.status = indeterminate ? Verdict::Status::Indeterminate : Verdict::Status::Holds;
    if (!indeterminate)
        out.witness.reset();
    return out;
}

Verdict is_totally_negative(const CirculationFunction& c, double tol)
{
    if (c.graph().has_boundary())
        throw std::invalid_argument("total negativity is defined for closed surfaces; use balanced regions for graphs with boundary");
    Verdict out;
    bool indeterminate = false;
    for (auto v : c.graph().saddles()) {
        auto s = vertex_limits(c, v);
        for (const auto& l : s.limits) {
            Sign sg = l.sign(tol);
            if (sg == Sign::Positive || sg == Sign::Zero) {
                out.status = Verdict::Status::Fails;
                out.witness = s;
                return out;
            }
            if (sg == Sign::Indeterminate && !indeterminate) {
                indeterminate = true;
                out.witness = s;
            }
        }
    }
    out.status = indeterminate ? Verdict::Status::Indeterminate : Verdict::Status::Holds;
    if (!indeterminate)
        out.witness.reset();
    return out;
}

bool edge_concavity_check(const CirculationFunction& c, std::size_t e, int samples)
{
    const auto& g = c.graph();
    Interval dom = g.domain(e);
    const double lo = dom.lo.to_double(), hi = dom.hi.to_double();
    const double head = c.head_limit(e).to_double();
    const auto& m = g.edge(e).measure;
    std::vector<double> prof;
    prof.push_back(c.tail_limit(e).to_double());
    for (int k = 1; k < samples - 1; ++k) {
        double f = lo + (hi - lo) * k / (samples - 1);
        prof.push_back(head - m.moment(dom, 1, Scalar(f), dom.hi).to_double());
    }
    prof.push_back(head);
    double scale = 0.0;
    for (double p : prof)
        scale = std::max(scale, std::fabs(p));
    const double eps = 1e-12 * std::max(1.0, scale);
    // non-increasing, then non-decreasing
    bool rising = false;
    for (std::size_t k = 1; k < prof.size(); ++k) {
        double d = prof[k] - prof[k - 1];
        if (d > eps)
            rising = true;
        else if (d < -eps && rising)
            return false;
    }
    const double top = std::max(prof.front(), prof.back());
    return std::all_of(prof.begin(), prof.end(), [&](double p) { return p <= top + eps; });
}

}  // namespace reebflow
