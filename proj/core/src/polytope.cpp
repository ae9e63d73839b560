#include "reebflow/polytope.hpp"

#include "reebflow/parallel.hpp"
#include "simplex.hpp"

#include <algorithm>
#include <functional>

namespace reebflow {

using detail::Field;
using detail::LpStatus;
using detail::Matrix;

bool HRep::is_exact() const
{
    for (const auto& r : rows) {
        if (!r.offset.is_exact())
            return false;
        for (const auto& x : r.normal)
            if (!x.is_exact())
                return false;
    }
    return true;
}

bool HRep::contains(const std::vector<Scalar>& t) const
{
    for (const auto& r : rows) {
        Scalar v = r.offset;
        for (int j = 0; j < dim; ++j)
            v += r.normal[j] * t.at(j);
        if (r.strict ? !(v < Scalar(0)) : !(v <= Scalar(0)))
            return false;
    }
    return true;
}

namespace {

std::vector<std::size_t> sorted_incident(const MeasuredReebGraph& g, std::size_t v)
{
    auto tb = trunk_and_branches(g, v);
    std::vector<std::size_t> es{tb.trunk, tb.branches[0], tb.branches[1]};
    std::sort(es.begin(), es.end());  // edge indices follow id order
    return es;
}

}  // namespace

HRep negative_system(const AffineCirculationSpace& space)
{
    const auto& g = space.graph;
    if (g.has_boundary())
        throw std::invalid_argument("graph has boundary vertices; total negativity does not apply, use balanced_regions");
    HRep h;
    h.dim = space.dim();
    h.labels = space.labels;
    for (auto v : g.saddles())
        for (auto e : sorted_incident(g, v)) {
            AffineForm f = space.limit_form(v, e);
            h.rows.push_back({f.coeffs, f.constant, true, g.vertex(v).id, g.edge(e).id});
        }
    return h;
}

namespace {

template <class T>
Feasibility feasibility_impl(const HRep& h)
{
    const std::size_t d = static_cast<std::size_t>(h.dim);
    const std::size_t n = 2 * d + 1;  // t+, t-, s
    Matrix<T> A;
    std::vector<T> b;
    for (const auto& r : h.rows) {
        std::vector<T> row(n, T(0));
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = Field<T>::from(r.normal[j]);
            row[d + j] = -row[j];
        }
        row[2 * d] = r.strict ? T(1) : T(0);
        A.push_back(std::move(row));
        b.push_back(-Field<T>::from(r.offset));
    }
    std::vector<T> c(n, T(0));
    c[2 * d] = T(1);

    Feasibility out;
    auto res = detail::Simplex<T>(A, b, c).solve();
    if (res.status == LpStatus::Infeasible)
        return out;
    if (res.status == LpStatus::Unbounded) {
        out.unbounded_slack = true;
        std::vector<T> cap(n, T(0));
        cap[2 * d] = T(1);
        A.push_back(cap);
        b.push_back(T(1));
        res = detail::Simplex<T>(A, b, c).solve();
        if (res.status != LpStatus::Optimal)
            throw std::logic_error("slack LP lost feasibility after capping");
    } else {
        bool positive;
        if constexpr (Field<T>::exact)
            positive = sgn(res.objective) > 0;
        else
            positive = res.objective > 1e-9;
        if (!positive)
            return out;
    }
    out.feasible = true;
    out.slack = out.unbounded_slack ? Scalar(0) : Field<T>::to(res.objective);
    for (std::size_t j = 0; j < d; ++j)
        out.point.push_back(Field<T>::to(T(res.x[j] - res.x[d + j])));
    return out;
}

}  // namespace

Feasibility feasibility(const HRep& h)
{
    return h.is_exact() ? feasibility_impl<Rational>(h) : feasibility_impl<double>(h);
}

namespace {

using QVec = std::vector<Rational>;

void for_each_subset(std::size_t m, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn)
{
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i)
        idx[i] = i;
    if (k > m)
        return;
    for (;;) {
        fn(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == m - k + i - 1)
            --i;
        if (i == 0)
            return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

// scale so the first nonzero entry has absolute value 1
QVec normalize_direction(QVec r)
{
    for (const auto& x : r)
        if (sgn(x) != 0) {
            Rational s = abs(x);
            for (auto& y : r)
                y /= s;
            break;
        }
    return r;
}

}  // namespace

VRep enumerate_vertices(const HRep& h)
{
    if (h.dim > 6)
        throw std::invalid_argument("vertex enumeration is limited to dimension <= 6; use feasibility/boundedness");
    VRep out;
    if (!feasibility(h).feasible)
        return out;
    const std::size_t d = static_cast<std::size_t>(h.dim);

    Matrix<Rational> N;
    std::vector<Rational> O;
    for (const auto& r : h.rows) {
        QVec n;
        bool nonzero = false;
        for (const auto& x : r.normal) {
            n.push_back(x.to_rational());
            nonzero = nonzero || sgn(n.back()) != 0;
        }
        if (!nonzero)
            continue;
        N.push_back(std::move(n));
        O.push_back(r.offset.to_rational());
    }

    // lineality space: directions along which every row is constant
    Matrix<Rational> lineal = N.empty() ? Matrix<Rational>() : detail::nullspace(N, d);
    if (N.empty())
        for (std::size_t j = 0; j < d; ++j) {
            QVec e(d, Rational(0));
            e[j] = 1;
            lineal.push_back(e);
        }
    for (const auto& l : lineal) {
        QVec neg = l;
        for (auto& x : neg)
            x = -x;
        N.push_back(l);
        O.push_back(Rational(0));
        N.push_back(neg);
        O.push_back(Rational(0));
    }

    auto satisfies = [&](const QVec& t) {
        for (std::size_t i = 0; i < N.size(); ++i) {
            Rational v = O[i];
            for (std::size_t j = 0; j < d; ++j)
                v += N[i][j] * t[j];
            if (sgn(v) > 0)
                return false;
        }
        return true;
    };
    auto in_cone = [&](const QVec& r) {
        for (const auto& n : N) {
            Rational v(0);
            for (std::size_t j = 0; j < d; ++j)
                v += n[j] * r[j];
            if (sgn(v) > 0)
                return false;
        }
        return true;
    };

    std::vector<QVec> verts, rays;
    if (d == 0) {
        verts.push_back({});
    } else {
        for_each_subset(N.size(), d, [&](const std::vector<std::size_t>& idx) {
            Matrix<Rational> A;
            std::vector<Rational> b;
            for (auto i : idx) {
                A.push_back(N[i]);
                b.push_back(-O[i]);
            }
            auto x = detail::solve_square(A, b);
            if (x && satisfies(*x))
                verts.push_back(*x);
        });
        for_each_subset(N.size(), d - 1, [&](const std::vector<std::size_t>& idx) {
            Matrix<Rational> A;
            for (auto i : idx)
                A.push_back(N[i]);
            Matrix<Rational> ns;
            if (A.empty()) {
                if (d == 1)
                    ns.push_back(QVec{Rational(1)});
            } else {
                ns = detail::nullspace(A, d);
            }
            if (ns.size() != 1)
                return;
            QVec r = ns[0];
            QVec neg = r;
            for (auto& x : neg)
                x = -x;
            if (in_cone(r))
                rays.push_back(normalize_direction(r));
            if (in_cone(neg))
                rays.push_back(normalize_direction(neg));
        });
    }
    for (const auto& l : lineal) {
        QVec neg = l;
        for (auto& x : neg)
            x = -x;
        rays.push_back(normalize_direction(l));
        rays.push_back(normalize_direction(neg));
    }
    auto dedupe = [](std::vector<QVec>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedupe(verts);
    dedupe(rays);
    for (const auto& v : verts) {
        std::vector<Scalar> s;
        for (const auto& x : v)
            s.emplace_back(x);
        out.vertices.push_back(std::move(s));
    }
    for (const auto& r : rays) {
        std::vector<Scalar> s;
        for (const auto& x : r)
            s.emplace_back(x);
        out.rays.push_back(std::move(s));
    }
    return out;
}

namespace {

template <class T>
Boundedness boundedness_impl(const HRep& h)
{
    const std::size_t d = static_cast<std::size_t>(h.dim);
    Boundedness out;
    if (d == 0)
        return out;
    // r = r+ - r-, box 0 <= r± <= 1
    Matrix<T> A;
    std::vector<T> b;
    for (const auto& r : h.rows) {
        std::vector<T> row(2 * d, T(0));
        bool nonzero = false;
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = Field<T>::from(r.normal[j]);
            row[d + j] = -row[j];
            nonzero = nonzero || !Field<T>::zero(row[j], 0);
        }
        if (!nonzero)
            continue;
        A.push_back(std::move(row));
        b.push_back(T(0));
    }
    for (std::size_t j = 0; j < 2 * d; ++j) {
        std::vector<T> row(2 * d, T(0));
        row[j] = T(1);
        A.push_back(std::move(row));
        b.push_back(T(1));
    }
    for (std::size_t i = 0; i < d; ++i)
        for (int sgn_dir : {1, -1}) {
            std::vector<T> c(2 * d, T(0));
            c[i] = T(sgn_dir);
            c[d + i] = T(-sgn_dir);
            auto res = detail::Simplex<T>(A, b, c).solve();
            if (res.status != LpStatus::Optimal)
                throw std::logic_error("recession LP failed");
            bool pos;
            if constexpr (Field<T>::exact)
                pos = sgn(res.objective) > 0;
            else
                pos = res.objective > 1e-9;
            if (pos) {
                out.bounded = false;
                for (std::size_t j = 0; j < d; ++j)
                    out.direction.push_back(Field<T>::to(T(res.x[j] - res.x[d + j])));
                return out;
            }
        }
    return out;
}

}  // namespace

Boundedness boundedness(const HRep& h)
{
    return h.is_exact() ? boundedness_impl<Rational>(h) : boundedness_impl<double>(h);
}

std::vector<BalancedRegion> balanced_regions(const AffineCirculationSpace& space)
{
    const auto& g = space.graph;
    auto saddles = g.saddles();
    if (saddles.size() > 20)
        throw std::invalid_argument("balanced region enumeration supports at most 20 saddles, graph has "
                                    + std::to_string(saddles.size()));
    std::vector<std::string> ids;
    for (auto v : saddles)
        ids.push_back(g.vertex(v).id);
    // limit forms do not depend on the pattern
    std::vector<std::vector<std::pair<std::size_t, AffineForm>>> forms;
    for (auto v : saddles) {
        std::vector<std::pair<std::size_t, AffineForm>> fs;
        for (auto e : sorted_incident(g, v))
            fs.emplace_back(e, space.limit_form(v, e));
        forms.push_back(std::move(fs));
    }
    const std::size_t count = std::size_t{1} << saddles.size();
    std::vector<BalancedRegion> out(count);
    parallel_for(count, [&](std::size_t p) {
        BalancedRegion& r = out[p];
        r.saddles = ids;
        r.system.dim = space.dim();
        r.system.labels = space.labels;
        for (std::size_t k = 0; k < saddles.size(); ++k) {
            int s = (p >> k) & 1 ? 1 : -1;
            r.signs.push_back(s);
            // s * limit > 0  <=>  -s * limit < 0
            for (const auto& [e, f] : forms[k]) {
                Inequality row;
                for (const auto& x : f.coeffs)
                    row.normal.push_back(Scalar(-s) * x);
                row.offset = Scalar(-s) * f.constant;
                row.strict = true;
                row.vertex = ids[k];
                row.edge = g.edge(e).id;
                r.system.rows.push_back(std::move(row));
            }
        }
        r.verdict = feasibility(r.system);
    });
    return out;
}

std::vector<Scalar> circulation_lower_bounds(const MeasuredReebGraph& g)
{
    require_valid(g);
    if (g.has_boundary())
        throw std::invalid_argument("lower bounds are stated for closed graphs");
    const std::size_t V = g.vertex_count(), E = g.edge_count();
    // reach[u][w]: directed path from u to w (u reaches itself)
    std::vector<std::vector<bool>> reach(V, std::vector<bool>(V, false));
    for (std::size_t u = 0; u < V; ++u) {
        std::vector<std::size_t> stack{u};
        reach[u][u] = true;
        while (!stack.empty()) {
            std::size_t x = stack.back();
            stack.pop_back();
            for (auto e : g.out_edges(x)) {
                std::size_t y = g.head(e);
                if (!reach[u][y]) {
                    reach[u][y] = true;
                    stack.push_back(y);
                }
            }
        }
    }
    auto rho = edge_weights(g);
    std::vector<Scalar> bound(E, Scalar(0));
    for (std::size_t e = 0; e < E; ++e)
        for (std::size_t e2 = 0; e2 < E; ++e2)
            if (e2 == e || reach[g.head(e2)][g.tail(e)])
                bound[e] += rho[e2];
    return bound;
}

}  // namespace reebflow
