#pragma once

#include "reebflow/scalar.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace reebflow {

// Dense univariate polynomial, coefficients in increasing degree.
template <class T>
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
    static Polynomial constant(T v) { return Polynomial(std::vector<T>{std::move(v)}); }
    static Polynomial monomial(unsigned k, T v = T(1))
    {
        std::vector<T> c(k + 1, T(0));
        c[k] = std::move(v);
        return Polynomial(std::move(c));
    }

    const std::vector<T>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    T coeff(std::size_t k) const { return k < c_.size() ? c_[k] : T(0); }

    template <class X>
    X operator()(const X& x) const
    {
        X r(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            r = r * x + X(*it);
        return r;
    }

    Polynomial derivative() const
    {
        std::vector<T> d;
        for (std::size_t k = 1; k < c_.size(); ++k)
            d.push_back(c_[k] * T(static_cast<int>(k)));
        return Polynomial(std::move(d));
    }

    // Antiderivative vanishing at 0.
    Polynomial integral() const
    {
        std::vector<T> d(c_.size() + 1, T(0));
        for (std::size_t k = 0; k < c_.size(); ++k)
            d[k + 1] = c_[k] / T(static_cast<int>(k + 1));
        return Polynomial(std::move(d));
    }

    template <class X>
    X integrate(const X& a, const X& b) const
    {
        auto P = integral();
        return P(b) - P(a);
    }

    // p(x + s)
    Polynomial shifted(const T& s) const
    {
        Polynomial r;
        Polynomial lin(std::vector<T>{s, T(1)});
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            r = r * lin + constant(*it);
        return r;
    }

    // p(k x)
    Polynomial scaled(const T& k) const
    {
        std::vector<T> d = c_;
        T pk(1);
        for (auto& v : d) {
            v = v * pk;
            pk = pk * k;
        }
        return Polynomial(std::move(d));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b)
    {
        std::vector<T> r(std::max(a.c_.size(), b.c_.size()), T(0));
        for (std::size_t k = 0; k < r.size(); ++k)
            r[k] = a.coeff(k) + b.coeff(k);
        return Polynomial(std::move(r));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b)
    {
        return a + b * T(-1);
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.c_.empty() || b.c_.empty())
            return {};
        std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                r[i + j] = r[i + j] + a.c_[i] * b.c_[j];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator*(const Polynomial& a, const T& s)
    {
        std::vector<T> r = a.c_;
        for (auto& v : r)
            v = v * s;
        return Polynomial(std::move(r));
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == T(0))
            c_.pop_back();
    }
    std::vector<T> c_;
};

using RealPoly = Polynomial<double>;
using ScalarPoly = Polynomial<Scalar>;

RealPoly to_real(const ScalarPoly& p);
bool is_exact(const ScalarPoly& p);

// Parses expressions such as "1+s", "2*s^2 - 0.5 s", "S", "-3/2 s^3".
// The variable may be written s, S, f or x.
ScalarPoly parse_polynomial(const std::string& text);
std::string format_polynomial(const ScalarPoly& p, char var = 's');

}  // namespace reebflow
