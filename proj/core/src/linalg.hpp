#pragma once

// Small dense elimination shared by the circulation solver and polytope code.
// Works over mpq_class (exact) or double (partial pivoting).

#include "reebflow/scalar.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace reebflow::detail {

template <class T>
struct Field;

template <>
struct Field<Rational> {
    static constexpr bool exact = true;
    static bool zero(const Rational& x, double = 0) { return sgn(x) == 0; }
    static double mag(const Rational& x) { return std::fabs(x.get_d()); }
    static Rational from(const Scalar& s) { return s.to_rational(); }
    static Scalar to(const Rational& x) { return Scalar(x); }
};

template <>
struct Field<double> {
    static constexpr bool exact = false;
    static bool zero(double x, double eps) { return std::fabs(x) <= eps; }
    static double mag(double x) { return std::fabs(x); }
    static double from(const Scalar& s) { return s.to_double(); }
    static Scalar to(double x) { return Scalar(x); }
};

template <class T>
using Matrix = std::vector<std::vector<T>>;

template <class T>
struct Rref {
    Matrix<T> m;
    std::vector<std::size_t> pivots;  // pivot column of row r, r < rank
};

// Reduced row echelon form, pivoting only in the first `pivot_cols` columns
// (the remaining columns ride along, e.g. a right-hand side). For doubles,
// entries below eps * (largest entry) are treated as zero.
template <class T>
Rref<T> rref(Matrix<T> m, std::size_t pivot_cols, double rel_eps = 1e-12)
{
    Rref<T> out;
    const std::size_t rows = m.size();
    double scale = 0.0;
    for (const auto& row : m)
        for (std::size_t c = 0; c < pivot_cols && c < row.size(); ++c)
            scale = std::max(scale, Field<T>::mag(row[c]));
    const double eps = rel_eps * std::max(1.0, scale);
    std::size_t r = 0;
    for (std::size_t c = 0; c < pivot_cols && r < rows; ++c) {
        std::size_t best = rows;
        double best_mag = 0.0;
        for (std::size_t i = r; i < rows; ++i) {
            if (Field<T>::zero(m[i][c], eps))
                continue;
            if constexpr (Field<T>::exact) {
                best = i;
                break;
            } else {
                if (Field<T>::mag(m[i][c]) > best_mag) {
                    best_mag = Field<T>::mag(m[i][c]);
                    best = i;
                }
            }
        }
        if (best == rows)
            continue;
        std::swap(m[r], m[best]);
        T piv = m[r][c];
        for (auto& x : m[r])
            x /= piv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || Field<T>::zero(m[i][c], 0))
                continue;
            T factor = m[i][c];
            for (std::size_t k = 0; k < m[i].size(); ++k)
                m[i][k] -= factor * m[r][k];
            if constexpr (!Field<T>::exact)
                m[i][c] = 0;
        }
        out.pivots.push_back(c);
        ++r;
    }
    out.m = std::move(m);
    return out;
}

// Solves the square system A x = b; nullopt when singular.
template <class T>
std::optional<std::vector<T>> solve_square(const Matrix<T>& A, const std::vector<T>& b, double rel_eps = 1e-12)
{
    const std::size_t n = A.size();
    Matrix<T> aug(n);
    for (std::size_t i = 0; i < n; ++i) {
        aug[i] = A[i];
        aug[i].push_back(b[i]);
    }
    auto R = rref(std::move(aug), n, rel_eps);
    if (R.pivots.size() < n)
        return std::nullopt;
    std::vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[R.pivots[i]] = R.m[i][n];
    return x;
}

// Inverse of a square matrix; nullopt when singular.
template <class T>
std::optional<Matrix<T>> inverse(const Matrix<T>& A, double rel_eps = 1e-12)
{
    const std::size_t n = A.size();
    Matrix<T> aug(n);
    for (std::size_t i = 0; i < n; ++i) {
        aug[i] = A[i];
        for (std::size_t j = 0; j < n; ++j)
            aug[i].push_back(T(i == j ? 1 : 0));
    }
    auto R = rref(std::move(aug), n, rel_eps);
    if (R.pivots.size() < n)
        return std::nullopt;
    Matrix<T> inv(n, std::vector<T>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inv[R.pivots[i]][j] = R.m[i][n + j];
    return inv;
}

// Basis of the null space {x : A x = 0} for an r x n matrix.
template <class T>
Matrix<T> nullspace(const Matrix<T>& A, std::size_t n, double rel_eps = 1e-12)
{
    auto R = rref(A, n, rel_eps);
    std::vector<bool> is_pivot(n, false);
    for (auto p : R.pivots)
        is_pivot[p] = true;
    Matrix<T> basis;
    for (std::size_t j = 0; j < n; ++j) {
        if (is_pivot[j])
            continue;
        std::vector<T> v(n, T(0));
        v[j] = T(1);
        for (std::size_t r = 0; r < R.pivots.size(); ++r)
            v[R.pivots[r]] = -R.m[r][j];
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace reebflow::detail
