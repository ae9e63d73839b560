#pragma once

// Dense two-phase tableau simplex with Bland's rule.
// maximize c·x  subject to  A x <= b,  x >= 0
// Exact over mpq_class; with doubles a fixed pivot tolerance is used.

#include "linalg.hpp"

#include <vector>

namespace reebflow::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <class T>
struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<T> x;
    T objective{};
};

template <class T>
class Simplex {
public:
    Simplex(const Matrix<T>& A, const std::vector<T>& b, const std::vector<T>& c, double eps = 1e-10)
        : n_(c.size()), m_(A.size()), eps_(eps)
    {
        // columns: [0,n) structural, [n, n+m) slacks, then artificials
        std::vector<std::size_t> art_rows;
        for (std::size_t i = 0; i < m_; ++i)
            if (lt(b[i], T(0)))
                art_rows.push_back(i);
        n_art_ = art_rows.size();
        cols_ = n_ + m_ + n_art_;
        t_.assign(m_, std::vector<T>(cols_ + 1, T(0)));
        basis_.assign(m_, 0);
        std::size_t next_art = n_ + m_;
        for (std::size_t i = 0; i < m_; ++i) {
            bool flip = lt(b[i], T(0));
            T s = flip ? T(-1) : T(1);
            for (std::size_t j = 0; j < n_; ++j)
                t_[i][j] = s * A[i][j];
            t_[i][n_ + i] = s;
            t_[i][cols_] = s * b[i];
            if (flip) {
                t_[i][next_art] = T(1);
                basis_[i] = next_art++;
            } else {
                basis_[i] = n_ + i;
            }
        }
        c_ = c;
    }

    LpResult<T> solve()
    {
        LpResult<T> res;
        if (n_art_ > 0) {
            std::vector<T> phase1(cols_, T(0));
            for (std::size_t j = n_ + m_; j < cols_; ++j)
                phase1[j] = T(-1);
            if (!run(phase1, cols_))
                return res;  // cannot be unbounded; treat as failure
            T val = objective(phase1);
            if (lt(val, T(0)))
                return res;
            // drive artificials out of the basis
            for (std::size_t i = 0; i < m_; ++i) {
                if (basis_[i] < n_ + m_)
                    continue;
                for (std::size_t j = 0; j < n_ + m_; ++j)
                    if (!Field<T>::zero(t_[i][j], eps_)) {
                        pivot(i, j);
                        break;
                    }
            }
        }
        std::vector<T> full(cols_, T(0));
        for (std::size_t j = 0; j < n_; ++j)
            full[j] = c_[j];
        if (!run(full, n_ + m_)) {
            res.status = LpStatus::Unbounded;
            return res;
        }
        res.status = LpStatus::Optimal;
        res.x.assign(n_, T(0));
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_)
                res.x[basis_[i]] = t_[i][cols_];
        res.objective = objective(full);
        return res;
    }

private:
    bool lt(const T& a, const T& b) const
    {
        if constexpr (Field<T>::exact)
            return a < b;
        else
            return a < b - eps_;
    }
    bool positive(const T& a) const
    {
        if constexpr (Field<T>::exact)
            return sgn(a) > 0;
        else
            return a > eps_;
    }

    T objective(const std::vector<T>& c) const
    {
        T v(0);
        for (std::size_t i = 0; i < m_; ++i)
            v += c[basis_[i]] * t_[i][cols_];
        return v;
    }

    void pivot(std::size_t r, std::size_t col)
    {
        T p = t_[r][col];
        for (auto& x : t_[r])
            x /= p;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || Field<T>::zero(t_[i][col], 0))
                continue;
            T f = t_[i][col];
            for (std::size_t j = 0; j <= cols_; ++j)
                t_[i][j] -= f * t_[r][j];
        }
        basis_[r] = col;
    }

    // Optimizes over columns [0, allowed). Returns false when unbounded.
    bool run(const std::vector<T>& c, std::size_t allowed)
    {
        for (;;) {
            // reduced cost c_j - c_B B^-1 A_j, Bland: smallest improving index
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                T z(0);
                for (std::size_t i = 0; i < m_; ++i)
                    if (!Field<T>::zero(t_[i][j], 0))
                        z += c[basis_[i]] * t_[i][j];
                if (positive(T(c[j] - z))) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed)
                return true;
            std::size_t leave = m_;
            T best(0);
            for (std::size_t i = 0; i < m_; ++i) {
                if (!positive(t_[i][enter]))
                    continue;
                T ratio = t_[i][cols_] / t_[i][enter];
                if (leave == m_ || lt(ratio, best)
                    || (!lt(best, ratio) && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_)
                return false;
            pivot(leave, enter);
        }
    }

    std::size_t n_, m_, n_art_ = 0, cols_ = 0;
    double eps_;
    Matrix<T> t_;
    std::vector<std::size_t> basis_;
    std::vector<T> c_;
};

}  // namespace reebflow::detail
