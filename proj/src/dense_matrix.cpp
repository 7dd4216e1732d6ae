// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/dense_matrix.hpp"

#include <cmath>

namespace deramg
{

DenseMatrix DenseMatrix::transposed() const
{
    DenseMatrix T(n_cols_, n_rows_);
    for (int i = 0; i < n_rows_; ++i)
        for (int j = 0; j < n_cols_; ++j)
            T(j, i) = (*this)(i, j);
    return T;
}

Vector DenseMatrix::mult(const Vector& x) const
{
    DERAMG_REQUIRE(static_cast<int>(x.size()) == n_cols_, DimensionMismatch,
                   "dense mult dimension mismatch");
    Vector y(n_rows_, 0.0);
    for (int i = 0; i < n_rows_; ++i)
    {
        double s = 0.0;
        for (int j = 0; j < n_cols_; ++j)
            s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vector DenseMatrix::mult_transpose(const Vector& x) const
{
    DERAMG_REQUIRE(static_cast<int>(x.size()) == n_rows_, DimensionMismatch,
                   "dense mult_transpose dimension mismatch");
    Vector y(n_cols_, 0.0);
    for (int i = 0; i < n_rows_; ++i)
        for (int j = 0; j < n_cols_; ++j)
            y[j] += (*this)(i, j) * x[i];
    return y;
}

DenseMatrix DenseMatrix::mult(const DenseMatrix& B) const
{
    DERAMG_REQUIRE(n_cols_ == B.rows(), DimensionMismatch,
                   "dense product dimension mismatch");
    DenseMatrix C(n_rows_, B.cols());
    for (int i = 0; i < n_rows_; ++i)
        for (int k = 0; k < n_cols_; ++k)
        {
            const double a = (*this)(i, k);
            if (a == 0.0)
                continue;
            for (int j = 0; j < B.cols(); ++j)
                C(i, j) += a * B(k, j);
        }
    return C;
}

Vector DenseMatrix::column(int j) const
{
    Vector c(n_rows_);
    for (int i = 0; i < n_rows_; ++i)
        c[i] = (*this)(i, j);
    return c;
}

void DenseMatrix::set_column(int j, const Vector& c)
{
    DERAMG_REQUIRE(static_cast<int>(c.size()) == n_rows_, DimensionMismatch,
                   "column length mismatch");
    for (int i = 0; i < n_rows_; ++i)
        (*this)(i, j) = c[i];
}

double DenseMatrix::frobenius_norm() const
{
    double s = 0.0;
    for (const double v : values_)
        s += v * v;
    return std::sqrt(s);
}

DenseMatrix DenseMatrix::identity(int n)
{
    DenseMatrix I(n, n);
    for (int i = 0; i < n; ++i)
        I(i, i) = 1.0;
    return I;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& A)
{
    DenseMatrix M(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
    {
        auto cols = A.row_cols(i);
        auto vals = A.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            M(i, cols[k]) = vals[k];
    }
    return M;
}

LuFactors::LuFactors(DenseMatrix M, int context_entity)
    : n_(M.rows()), lu_(std::move(M)), perm_(n_)
{
    DERAMG_REQUIRE(lu_.rows() == lu_.cols(), DimensionMismatch,
                   "LU factorization needs a square matrix");
    const double pivot_floor = 1e-14 * lu_.frobenius_norm();
    for (int i = 0; i < n_; ++i)
        perm_[i] = i;
    for (int k = 0; k < n_; ++k)
    {
        int p = k;
        double best = std::abs(lu_(k, k));
        for (int i = k + 1; i < n_; ++i)
            if (std::abs(lu_(i, k)) > best)
            {
                best = std::abs(lu_(i, k));
                p = i;
            }
        if (best <= pivot_floor)
            throw SingularLocalSystem("pivot below tolerance in local solve",
                                      context_entity);
        if (p != k)
        {
            for (int j = 0; j < n_; ++j)
                std::swap(lu_(k, j), lu_(p, j));
            std::swap(perm_[k], perm_[p]);
        }
        const double inv = 1.0 / lu_(k, k);
        for (int i = k + 1; i < n_; ++i)
        {
            const double l = lu_(i, k) * inv;
            lu_(i, k) = l;
            if (l == 0.0)
                continue;
            for (int j = k + 1; j < n_; ++j)
                lu_(i, j) -= l * lu_(k, j);
        }
    }
}

void LuFactors::solve_inplace(Vector& b) const
{
    DERAMG_REQUIRE(static_cast<int>(b.size()) == n_, DimensionMismatch,
                   "LU solve dimension mismatch");
    Vector x(n_);
    for (int i = 0; i < n_; ++i)
        x[i] = b[perm_[i]];
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < i; ++j)
            x[i] -= lu_(i, j) * x[j];
    for (int i = n_ - 1; i >= 0; --i)
    {
        for (int j = i + 1; j < n_; ++j)
            x[i] -= lu_(i, j) * x[j];
        x[i] /= lu_(i, i);
    }
    b = std::move(x);
}

Vector LuFactors::solve(const Vector& b) const
{
    Vector x(b);
    solve_inplace(x);
    return x;
}

Vector dense_solve(const DenseMatrix& M, const Vector& b)
{
    return LuFactors(M).solve(b);
}

} // namespace deramg
