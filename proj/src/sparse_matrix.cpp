// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "deramg/kernels.hpp"

namespace deramg
{

SparseMatrix::SparseMatrix(int n_rows, int n_cols, std::vector<int> row_offsets,
                           std::vector<int> col_indices, std::vector<double> values)
    : n_rows_(n_rows), n_cols_(n_cols), row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)), values_(std::move(values))
{
    check_invariants();
}

void SparseMatrix::check_invariants() const
{
    DERAMG_REQUIRE(n_rows_ >= 0 && n_cols_ >= 0, DimensionMismatch,
                   "negative matrix dimension");
    DERAMG_REQUIRE(static_cast<int>(row_offsets_.size()) == n_rows_ + 1,
                   DimensionMismatch, "row offsets size mismatch");
    DERAMG_REQUIRE(row_offsets_.front() == 0 &&
                       row_offsets_.back() == static_cast<int>(values_.size()) &&
                       col_indices_.size() == values_.size(),
                   DimensionMismatch, "CSR arrays inconsistent");
    for (int i = 0; i < n_rows_; ++i)
    {
        DERAMG_REQUIRE(row_offsets_[i] <= row_offsets_[i + 1], DimensionMismatch,
                       "row offsets not monotone");
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
        {
            DERAMG_REQUIRE(col_indices_[k] >= 0 && col_indices_[k] < n_cols_,
                           DimensionMismatch, "column index out of range");
            if (k > row_offsets_[i])
                DERAMG_REQUIRE(col_indices_[k - 1] < col_indices_[k],
                               DimensionMismatch,
                               "column indices not strictly increasing");
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(
    int n_rows, int n_cols,
    std::span<const std::tuple<int, int, double>> triplets)
{
    std::vector<std::tuple<int, int, double>> t(triplets.begin(), triplets.end());
    std::stable_sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
        return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                                : std::get<1>(a) < std::get<1>(b);
    });

    std::vector<int> offsets(n_rows + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    cols.reserve(t.size());
    vals.reserve(t.size());

    std::size_t k = 0;
    for (int i = 0; i < n_rows; ++i)
    {
        while (k < t.size() && std::get<0>(t[k]) == i)
        {
            const int j = std::get<1>(t[k]);
            DERAMG_REQUIRE(j >= 0 && j < n_cols, DimensionMismatch,
                           "triplet column out of range");
            double v = 0.0;
            while (k < t.size() && std::get<0>(t[k]) == i && std::get<1>(t[k]) == j)
                v += std::get<2>(t[k++]);
            if (v != 0.0)
            {
                cols.push_back(j);
                vals.push_back(v);
            }
        }
        offsets[i + 1] = static_cast<int>(cols.size());
    }
    DERAMG_REQUIRE(k == t.size(), DimensionMismatch, "triplet row out of range");
    return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols),
                        std::move(vals));
}

SparseMatrix SparseMatrix::identity(int n)
{
    std::vector<int> offsets(n + 1), cols(n);
    std::vector<double> vals(n, 1.0);
    for (int i = 0; i <= n; ++i)
        offsets[i] = i;
    for (int i = 0; i < n; ++i)
        cols[i] = i;
    return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::diagonal(const Vector& d)
{
    const int n = static_cast<int>(d.size());
    std::vector<int> offsets(n + 1), cols(n);
    for (int i = 0; i <= n; ++i)
        offsets[i] = i;
    for (int i = 0; i < n; ++i)
        cols[i] = i;
    return SparseMatrix(n, n, std::move(offsets), std::move(cols), d);
}

double SparseMatrix::get(int i, int j) const
{
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j)
        return 0.0;
    return values_[row_offsets_[i] + (it - cols.begin())];
}

void SparseMatrix::mult(const double* x, double* y) const
{
    const auto& ops = kernels::active();
    for (int i = 0; i < n_rows_; ++i)
    {
        const int b = row_offsets_[i];
        y[i] = ops.gather_dot(col_indices_.data() + b, values_.data() + b,
                              static_cast<std::size_t>(row_offsets_[i + 1] - b), x);
    }
}

Vector SparseMatrix::mult(const Vector& x) const
{
    DERAMG_REQUIRE(static_cast<int>(x.size()) == n_cols_, DimensionMismatch,
                   "spmv: vector length does not match the column count");
    Vector y(n_rows_);
    mult(x.data(), y.data());
    return y;
}

void SparseMatrix::mult_transpose(const double* x, double* y) const
{
    std::fill(y, y + n_cols_, 0.0);
    for (int i = 0; i < n_rows_; ++i)
    {
        const double xi = x[i];
        if (xi == 0.0)
            continue;
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
            y[col_indices_[k]] += values_[k] * xi;
    }
}

Vector SparseMatrix::mult_transpose(const Vector& x) const
{
    DERAMG_REQUIRE(static_cast<int>(x.size()) == n_rows_, DimensionMismatch,
                   "transpose spmv: vector length does not match the row count");
    Vector y(n_cols_);
    mult_transpose(x.data(), y.data());
    return y;
}

Vector SparseMatrix::diagonal_vector() const
{
    Vector d(n_rows_, 0.0);
    for (int i = 0; i < std::min(n_rows_, n_cols_); ++i)
        d[i] = get(i, i);
    return d;
}

void SparseMatrix::scale(double a)
{
    kernels::scale(a, values_.data(), values_.size());
}

void SparseMatrix::zero_rows(const std::vector<unsigned char>& flag)
{
    for (int i = 0; i < n_rows_; ++i)
        if (flag[i])
            for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
                values_[k] = 0.0;
}

void SparseMatrix::zero_cols(const std::vector<unsigned char>& flag)
{
    for (std::size_t k = 0; k < values_.size(); ++k)
        if (flag[col_indices_[k]])
            values_[k] = 0.0;
}

SparseMatrix SparseMatrix::submatrix(const std::vector<int>& row_map, int n_sub_rows,
                                     const std::vector<int>& col_map,
                                     int n_sub_cols) const
{
    std::vector<std::tuple<int, int, double>> t;
    for (int i = 0; i < n_rows_; ++i)
    {
        if (row_map[i] < 0)
            continue;
        for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
            if (col_map[col_indices_[k]] >= 0 && values_[k] != 0.0)
                t.emplace_back(row_map[i], col_map[col_indices_[k]], values_[k]);
    }
    return from_triplets(n_sub_rows, n_sub_cols, t);
}

SparseMatrix transpose(const SparseMatrix& A)
{
    std::vector<int> offsets(A.n_cols_ + 1, 0);
    for (const int j : A.col_indices_)
        ++offsets[j + 1];
    for (int j = 0; j < A.n_cols_; ++j)
        offsets[j + 1] += offsets[j];

    std::vector<int> cols(A.values_.size());
    std::vector<double> vals(A.values_.size());
    std::vector<int> next(offsets.begin(), offsets.end() - 1);
    for (int i = 0; i < A.n_rows_; ++i)
        for (int k = A.row_offsets_[i]; k < A.row_offsets_[i + 1]; ++k)
        {
            const int pos = next[A.col_indices_[k]]++;
            cols[pos] = i;
            vals[pos] = A.values_[k];
        }
    return SparseMatrix(A.n_cols_, A.n_rows_, std::move(offsets), std::move(cols),
                        std::move(vals));
}

SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B)
{
    DERAMG_REQUIRE(A.n_cols_ == B.n_rows_, DimensionMismatch,
                   "matrix product dimension mismatch");
    const int m = A.n_rows_, n = B.n_cols_;
    std::vector<int> offsets(m + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;

    std::vector<double> acc(n, 0.0);
    std::vector<int> marker(n, -1);
    std::vector<int> row_cols;
    for (int i = 0; i < m; ++i)
    {
        row_cols.clear();
        for (int ka = A.row_offsets_[i]; ka < A.row_offsets_[i + 1]; ++ka)
        {
            const int j = A.col_indices_[ka];
            const double av = A.values_[ka];
            for (int kb = B.row_offsets_[j]; kb < B.row_offsets_[j + 1]; ++kb)
            {
                const int c = B.col_indices_[kb];
                if (marker[c] != i)
                {
                    marker[c] = i;
                    acc[c] = 0.0;
                    row_cols.push_back(c);
                }
                acc[c] += av * B.values_[kb];
            }
        }
        std::sort(row_cols.begin(), row_cols.end());
        for (const int c : row_cols)
            if (acc[c] != 0.0)
            {
                cols.push_back(c);
                vals.push_back(acc[c]);
            }
        offsets[i + 1] = static_cast<int>(cols.size());
    }
    return SparseMatrix(m, n, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix triple_product(const SparseMatrix& R, const SparseMatrix& A,
                            const SparseMatrix& P)
{
    return multiply(multiply(R, A), P);
}

SparseMatrix rap(const SparseMatrix& A, const SparseMatrix& P)
{
    SparseMatrix C = triple_product(transpose(P), A, P);
    // Galerkin products of symmetric A are symmetric up to rounding; make the
    // result exactly symmetric so PCG sees a symmetric operator.
    SparseMatrix Ct = transpose(C);
    SparseMatrix S = add(C, Ct);
    S.scale(0.5);
    return S;
}

SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B, double beta)
{
    DERAMG_REQUIRE(A.rows() == B.rows() && A.cols() == B.cols(), DimensionMismatch,
                   "matrix sum dimension mismatch");
    std::vector<int> offsets(A.rows() + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    for (int i = 0; i < A.rows(); ++i)
    {
        auto ca = A.row_cols(i);
        auto va = A.row_values(i);
        auto cb = B.row_cols(i);
        auto vb = B.row_values(i);
        std::size_t ka = 0, kb = 0;
        while (ka < ca.size() || kb < cb.size())
        {
            int c;
            double v;
            if (kb == cb.size() || (ka < ca.size() && ca[ka] < cb[kb]))
            {
                c = ca[ka];
                v = va[ka++];
            }
            else if (ka == ca.size() || cb[kb] < ca[ka])
            {
                c = cb[kb];
                v = beta * vb[kb++];
            }
            else
            {
                c = ca[ka];
                v = va[ka++] + beta * vb[kb++];
            }
            if (v != 0.0)
            {
                cols.push_back(c);
                vals.push_back(v);
            }
        }
        offsets[i + 1] = static_cast<int>(cols.size());
    }
    return SparseMatrix(A.rows(), A.cols(), std::move(offsets), std::move(cols),
                        std::move(vals));
}

double dot(const Vector& x, const Vector& y)
{
    DERAMG_REQUIRE(x.size() == y.size(), DimensionMismatch, "dot length mismatch");
    return kernels::dot(x.data(), y.data(), x.size());
}

double norm2(const Vector& x)
{
    return std::sqrt(dot(x, x));
}

void axpy(double a, const Vector& x, Vector& y)
{
    DERAMG_REQUIRE(x.size() == y.size(), DimensionMismatch, "axpy length mismatch");
    kernels::axpy(a, x.data(), y.data(), x.size());
}

Vector scaled(const Vector& x, double a)
{
    Vector y(x);
    kernels::scale(a, y.data(), y.size());
    return y;
}

} // namespace deramg
