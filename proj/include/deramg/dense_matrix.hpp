// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_DENSE_MATRIX_HPP
#define DERAMG_DENSE_MATRIX_HPP

#include <vector>

#include "deramg/errors.hpp"
#include "deramg/sparse_matrix.hpp"

namespace deramg
{

/// Small row-major dense matrix for agglomerate-local systems.
class DenseMatrix
{
public:
    DenseMatrix() = default;
    DenseMatrix(int n_rows, int n_cols)
        : n_rows_(n_rows), n_cols_(n_cols),
          values_(static_cast<std::size_t>(n_rows) * n_cols, 0.0)
    {}

    int rows() const { return n_rows_; }
    int cols() const { return n_cols_; }

    double& operator()(int i, int j) { return values_[std::size_t(i) * n_cols_ + j]; }
    double operator()(int i, int j) const
    {
        return values_[std::size_t(i) * n_cols_ + j];
    }

    const std::vector<double>& data() const { return values_; }
    std::vector<double>& data() { return values_; }

    DenseMatrix transposed() const;
    Vector mult(const Vector& x) const;
    Vector mult_transpose(const Vector& x) const;
    DenseMatrix mult(const DenseMatrix& B) const;

    Vector column(int j) const;
    void set_column(int j, const Vector& c);

    double frobenius_norm() const;

    static DenseMatrix identity(int n);
    static DenseMatrix from_sparse(const SparseMatrix& A);

private:
    int n_rows_ = 0;
    int n_cols_ = 0;
    std::vector<double> values_;
};

/// LU factorization with partial pivoting, reusable for many right-hand
/// sides. Throws SingularLocalSystem when a pivot falls below
/// 1e-14 * frobenius_norm of the input.
class LuFactors
{
public:
    explicit LuFactors(DenseMatrix M, int context_entity = -1);

    Vector solve(const Vector& b) const;
    void solve_inplace(Vector& b) const;

    int size() const { return n_; }

private:
    int n_ = 0;
    DenseMatrix lu_;
    std::vector<int> perm_;
};

/// Single-shot solve with the residual contract of the local solvers.
Vector dense_solve(const DenseMatrix& M, const Vector& b);

} // namespace deramg

#endif
