// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_SPARSE_MATRIX_HPP
#define DERAMG_SPARSE_MATRIX_HPP

#include <span>
#include <tuple>
#include <vector>

#include "deramg/errors.hpp"

namespace deramg
{

using Vector = std::vector<double>;

/// Compressed sparse row matrix with strictly increasing column indices in
/// every row and no duplicate entries. All products traverse rows in
/// ascending column order, so single-threaded runs are reproducible.
class SparseMatrix
{
public:
    SparseMatrix() = default;

    SparseMatrix(int n_rows, int n_cols, std::vector<int> row_offsets,
                 std::vector<int> col_indices, std::vector<double> values);

    /// Assemble from (row, col, value) triplets; duplicates are summed and
    /// exact zeros dropped.
    static SparseMatrix from_triplets(
        int n_rows, int n_cols,
        std::span<const std::tuple<int, int, double>> triplets);

    static SparseMatrix identity(int n);
    static SparseMatrix diagonal(const Vector& d);
    static SparseMatrix zero(int n_rows, int n_cols) { return SparseMatrix(n_rows, n_cols, std::vector<int>(n_rows + 1, 0), {}, {}); }

    int rows() const { return n_rows_; }
    int cols() const { return n_cols_; }
    int nnz() const { return static_cast<int>(values_.size()); }

    const std::vector<int>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    std::span<const int> row_cols(int i) const
    {
        return {col_indices_.data() + row_offsets_[i],
                static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i])};
    }
    std::span<const double> row_values(int i) const
    {
        return {values_.data() + row_offsets_[i],
                static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i])};
    }
    std::span<double> row_values(int i)
    {
        return {values_.data() + row_offsets_[i],
                static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i])};
    }

    double get(int i, int j) const;

    Vector mult(const Vector& x) const;
    void mult(const double* x, double* y) const;
    Vector mult_transpose(const Vector& x) const;
    void mult_transpose(const double* x, double* y) const;

    Vector diagonal_vector() const;

    /// Scales all stored values in place.
    void scale(double a);

    /// Zeroes the stored entries of the given rows (pattern kept).
    void zero_rows(const std::vector<unsigned char>& flag);
    void zero_cols(const std::vector<unsigned char>& flag);

    /// Extract the submatrix on the given (ascending-mapped) index sets.
    /// row_map/col_map map global indices to local ones, -1 elsewhere.
    SparseMatrix submatrix(const std::vector<int>& row_map, int n_sub_rows,
                           const std::vector<int>& col_map, int n_sub_cols) const;

    void check_invariants() const;

    friend SparseMatrix transpose(const SparseMatrix& A);
    friend SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B);

private:
    int n_rows_ = 0;
    int n_cols_ = 0;
    std::vector<int> row_offsets_ = {0};
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

SparseMatrix transpose(const SparseMatrix& A);
SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B);

/// R*A*P with exact-zero entries dropped.
SparseMatrix triple_product(const SparseMatrix& R, const SparseMatrix& A,
                            const SparseMatrix& P);

/// P^T*A*P; preserves symmetry of A exactly by symmetrizing rounding noise.
SparseMatrix rap(const SparseMatrix& A, const SparseMatrix& P);

SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B, double beta = 1.0);

// Small dense-free vector helpers used throughout the solvers.
double dot(const Vector& x, const Vector& y);
double norm2(const Vector& x);
void axpy(double a, const Vector& x, Vector& y);
Vector scaled(const Vector& x, double a);

} // namespace deramg

#endif
