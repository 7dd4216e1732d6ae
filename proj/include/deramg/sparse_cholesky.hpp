// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_SPARSE_CHOLESKY_HPP
#define DERAMG_SPARSE_CHOLESKY_HPP

#include "deramg/sparse_matrix.hpp"

namespace deramg
{

/// Direct solver for SPD matrices: reverse Cuthill-McKee reordering plus an
/// envelope Cholesky factorization. Factor once, solve many times.
class SparseCholesky
{
public:
    enum class PivotPolicy
    {
        Strict,    // nonpositive pivot -> NotPositiveDefinite
        Completed  // nonpositive pivot -> unit-scale pivot, row decoupled
    };

    explicit SparseCholesky(const SparseMatrix& A,
                            PivotPolicy policy = PivotPolicy::Strict);

    Vector solve(const Vector& b) const;
    void solve(const double* b, double* x) const;

    int size() const { return n_; }

private:
    int n_ = 0;
    std::vector<int> perm_;     // new index -> old index
    std::vector<int> inv_perm_; // old index -> new index
    std::vector<int> first_;    // envelope start column per row
    std::vector<std::size_t> row_ptr_;
    std::vector<double> env_;   // L rows, columns first_[i]..i
};

/// Cholesky-based solve for SPD systems (relative residual <= 1e-12 for
/// reasonably conditioned inputs).
Vector sparse_direct_solve(const SparseMatrix& A, const Vector& b);

} // namespace deramg

#endif
