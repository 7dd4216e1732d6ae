// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/smoothers.hpp"

#include <cmath>

namespace deramg
{

JacobiSmoother::JacobiSmoother(const SparseMatrix& A, int sweeps, double damping)
    : A_(A), inv_diag_(A.rows()), sweeps_(sweeps), damping_(damping)
{
    const Vector d = A.diagonal_vector();
    for (int i = 0; i < A.rows(); ++i)
    {
        DERAMG_REQUIRE(d[i] != 0.0, ZeroDiagonal,
                       "zero diagonal at row " + std::to_string(i));
        inv_diag_[i] = 1.0 / d[i];
    }
}

void JacobiSmoother::relax(const Vector& b, Vector& x) const
{
    Vector r(size());
    for (int sweep = 0; sweep < sweeps_; ++sweep)
    {
        A_.mult(x.data(), r.data());
        for (int i = 0; i < size(); ++i)
            x[i] += damping_ * inv_diag_[i] * (b[i] - r[i]);
    }
}

L1SgsSmoother::L1SgsSmoother(const SparseMatrix& A, int sweeps)
    : A_(A), l1_diag_(A.rows()), sweeps_(sweeps)
{
    for (int i = 0; i < A.rows(); ++i)
    {
        auto cols = A.row_cols(i);
        auto vals = A.row_values(i);
        double d = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k)
            d += cols[k] == i ? vals[k] : std::abs(vals[k]);
        DERAMG_REQUIRE(d > 0.0, ZeroDiagonal,
                       "vanishing l1 diagonal at row " + std::to_string(i));
        l1_diag_[i] = d;
    }
}

void L1SgsSmoother::relax(const Vector& b, Vector& x) const
{
    const int n = size();
    for (int sweep = 0; sweep < sweeps_; ++sweep)
    {
        for (int i = 0; i < n; ++i)
        {
            double r = b[i];
            auto cols = A_.row_cols(i);
            auto vals = A_.row_values(i);
            for (std::size_t k = 0; k < cols.size(); ++k)
                r -= vals[k] * x[cols[k]];
            x[i] += r / l1_diag_[i];
        }
        for (int i = n - 1; i >= 0; --i)
        {
            double r = b[i];
            auto cols = A_.row_cols(i);
            auto vals = A_.row_values(i);
            for (std::size_t k = 0; k < cols.size(); ++k)
                r -= vals[k] * x[cols[k]];
            x[i] += r / l1_diag_[i];
        }
    }
}

HybridSmoother::HybridSmoother(const SparseMatrix& A, SparseMatrix transfer,
                               int sweeps)
    : A_(A), transfer_(std::move(transfer))
{
    DERAMG_REQUIRE(transfer_.rows() == A.rows(), DimensionMismatch,
                   "transfer operator does not match the system");
    A_aux_ = with_unit_diagonal_where_zero(rap(A_, transfer_));
    primary_ = std::make_unique<L1SgsSmoother>(A_, sweeps);
    aux_ = std::make_unique<L1SgsSmoother>(A_aux_, sweeps);
}

void HybridSmoother::kernel_leg(const Vector& b, Vector& x) const
{
    Vector r(size());
    A_.mult(x.data(), r.data());
    for (int i = 0; i < size(); ++i)
        r[i] = b[i] - r[i];
    const Vector raux = transfer_.mult_transpose(r);
    Vector caux(transfer_.cols(), 0.0);
    aux_->relax(raux, caux);
    const Vector c = transfer_.mult(caux);
    axpy(1.0, c, x);
}

void HybridSmoother::relax(const Vector& b, Vector& x) const
{
    primary_->relax(b, x);
    kernel_leg(b, x);
}

void HybridSmoother::relax_transpose(const Vector& b, Vector& x) const
{
    kernel_leg(b, x);
    primary_->relax(b, x);
}

Vector l1_sgs_apply(const SparseMatrix& A, const Vector& r, int sweeps)
{
    return L1SgsSmoother(A, sweeps).correction(r);
}

SparseMatrix with_unit_diagonal_where_zero(const SparseMatrix& A)
{
    const Vector d = A.diagonal_vector();
    std::vector<std::tuple<int, int, double>> fix;
    for (int i = 0; i < A.rows(); ++i)
        if (d[i] == 0.0)
            fix.emplace_back(i, i, 1.0);
    if (fix.empty())
        return A;
    return add(A, SparseMatrix::from_triplets(A.rows(), A.cols(), fix));
}

} // namespace deramg
