// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_SMOOTHERS_HPP
#define DERAMG_SMOOTHERS_HPP

#include <memory>

#include "deramg/sparse_matrix.hpp"

namespace deramg
{

/// Relaxation bound to a matrix: x <- x + M^{-1}(b - A x). The transposed
/// leg is what the post-relaxation of the V-cycle applies.
class Smoother
{
public:
    virtual ~Smoother() = default;
    virtual void relax(const Vector& b, Vector& x) const = 0;
    virtual void relax_transpose(const Vector& b, Vector& x) const = 0;
    virtual int size() const = 0;

    /// correction M^{-1} r from a zero initial iterate
    Vector correction(const Vector& r) const
    {
        Vector x(size(), 0.0);
        relax(r, x);
        return x;
    }
};

/// Damped point Jacobi.
class JacobiSmoother : public Smoother
{
public:
    JacobiSmoother(const SparseMatrix& A, int sweeps = 1, double damping = 1.0);
    void relax(const Vector& b, Vector& x) const override;
    void relax_transpose(const Vector& b, Vector& x) const override
    {
        relax(b, x);
    }
    int size() const override { return A_.rows(); }

private:
    const SparseMatrix& A_;
    Vector inv_diag_;
    int sweeps_;
    double damping_;
};

/// l1-scaled symmetric Gauss-Seidel: forward then backward sweep with the
/// diagonal replaced by d_i = a_ii + sum_{j != i} |a_ij|. Self-adjoint.
class L1SgsSmoother : public Smoother
{
public:
    explicit L1SgsSmoother(const SparseMatrix& A, int sweeps = 1);
    void relax(const Vector& b, Vector& x) const override;
    void relax_transpose(const Vector& b, Vector& x) const override
    {
        relax(b, x);
    }
    int size() const override { return A_.rows(); }

private:
    const SparseMatrix& A_;
    Vector l1_diag_;
    int sweeps_;
};

/// Hybrid (Hiptmair) smoother: a primary sweep on A followed by a kernel
/// sweep through the previous space of the sequence,
///   x1 = x12 + D M_aux^{-1} D^T (b - A x12).
/// The transposed application reverses the two legs.
class HybridSmoother : public Smoother
{
public:
    /// transfer = D_{s-1} restricted to the solver dofs
    HybridSmoother(const SparseMatrix& A, SparseMatrix transfer, int sweeps = 1);
    void relax(const Vector& b, Vector& x) const override;
    void relax_transpose(const Vector& b, Vector& x) const override;
    int size() const override { return A_.rows(); }

    const SparseMatrix& auxiliary_matrix() const { return A_aux_; }

private:
    void kernel_leg(const Vector& b, Vector& x) const;

    const SparseMatrix& A_;
    SparseMatrix transfer_;
    SparseMatrix A_aux_;
    std::unique_ptr<L1SgsSmoother> primary_;
    std::unique_ptr<L1SgsSmoother> aux_;
};

/// One application of the l1-scaled symmetric Gauss-Seidel correction with
/// a zero initial iterate.
Vector l1_sgs_apply(const SparseMatrix& A, const Vector& r, int sweeps = 1);

/// Unit diagonal on exactly-zero diagonal rows (inert dofs of auxiliary
/// Galerkin matrices).
SparseMatrix with_unit_diagonal_where_zero(const SparseMatrix& A);

} // namespace deramg

#endif
