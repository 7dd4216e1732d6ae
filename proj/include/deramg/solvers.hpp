// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_SOLVERS_HPP
#define DERAMG_SOLVERS_HPP

#include <memory>

#include "deramg/hierarchy.hpp"
#include "deramg/smoothers.hpp"
#include "deramg/sparse_cholesky.hpp"

namespace deramg
{

/// Square linear operator y = Op(x); preconditioners implement this as
/// the action of B^{-1}.
class LinOp
{
public:
    virtual ~LinOp() = default;
    virtual int size() const = 0;
    virtual void apply(const Vector& x, Vector& y) const = 0;

    Vector apply(const Vector& x) const
    {
        Vector y(size());
        apply(x, y);
        return y;
    }
};

class MatrixOperator : public LinOp
{
public:
    using LinOp::apply;
    explicit MatrixOperator(const SparseMatrix& A) : A_(A) {}
    int size() const override { return A_.rows(); }
    void apply(const Vector& x, Vector& y) const override
    {
        A_.mult(x.data(), y.data());
    }

private:
    const SparseMatrix& A_;
};

class IdentityOperator : public LinOp
{
public:
    using LinOp::apply;
    explicit IdentityOperator(int n) : n_(n) {}
    int size() const override { return n_; }
    void apply(const Vector& x, Vector& y) const override { y = x; }

private:
    int n_;
};

class DirectSolverOperator : public LinOp
{
public:
    using LinOp::apply;
    explicit DirectSolverOperator(const SparseMatrix& A,
                                  SparseCholesky::PivotPolicy policy =
                                      SparseCholesky::PivotPolicy::Strict)
        : chol_(A, policy)
    {}
    int size() const override { return chol_.size(); }
    void apply(const Vector& x, Vector& y) const override
    {
        chol_.solve(x.data(), y.data());
    }

private:
    SparseCholesky chol_;
};

/// Preconditioner application of a smoother (correction from a zero
/// iterate).
class SmootherOperator : public LinOp
{
public:
    using LinOp::apply;
    explicit SmootherOperator(std::shared_ptr<const Smoother> s)
        : s_(std::move(s))
    {}
    int size() const override { return s_->size(); }
    void apply(const Vector& r, Vector& y) const override
    {
        y.assign(size(), 0.0);
        s_->relax(r, y);
    }

private:
    std::shared_ptr<const Smoother> s_;
};

struct PcgResult
{
    Vector x;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residuals; // preconditioner-norm residual history
};

/// Preconditioned conjugate gradients with the stopping rule
/// sqrt(r^T B^{-1} r) <= rel_tol * sqrt(r0^T B^{-1} r0).
PcgResult pcg(const LinOp& A, const LinOp& B, const Vector& b,
              double rel_tol = 1e-6, int max_iterations = 1000,
              const Vector* x0 = nullptr);

/// Fixed-iteration PCG used as an (inexact) coarse solver operator.
class PcgOperator : public LinOp
{
public:
    using LinOp::apply;
    PcgOperator(std::shared_ptr<const LinOp> A, std::shared_ptr<const LinOp> B,
                double rel_tol, int max_iterations)
        : A_(std::move(A)), B_(std::move(B)), rel_tol_(rel_tol),
          max_it_(max_iterations)
    {}
    int size() const override { return A_->size(); }
    void apply(const Vector& r, Vector& y) const override
    {
        y = pcg(*A_, *B_, r, rel_tol_, max_it_).x;
    }

private:
    std::shared_ptr<const LinOp> A_;
    std::shared_ptr<const LinOp> B_;
    double rel_tol_;
    int max_it_;
};

/// Additive auxiliary-space preconditioner
///   B^{-1} = M^{-1} + Pihat B_H1^{-1} Pihat^T + D B_prev^{-1} D^T
/// with direct solves behind the nodal and kernel blocks; the kernel block
/// of an H(div) operator is itself an auxiliary-space preconditioner for
/// the induced (singular) H(curl) form, whose factorizations use pivot
/// completion.
class AuxSpacePreconditioner : public LinOp
{
public:
    using LinOp::apply;
    /// form_space selects the nesting depth (kHdiv nests one kHcurl block)
    AuxSpacePreconditioner(const SparseMatrix& A, int form_space,
                           const SparseMatrix& nodal_interp,
                           const SparseMatrix& kernel_transfer,
                           const SparseMatrix& nodal_interp_prev,
                           const SparseMatrix& kernel_transfer_prev,
                           int sweeps = 2);

    int size() const override { return A_->rows(); }
    void apply(const Vector& r, Vector& y) const override;

private:
    const SparseMatrix* A_;
    SparseMatrix pihat_;
    SparseMatrix transfer_;
    std::unique_ptr<L1SgsSmoother> smoother_;
    std::unique_ptr<SparseCholesky> nodal_solve_;
    SparseMatrix A_prev_;
    std::unique_ptr<LinOp> kernel_solve_;
};

/// Multilevel V-cycle preconditioner over a hierarchy: pre-relaxation with
/// M_l, recursion (or the coarse solver) on the restricted residual,
/// post-relaxation with M_l^T.
class VCyclePreconditioner : public LinOp
{
public:
    using LinOp::apply;
    VCyclePreconditioner(const Hierarchy& h,
                         std::vector<std::shared_ptr<const Smoother>> smoothers,
                         std::shared_ptr<const LinOp> coarse_solver,
                         int n_levels = 0);

    int size() const override { return h_.system(0).rows(); }
    void apply(const Vector& b, Vector& y) const override;

    /// one multigrid iterate x_ML = x0 + B^{-1}(b - A x0) from level l
    Vector iterate(const Vector& b, const Vector& x0, int l = 0) const;

private:
    const Hierarchy& h_;
    std::vector<std::shared_ptr<const Smoother>> smoothers_;
    std::shared_ptr<const LinOp> coarse_;
    int levels_;
};

enum class CoarseSolverKind
{
    Direct,
    AuxPcg // fixed-count PCG preconditioned by the auxiliary-space operator
};

/// Coarsest-level solver factory over the hierarchy data.
std::unique_ptr<LinOp> make_coarse_solver(const Hierarchy& h,
                                          CoarseSolverKind kind,
                                          int pcg_iterations = 5,
                                          int sweeps = 2);

/// Default AMGe preconditioner: V-cycle with hybrid smoothers on every
/// level and the requested coarse solver.
std::unique_ptr<LinOp> make_amge_preconditioner(
    const Hierarchy& h, int sweeps = 2,
    CoarseSolverKind coarse = CoarseSolverKind::AuxPcg, int coarse_pcg = 5);

} // namespace deramg

#endif
