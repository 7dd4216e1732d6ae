// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/solvers.hpp"

#include <cmath>

namespace deramg
{

PcgResult pcg(const LinOp& A, const LinOp& B, const Vector& b, double rel_tol,
              int max_iterations, const Vector* x0)
{
    const int n = A.size();
    DERAMG_REQUIRE(static_cast<int>(b.size()) == n, DimensionMismatch,
                   "pcg right-hand side size mismatch");
    PcgResult out;
    out.x = x0 ? *x0 : Vector(n, 0.0);

    Vector r(n);
    A.apply(out.x, r);
    for (int i = 0; i < n; ++i)
        r[i] = b[i] - r[i];

    Vector z = B.apply(r);
    double rho = dot(r, z);
    if (rho < 0.0)
        throw IndefinitePreconditioner("negative preconditioned inner product");
    const double rho0 = rho;
    out.residuals.push_back(std::sqrt(std::max(rho, 0.0)));
    if (rho0 == 0.0 || std::sqrt(rho) <= rel_tol * std::sqrt(rho0))
    {
        out.converged = true;
        return out;
    }

    Vector p = z;
    Vector Ap(n);
    for (int it = 1; it <= max_iterations; ++it)
    {
        A.apply(p, Ap);
        const double pAp = dot(p, Ap);
        DERAMG_REQUIRE(pAp > 0.0, NotPositiveDefinite,
                       "system matrix is not positive definite in pcg");
        const double alpha = rho / pAp;
        axpy(alpha, p, out.x);
        axpy(-alpha, Ap, r);

        B.apply(r, z);
        const double rho_new = dot(r, z);
        if (rho_new < -1e-14 * rho0)
            throw IndefinitePreconditioner(
                "negative preconditioned inner product");
        out.iterations = it;
        out.residuals.push_back(std::sqrt(std::max(rho_new, 0.0)));
        if (std::sqrt(std::max(rho_new, 0.0)) <= rel_tol * std::sqrt(rho0))
        {
            out.converged = true;
            return out;
        }
        const double beta = rho_new / rho;
        rho = rho_new;
        for (int i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    return out; // best iterate, converged = false
}

AuxSpacePreconditioner::AuxSpacePreconditioner(const SparseMatrix& A,
                                               int form_space,
                                               const SparseMatrix& nodal_interp,
                                               const SparseMatrix& kernel_transfer,
                                               const SparseMatrix& nodal_interp_prev,
                                               const SparseMatrix& kernel_transfer_prev,
                                               int sweeps)
    : A_(&A), pihat_(nodal_interp), transfer_(kernel_transfer)
{
    smoother_ = std::make_unique<L1SgsSmoother>(A, sweeps);

    const SparseMatrix A_nodal =
        with_unit_diagonal_where_zero(rap(A, pihat_));
    nodal_solve_ = std::make_unique<SparseCholesky>(
        A_nodal, SparseCholesky::PivotPolicy::Completed);

    A_prev_ = with_unit_diagonal_where_zero(rap(A, transfer_));
    if (form_space == kHdiv)
    {
        // the kernel block is an (essentially singular) H(curl) operator:
        // precondition it with one more auxiliary-space level
        kernel_solve_ = std::make_unique<AuxSpacePreconditioner>(
            A_prev_, kHcurl, nodal_interp_prev, kernel_transfer_prev,
            SparseMatrix(), SparseMatrix(), sweeps);
    }
    else
    {
        kernel_solve_ = std::make_unique<DirectSolverOperator>(
            A_prev_, SparseCholesky::PivotPolicy::Completed);
    }
}

void AuxSpacePreconditioner::apply(const Vector& r, Vector& y) const
{
    y.assign(size(), 0.0);
    smoother_->relax(r, y);

    const Vector rn = pihat_.mult_transpose(r);
    Vector zn(pihat_.cols());
    nodal_solve_->solve(rn.data(), zn.data());
    axpy(1.0, pihat_.mult(zn), y);

    const Vector rk = transfer_.mult_transpose(r);
    Vector zk(transfer_.cols());
    kernel_solve_->apply(rk, zk);
    axpy(1.0, transfer_.mult(zk), y);
}

VCyclePreconditioner::VCyclePreconditioner(
    const Hierarchy& h, std::vector<std::shared_ptr<const Smoother>> smoothers,
    std::shared_ptr<const LinOp> coarse_solver, int n_levels)
    : h_(h), smoothers_(std::move(smoothers)), coarse_(std::move(coarse_solver)),
      levels_(n_levels > 0 ? n_levels : h.n_levels())
{
    DERAMG_REQUIRE(levels_ >= 1 && levels_ <= h.n_levels(), Error,
                   "invalid level count for the V-cycle");
    DERAMG_REQUIRE(static_cast<int>(smoothers_.size()) >= levels_ - 1, Error,
                   "one smoother per non-coarsest level required");
    DERAMG_REQUIRE(coarse_ && coarse_->size() ==
                       (levels_ == 1 ? h.system(0).rows()
                                     : h.system(levels_ - 1).rows()),
                   DimensionMismatch, "coarse solver has the wrong size");
}

Vector VCyclePreconditioner::iterate(const Vector& b, const Vector& x0,
                                     int l) const
{
    const SparseMatrix& A = h_.system(l);
    if (l == levels_ - 1)
    {
        // coarsest level: apply the designated solver to the residual
        Vector r(A.rows());
        A.mult(x0.data(), r.data());
        for (int i = 0; i < A.rows(); ++i)
            r[i] = b[i] - r[i];
        Vector e(A.rows());
        coarse_->apply(r, e);
        Vector x = x0;
        axpy(1.0, e, x);
        return x;
    }

    Vector x = x0;
    smoothers_[l]->relax(b, x);

    Vector r(A.rows());
    A.mult(x.data(), r.data());
    for (int i = 0; i < A.rows(); ++i)
        r[i] = b[i] - r[i];
    const Vector rc = h_.prolongator(l).mult_transpose(r);
    const Vector ec =
        iterate(rc, Vector(h_.system(l + 1).rows(), 0.0), l + 1);
    axpy(1.0, h_.prolongator(l).mult(ec), x);

    smoothers_[l]->relax_transpose(b, x);
    return x;
}

void VCyclePreconditioner::apply(const Vector& b, Vector& y) const
{
    y = iterate(b, Vector(size(), 0.0), 0);
}

std::unique_ptr<LinOp> make_coarse_solver(const Hierarchy& h,
                                          CoarseSolverKind kind,
                                          int pcg_iterations, int sweeps)
{
    const int l = h.n_levels() - 1;
    const SparseMatrix& A = h.system(l);
    if (kind == CoarseSolverKind::Direct)
        return std::make_unique<DirectSolverOperator>(A);

    auto prec = std::make_shared<AuxSpacePreconditioner>(
        A, h.form(), h.nodal_interp(l), h.kernel_transfer(l),
        h.nodal_interp_prev(l), h.kernel_transfer_prev(l), sweeps);
    auto aop = std::make_shared<MatrixOperator>(A);
    return std::make_unique<PcgOperator>(aop, prec, 0.0, pcg_iterations);
}

std::unique_ptr<LinOp> make_amge_preconditioner(const Hierarchy& h, int sweeps,
                                                CoarseSolverKind coarse,
                                                int coarse_pcg)
{
    std::vector<std::shared_ptr<const Smoother>> smoothers;
    for (int l = 0; l + 1 < h.n_levels(); ++l)
        smoothers.push_back(std::make_shared<HybridSmoother>(
            h.system(l), h.kernel_transfer(l), sweeps));
    return std::make_unique<VCyclePreconditioner>(
        h, std::move(smoothers), make_coarse_solver(h, coarse, coarse_pcg, sweeps));
}

} // namespace deramg
