// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_SVD_HPP
#define DERAMG_SVD_HPP

#include "deramg/dense_matrix.hpp"

namespace deramg
{

/// Thin SVD A = U * diag(sigma) * V^T computed by one-sided Jacobi
/// rotations. sigma is returned in descending order; U has the same shape
/// as A; V is square of size A.cols().
struct SvdResult
{
    DenseMatrix u;
    Vector sigma;
    DenseMatrix v;
};

SvdResult svd(const DenseMatrix& A);

Vector singular_values(const DenseMatrix& A);

int rank(const DenseMatrix& A, double rel_tol = 1e-9);

/// Orthonormal basis of the (right) nullspace: columns v with
/// sigma <= rel_tol * sigma_max.
DenseMatrix nullspace(const DenseMatrix& A, double rel_tol = 1e-9);

/// Orthonormal columns spanning span(V) with span(W) deflated away.
/// Both inputs must be expressed in the same inner product (callers
/// pre-multiply by a mass Cholesky factor when an L2 product is meant).
/// Directions whose singular value falls below tol * sigma_max are
/// filtered out; the result may be empty.
DenseMatrix svd_orthonormal_complement(const DenseMatrix& V, const DenseMatrix& W,
                                       double tol = 1e-10);

} // namespace deramg

#endif
