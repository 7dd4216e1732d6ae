// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_COARSEN_HPP
#define DERAMG_COARSEN_HPP

#include "deramg/dof_agglomeration.hpp"

namespace deramg
{

struct CoarsenOptions
{
    double svd_tol = 1e-10;       // linear-dependence filter for targets
    double exactness_tol = 1e-8;  // post-hoc invariant gate
    bool run_checks = true;
};

/// One coarse level of the de Rham sequence together with the inter-level
/// operators: prolongators P[s] (full column rank), co-chain projectors
/// Pi[s] with Pi P = I, and the coarse SequenceLevel carrying the coarse
/// derivatives, dof metadata, targets, local Gram matrices and the
/// coarsened vector-nodal interpolation operators.
struct CoarsenedLevel
{
    SequenceLevel level;
    std::array<SparseMatrix, 4> P;
    std::array<SparseMatrix, 4> Pi;
};

/// Builds the coarse sequence over one agglomeration step: PV traces and
/// filtered targets seed the lowest-dimensional trace spaces, local
/// saddle-point extensions sweep to higher-dimensional entities, and
/// derivative-preimage and derivative-free bubbles complete each space.
CoarsenedLevel coarsen_sequence(const SequenceLevel& fine,
                                const AgglomeratedTopology& step,
                                const CoarsenOptions& opt = {});

/// Galerkin coarse matrix P^T A P (exactly symmetric for symmetric A).
SparseMatrix rap_level(const SparseMatrix& A_fine, const SparseMatrix& P);

} // namespace deramg

#endif
