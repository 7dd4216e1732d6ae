// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_DOF_AGGLOMERATION_HPP
#define DERAMG_DOF_AGGLOMERATION_HPP

#include "deramg/agglomeration.hpp"
#include "deramg/sequence.hpp"

namespace deramg
{

/// Association between fine dofs and coarse entities for one coarsening
/// step: every fine dof is interior to exactly one coarse entity (the
/// lowest-dimensional one containing its carrier), and closures collect the
/// interiors of all coarse sub-entities.
struct DofAgglomeration
{
    /// interior[s][k][X]: fine space-s dofs interior to coarse entity (k, X)
    std::array<std::array<std::vector<std::vector<int>>, 4>, 4> interior;

    /// closure coarse entities of (k, X), ordered by (dim, id); includes
    /// (k, X) itself
    std::array<std::vector<std::vector<std::pair<int, int>>>, 4> closure_ents;

    /// fine space-s dofs on the closure of coarse entity (k, X)
    std::vector<int> closure_dofs(int s, int k, int X) const;

    /// coarse sub-entities of dimension >= s (same order as closure_dofs
    /// blocks)
    std::vector<std::pair<int, int>> closure_ents_for_space(int s, int k,
                                                            int X) const;
};

DofAgglomeration agglomerate_dofs(const SequenceLevel& fine,
                                  const AgglomeratedTopology& step);

} // namespace deramg

#endif
