// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_TOPOLOGY_HPP
#define DERAMG_TOPOLOGY_HPP

#include <array>

#include "deramg/mesh.hpp"
#include "deramg/sparse_matrix.hpp"

namespace deramg
{

/// Mesh-like entity structure of one hierarchy level: entity counts per
/// dimension, signed incidence between consecutive dimensions, boundary
/// attributes, and element measures. The finest level mirrors the mesh;
/// coarse levels are produced by agglomeration.
struct LevelTopology
{
    std::array<int, 4> counts = {0, 0, 0, 0}; // vertices, edges, facets, elements

    SparseMatrix edge_vertex;    // edges x vertices, -1 tail / +1 head
    SparseMatrix facet_edge;     // facets x edges, boundary-of-facet signs
    SparseMatrix element_facet;  // elements x facets, +1 when outward

    std::vector<int> facet_attribute;   // 0 interior, >0 boundary attribute
    std::vector<int> element_attribute;
    std::vector<double> element_volume;

    int n_entities(int dim) const { return counts[dim]; }

    const SparseMatrix& incidence(int dim) const
    {
        switch (dim)
        {
        case 1:
            return edge_vertex;
        case 2:
            return facet_edge;
        default:
            return element_facet;
        }
    }

    /// Entity lies on a tagged boundary (facets by attribute, lower
    /// dimensions by containment in a boundary facet).
    std::vector<unsigned char> boundary_flags(int dim) const;

    /// B_{d+1} * B_d = 0 for d = 1, 2 (discrete boundary-of-boundary).
    void check_nilpotency() const;
};

LevelTopology fine_topology(const Mesh& mesh);

} // namespace deramg

#endif
