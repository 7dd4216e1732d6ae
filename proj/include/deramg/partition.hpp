// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_PARTITION_HPP
#define DERAMG_PARTITION_HPP

#include <vector>

#include "deramg/topology.hpp"

namespace deramg
{

/// Element adjacency graph: one node per element, an edge per shared facet.
struct DualGraph
{
    int n_nodes = 0;
    std::vector<std::vector<int>> adjacency; // sorted neighbour lists

    int n_edges() const
    {
        std::size_t s = 0;
        for (const auto& a : adjacency)
            s += a.size();
        return static_cast<int>(s / 2);
    }
};

DualGraph build_dual_graph(const LevelTopology& topo);

/// Deterministic seeded recursive bisection. Each bisection takes the
/// id-contiguous first half of the (seed-rotated) node order, so on meshes
/// numbered by refinement the partition reverts refinements; afterwards
/// every part is split into its connected components and parts are
/// renumbered by their minimum node id.
std::vector<int> partition_graph(const DualGraph& g, int n_parts, unsigned seed);

int n_parts_of(const std::vector<int>& parts);

/// Connected components of one part's induced subgraph (node lists).
std::vector<std::vector<int>> part_components(const DualGraph& g,
                                              const std::vector<int>& parts,
                                              int part);

} // namespace deramg

#endif
