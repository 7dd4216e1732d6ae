// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_AGGLOMERATION_HPP
#define DERAMG_AGGLOMERATION_HPP

#include <vector>

#include "deramg/partition.hpp"
#include "deramg/topology.hpp"

namespace deramg
{

/// One coarsening step: the coarse topology plus the tables relating every
/// coarse entity to its constituent fine entities, with orientation signs
/// for facets and edges, and the ownership map assigning every fine entity
/// to the lowest-dimensional coarse entity containing it.
struct AgglomeratedTopology
{
    LevelTopology coarse;

    std::vector<std::vector<int>> ae_element;                    // coarse elem -> fine elems
    std::vector<std::vector<std::pair<int, int>>> af_facet;      // (fine facet, +-1)
    std::vector<std::vector<std::pair<int, int>>> aedge_edge;    // (fine edge, +-1)
    std::vector<int> av_vertex;                                  // fine vertex id

    /// owner[d][fine_id] = (coarse dimension, coarse id)
    std::array<std::vector<std::pair<int, int>>, 4> owner;

    const std::vector<int>& partition() const { return parts_; }
    std::vector<int> parts_;
};

/// Intersection procedure over a repaired partition. Throws TopologyError
/// when the partition produces coarse entities that are not ball/disk/path
/// like (a repaired partition never does).
AgglomeratedTopology coarsen_topology(const LevelTopology& fine,
                                      const std::vector<int>& parts);

/// Splits agglomerates until all of them are connected with Euler
/// characteristic 1 and all derived coarse facets and edges are disk and
/// path shaped. Throws RepairFailed when splitting does not settle within
/// #elements rounds.
std::vector<int> repair_partition(const LevelTopology& fine, std::vector<int> parts);

/// Check-and-repair on an existing step: re-derives the coarse topology
/// from a repaired copy of its partition.
AgglomeratedTopology topology_check_and_repair(const LevelTopology& fine,
                                               const AgglomeratedTopology& topo);

/// Recursive hierarchy of agglomerated topologies; level k+1 partitions the
/// level-k dual graph into ceil(n_k / factor) parts and repairs the result.
std::vector<AgglomeratedTopology> coarsen_recursive(const LevelTopology& fine,
                                                    const std::vector<int>& factors,
                                                    unsigned seed);

/// Euler characteristic V - E + F - T of one agglomerate's closure.
long long agglomerate_euler(const LevelTopology& fine, const std::vector<int>& elems);

/// Debug listing of entity counts and per-coarse-entity fine ids.
void dump_topology(const AgglomeratedTopology& t, std::ostream& os);

} // namespace deramg

#endif
