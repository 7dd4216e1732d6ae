// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/dof_agglomeration.hpp"

#include <algorithm>

namespace deramg
{

std::vector<int> DofAgglomeration::closure_dofs(int s, int k, int X) const
{
    std::vector<int> out;
    for (const auto& [dim, id] : closure_ents[k][X])
        if (dim >= s)
            for (const int d : interior[s][dim][id])
                out.push_back(d);
    return out;
}

std::vector<std::pair<int, int>> DofAgglomeration::closure_ents_for_space(
    int s, int k, int X) const
{
    std::vector<std::pair<int, int>> out;
    for (const auto& [dim, id] : closure_ents[k][X])
        if (dim >= s)
            out.emplace_back(dim, id);
    return out;
}

DofAgglomeration agglomerate_dofs(const SequenceLevel& fine,
                                  const AgglomeratedTopology& step)
{
    DofAgglomeration da;
    const auto& ct = step.coarse;

    for (int s = 0; s < 4; ++s)
        for (int k = 0; k < 4; ++k)
            da.interior[s][k].assign(ct.counts[k], {});

    for (int s = 0; s < 4; ++s)
        for (int d = 0; d < fine.dims[s]; ++d)
        {
            const int kd = fine.dof_entity_dim[s][d];
            const int ed = fine.dof_entity_id[s][d];
            const auto [cdim, cid] = step.owner[kd][ed];
            DERAMG_REQUIRE(cdim >= 0, TopologyError,
                           "fine dof maps to no coarse entity");
            da.interior[s][cdim][cid].push_back(d);
        }

    // coarse closure entity lists from the coarse incidence patterns
    for (int k = 0; k < 4; ++k)
        da.closure_ents[k].assign(ct.counts[k], {});
    for (int v = 0; v < ct.counts[0]; ++v)
        da.closure_ents[0][v] = {{0, v}};
    for (int e = 0; e < ct.counts[1]; ++e)
    {
        auto& c = da.closure_ents[1][e];
        for (const int v : ct.edge_vertex.row_cols(e))
            c.emplace_back(0, v);
        c.emplace_back(1, e);
    }
    auto merge_sub = [](std::vector<std::pair<int, int>>& into,
                        const std::vector<std::pair<int, int>>& sub) {
        into.insert(into.end(), sub.begin(), sub.end());
    };
    for (int f = 0; f < ct.counts[2]; ++f)
    {
        auto& c = da.closure_ents[2][f];
        for (const int e : ct.facet_edge.row_cols(f))
            merge_sub(c, da.closure_ents[1][e]);
        c.emplace_back(2, f);
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    for (int t = 0; t < ct.counts[3]; ++t)
    {
        auto& c = da.closure_ents[3][t];
        for (const int f : ct.element_facet.row_cols(t))
            merge_sub(c, da.closure_ents[2][f]);
        c.emplace_back(3, t);
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }

    return da;
}

} // namespace deramg
