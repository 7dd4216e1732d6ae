// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/topology.hpp"

#include <cmath>

namespace deramg
{

std::vector<unsigned char> LevelTopology::boundary_flags(int dim) const
{
    std::vector<unsigned char> flag(counts[dim], 0);
    if (dim == 3)
        return flag;
    if (dim == 2)
    {
        for (int f = 0; f < counts[2]; ++f)
            flag[f] = facet_attribute[f] > 0;
        return flag;
    }
    if (dim == 1)
    {
        for (int f = 0; f < counts[2]; ++f)
            if (facet_attribute[f] > 0)
                for (const int e : facet_edge.row_cols(f))
                    flag[e] = 1;
        return flag;
    }
    const auto edge_flag = boundary_flags(1);
    for (int e = 0; e < counts[1]; ++e)
        if (edge_flag[e])
            for (const int v : edge_vertex.row_cols(e))
                flag[v] = 1;
    return flag;
}

void LevelTopology::check_nilpotency() const
{
    const SparseMatrix fe_ev = multiply(facet_edge, edge_vertex);
    for (const double v : fe_ev.values())
        DERAMG_REQUIRE(v == 0.0, TopologyError,
                       "facet/edge/vertex incidence is not nilpotent");
    const SparseMatrix ef_fe = multiply(element_facet, facet_edge);
    for (const double v : ef_fe.values())
        DERAMG_REQUIRE(v == 0.0, TopologyError,
                       "element/facet/edge incidence is not nilpotent");
}

LevelTopology fine_topology(const Mesh& mesh)
{
    LevelTopology t;
    t.counts = {mesh.n_vertices(), mesh.n_edges(), mesh.n_facets(),
                mesh.n_elements()};

    {
        std::vector<std::tuple<int, int, double>> trip;
        trip.reserve(mesh.n_edges() * 2);
        for (int e = 0; e < mesh.n_edges(); ++e)
        {
            const auto& p = mesh.edges()[e];
            trip.emplace_back(e, p[0], -1.0);
            trip.emplace_back(e, p[1], 1.0);
        }
        t.edge_vertex = SparseMatrix::from_triplets(mesh.n_edges(),
                                                    mesh.n_vertices(), trip);
    }

    {
        // Boundary of facet (a<b<c) traversed a->b->c->a against the
        // lower-to-higher edge direction: (a,b) +1, (b,c) +1, (a,c) -1.
        std::vector<std::tuple<int, int, double>> trip;
        trip.reserve(mesh.n_facets() * 3);
        for (int f = 0; f < mesh.n_facets(); ++f)
        {
            const auto& tri = mesh.facets()[f];
            trip.emplace_back(f, mesh.edge_id(tri[0], tri[1]), 1.0);
            trip.emplace_back(f, mesh.edge_id(tri[1], tri[2]), 1.0);
            trip.emplace_back(f, mesh.edge_id(tri[0], tri[2]), -1.0);
        }
        t.facet_edge =
            SparseMatrix::from_triplets(mesh.n_facets(), mesh.n_edges(), trip);
    }

    {
        std::vector<std::tuple<int, int, double>> trip;
        trip.reserve(mesh.n_elements() * 4);
        for (int e = 0; e < mesh.n_elements(); ++e)
            for (int k = 0; k < 4; ++k)
            {
                const int f = mesh.element_facet_ids(e)[k];
                const auto fe = mesh.facet_elements(f);
                const int sign = fe[0].first == e ? fe[0].second : fe[1].second;
                trip.emplace_back(e, f, double(sign));
            }
        t.element_facet =
            SparseMatrix::from_triplets(mesh.n_elements(), mesh.n_facets(), trip);
    }

    t.facet_attribute.resize(mesh.n_facets());
    for (int f = 0; f < mesh.n_facets(); ++f)
        t.facet_attribute[f] = mesh.facet_attribute(f);

    t.element_attribute.resize(mesh.n_elements());
    t.element_volume.resize(mesh.n_elements());
    for (int e = 0; e < mesh.n_elements(); ++e)
    {
        t.element_attribute[e] = mesh.element_attribute(e);
        t.element_volume[e] = mesh.element_volume(e);
    }
    return t;
}

} // namespace deramg
