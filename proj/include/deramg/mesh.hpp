// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_MESH_HPP
#define DERAMG_MESH_HPP

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "deramg/errors.hpp"

namespace deramg
{

using Point = std::array<double, 3>;

/// Tetrahedral mesh with canonically oriented derived entities.
///
/// Conventions fixed here and relied on everywhere downstream:
///  - element vertex tuples are normalized to ascending ids with the last
///    two swapped when needed for positive volume;
///  - edges are sorted pairs ordered lexicographically, directed from the
///    lower to the higher vertex id;
///  - facets are sorted triples, normal by the right-hand rule over the
///    ascending vertex order;
///  - element/facet incidence sign is +1 when the canonical facet normal
///    points out of the element.
class Mesh
{
public:
    Mesh(std::vector<Point> vertices,
         std::vector<std::array<int, 4>> elements,
         std::vector<int> element_attributes,
         const std::vector<std::array<int, 3>>& boundary_facets = {},
         const std::vector<int>& boundary_attributes = {});

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_edges() const { return static_cast<int>(edges_.size()); }
    int n_facets() const { return static_cast<int>(facets_.size()); }
    int n_elements() const { return static_cast<int>(elements_.size()); }

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 4>>& elements() const { return elements_; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    const std::vector<std::array<int, 3>>& facets() const { return facets_; }

    int element_attribute(int e) const { return element_attr_[e]; }
    /// 0 for interior facets, the boundary attribute otherwise.
    int facet_attribute(int f) const { return facet_attr_[f]; }

    /// Elements adjacent to a facet with their incidence signs;
    /// second element is (-1, 0) on the boundary.
    std::array<std::pair<int, int>, 2> facet_elements(int f) const
    {
        return facet_elements_[f];
    }

    const std::array<int, 4>& element_facet_ids(int e) const
    {
        return element_facets_[e];
    }

    double element_volume(int e) const { return volumes_[e]; }
    Point element_centroid(int e) const;
    double facet_area(int f) const;
    Point facet_normal(int f) const; // unit, canonical orientation
    double edge_length(int e) const;

    int edge_id(int a, int b) const;
    int facet_id(int a, int b, int c) const;

    long long euler_characteristic() const
    {
        return static_cast<long long>(n_vertices()) - n_edges() + n_facets() -
               n_elements();
    }

private:
    std::vector<Point> vertices_;
    std::vector<std::array<int, 4>> elements_;
    std::vector<int> element_attr_;
    std::vector<double> volumes_;

    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> facets_;
    std::vector<int> facet_attr_;
    std::vector<std::array<int, 4>> element_facets_;
    std::vector<std::array<std::pair<int, int>, 2>> facet_elements_;
};

/// Parser for the `amge-mesh v1` text format.
Mesh parse_mesh(std::istream& in);
Mesh parse_mesh_file(const std::string& path);
void write_mesh(const Mesh& m, std::ostream& out);

/// Unit cube split into n^3 subcubes of 6 Kuhn tetrahedra each; all
/// attributes 1.
Mesh generate_cube_mesh(int n);

/// Eight-child octasection (edge midpoints, fixed interior diagonal);
/// children of element e are elements 8e..8e+7.
Mesh uniform_refine(const Mesh& m);

/// Retags elements whose centroid satisfies the predicate.
Mesh assign_attribute_by_region(const Mesh& m,
                                const std::function<bool(const Point&)>& predicate,
                                int attribute);

} // namespace deramg

#endif
