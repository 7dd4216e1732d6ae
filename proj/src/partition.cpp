// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/partition.hpp"

#include <algorithm>
#include <numeric>

namespace deramg
{

DualGraph build_dual_graph(const LevelTopology& topo)
{
    DualGraph g;
    g.n_nodes = topo.counts[3];
    g.adjacency.assign(g.n_nodes, {});

    const SparseMatrix facet_element = transpose(topo.element_facet);
    for (int f = 0; f < topo.counts[2]; ++f)
    {
        const auto elems = facet_element.row_cols(f);
        if (elems.size() == 2)
        {
            g.adjacency[elems[0]].push_back(elems[1]);
            g.adjacency[elems[1]].push_back(elems[0]);
        }
    }
    for (auto& a : g.adjacency)
    {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return g;
}

int n_parts_of(const std::vector<int>& parts)
{
    int n = 0;
    for (const int p : parts)
        n = std::max(n, p + 1);
    return n;
}

std::vector<std::vector<int>> part_components(const DualGraph& g,
                                              const std::vector<int>& parts,
                                              int part)
{
    std::vector<int> nodes;
    for (int i = 0; i < g.n_nodes; ++i)
        if (parts[i] == part)
            nodes.push_back(i);

    std::vector<std::vector<int>> comps;
    std::vector<unsigned char> seen(g.n_nodes, 0);
    for (const int start : nodes)
    {
        if (seen[start])
            continue;
        std::vector<int> comp;
        std::vector<int> stack = {start};
        seen[start] = 1;
        while (!stack.empty())
        {
            const int u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (const int v : g.adjacency[u])
                if (parts[v] == part && !seen[v])
                {
                    seen[v] = 1;
                    stack.push_back(v);
                }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

namespace
{

// Split the node order into n_parts contiguous blocks with sizes balanced
// to +-1, assigning part ids starting at base.
void bisect_recursive(const std::vector<int>& nodes, int n_parts, int base,
                      std::vector<int>& parts)
{
    if (n_parts <= 1)
    {
        for (const int u : nodes)
            parts[u] = base;
        return;
    }
    const int left_parts = (n_parts + 1) / 2;
    const int right_parts = n_parts - left_parts;
    const std::size_t cut =
        (nodes.size() * static_cast<std::size_t>(left_parts)) / n_parts;
    const std::vector<int> left(nodes.begin(), nodes.begin() + cut);
    const std::vector<int> right(nodes.begin() + cut, nodes.end());
    bisect_recursive(left, left_parts, base, parts);
    bisect_recursive(right, right_parts, base + left_parts, parts);
}

} // namespace

std::vector<int> partition_graph(const DualGraph& g, int n_parts, unsigned seed)
{
    DERAMG_REQUIRE(n_parts >= 1, Error, "n_parts must be >= 1");
    std::vector<int> order(g.n_nodes);
    std::iota(order.begin(), order.end(), 0);
    if (g.n_nodes > 0)
        std::rotate(order.begin(), order.begin() + (seed % g.n_nodes), order.end());

    std::vector<int> parts(g.n_nodes, 0);
    bisect_recursive(order, std::min(n_parts, std::max(g.n_nodes, 1)), 0, parts);

    // Every part must be connected; extra components become new parts.
    int next = n_parts_of(parts);
    const int base_parts = next;
    for (int p = 0; p < base_parts; ++p)
    {
        auto comps = part_components(g, parts, p);
        for (std::size_t c = 1; c < comps.size(); ++c)
            for (const int u : comps[c])
                parts[u] = next + static_cast<int>(c) - 1;
        if (comps.size() > 1)
            next += static_cast<int>(comps.size()) - 1;
    }

    // Renumber by minimum node id for a reproducible labelling.
    const int total = n_parts_of(parts);
    std::vector<int> min_node(total, g.n_nodes);
    for (int i = 0; i < g.n_nodes; ++i)
        min_node[parts[i]] = std::min(min_node[parts[i]], i);
    std::vector<int> label(total);
    std::iota(label.begin(), label.end(), 0);
    std::sort(label.begin(), label.end(),
              [&](int a, int b) { return min_node[a] < min_node[b]; });
    std::vector<int> relabel(total);
    for (int k = 0; k < total; ++k)
        relabel[label[k]] = k;
    for (int i = 0; i < g.n_nodes; ++i)
        parts[i] = relabel[parts[i]];
    return parts;
}

} // namespace deramg
