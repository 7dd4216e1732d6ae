// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/agglomeration.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <queue>

namespace deramg
{

namespace
{

// Internal problem report: which agglomerates could be split to remove the
// offending coarse entity. Escapes coarsen_topology as a TopologyError.
struct TopologyProblem : TopologyError
{
    TopologyProblem(const std::string& what, std::vector<int> aggs)
        : TopologyError(what), blame(std::move(aggs))
    {}
    std::vector<int> blame;
};

SparseMatrix abs_pattern(const SparseMatrix& A)
{
    SparseMatrix B = A;
    for (double& v : B.values())
        v = 1.0;
    return B;
}

struct FacetGroupKey
{
    int a;    // first adjacent part
    int b;    // second adjacent part, or -1 on the boundary
    int attr; // boundary attribute, 0 for interior

    bool operator<(const FacetGroupKey& o) const
    {
        return std::tie(a, b, attr) < std::tie(o.a, o.b, o.attr);
    }
};

} // namespace

long long agglomerate_euler(const LevelTopology& fine, const std::vector<int>& elems)
{
    std::vector<unsigned char> fseen(fine.counts[2], 0), eseen(fine.counts[1], 0),
        vseen(fine.counts[0], 0);
    long long nf = 0, ne = 0, nv = 0;
    for (const int t : elems)
        for (const int f : fine.element_facet.row_cols(t))
            if (!fseen[f])
            {
                fseen[f] = 1;
                ++nf;
                for (const int e : fine.facet_edge.row_cols(f))
                    if (!eseen[e])
                    {
                        eseen[e] = 1;
                        ++ne;
                        for (const int v : fine.edge_vertex.row_cols(e))
                            if (!vseen[v])
                            {
                                vseen[v] = 1;
                                ++nv;
                            }
                    }
            }
    return nv - ne + nf - static_cast<long long>(elems.size());
}

AgglomeratedTopology coarsen_topology(const LevelTopology& fine,
                                      const std::vector<int>& parts)
{
    DERAMG_REQUIRE(static_cast<int>(parts.size()) == fine.counts[3], TopologyError,
                   "partition size does not match element count");
    const int n_parts = n_parts_of(parts);

    AgglomeratedTopology out;
    out.parts_ = parts;
    out.ae_element.assign(n_parts, {});
    for (int e = 0; e < fine.counts[3]; ++e)
    {
        DERAMG_REQUIRE(parts[e] >= 0, TopologyError, "negative part id");
        out.ae_element[parts[e]].push_back(e);
    }
    for (int p = 0; p < n_parts; ++p)
        DERAMG_REQUIRE(!out.ae_element[p].empty(), TopologyError,
                       "partition has an empty part id");

    const SparseMatrix facet_element = transpose(fine.element_facet);
    const SparseMatrix edge_facet = transpose(fine.facet_edge);
    const SparseMatrix vertex_edge = transpose(fine.edge_vertex);

    out.owner[3].assign(fine.counts[3], {-1, -1});
    for (int e = 0; e < fine.counts[3]; ++e)
        out.owner[3][e] = {3, parts[e]};

    // ---- coarse facets: group interface facets by agglomerate pair (or
    // agglomerate/boundary-attribute pair), then split into connected
    // components over shared fine edges.
    out.owner[2].assign(fine.counts[2], {-1, -1});
    std::vector<int> facet_sign(fine.counts[2], 0);
    std::map<FacetGroupKey, std::vector<int>> groups;
    for (int f = 0; f < fine.counts[2]; ++f)
    {
        const auto elems = facet_element.row_cols(f);
        const auto signs = facet_element.row_values(f);
        if (elems.size() == 2)
        {
            const int pa = parts[elems[0]], pb = parts[elems[1]];
            if (pa == pb)
            {
                out.owner[2][f] = {3, pa};
                continue;
            }
            groups[{std::min(pa, pb), std::max(pa, pb), 0}].push_back(f);
        }
        else
        {
            DERAMG_REQUIRE(fine.facet_attribute[f] > 0, TopologyError,
                           "single-element facet without boundary attribute");
            groups[{parts[elems[0]], -1, fine.facet_attribute[f]}].push_back(f);
        }
        (void)signs;
    }

    std::vector<std::pair<int, int>> cfacet_pair; // (first part, second part/-1)
    std::vector<int> cfacet_attr;
    auto from_part = [&](int f) {
        // part the canonical normal of f points out of
        const auto elems = facet_element.row_cols(f);
        const auto signs = facet_element.row_values(f);
        return signs[0] > 0 ? parts[elems[0]] : parts[elems.size() > 1 ? elems[1] : elems[0]];
    };
    for (const auto& [key, members] : groups)
    {
        // Connected components over shared fine edges. Two facets of the
        // same fine element always meet at a dihedral crease, so they do
        // not connect; this keeps coarse facets as flat as the partition
        // allows and makes the trivial partition reproduce the fine mesh.
        std::map<int, std::vector<int>> by_edge;
        for (const int f : members)
            for (const int e : fine.facet_edge.row_cols(f))
                by_edge[e].push_back(f);
        auto share_element = [&](int f, int g) {
            for (const int ef : facet_element.row_cols(f))
                for (const int eg : facet_element.row_cols(g))
                    if (ef == eg)
                        return true;
            return false;
        };
        std::map<int, int> comp;
        for (const int f : members)
            comp[f] = -1;
        int local = 0;
        for (const int start : members)
        {
            if (comp[start] >= 0)
                continue;
            std::vector<int> stack = {start};
            comp[start] = local;
            while (!stack.empty())
            {
                const int f = stack.back();
                stack.pop_back();
                for (const int e : fine.facet_edge.row_cols(f))
                    for (const int g : by_edge[e])
                        if (comp[g] < 0 && !share_element(f, g))
                        {
                            comp[g] = local;
                            stack.push_back(g);
                        }
            }
            ++local;
        }
        for (int c = 0; c < local; ++c)
        {
            const int cf = static_cast<int>(out.af_facet.size());
            out.af_facet.emplace_back();
            cfacet_pair.emplace_back(key.a, key.b);
            cfacet_attr.push_back(key.attr);
            // The coarse facet inherits the canonical orientation of its
            // lowest-id fine facet (members are ascending).
            bool have_anchor = false;
            int anchor_from = 0;
            for (const int f : members)
            {
                if (comp[f] != c)
                    continue;
                int sign;
                if (key.b < 0)
                {
                    // relative outward-ness within the boundary patch
                    const auto signs = facet_element.row_values(f);
                    const int outward = signs[0] > 0 ? 1 : -1;
                    if (!have_anchor)
                    {
                        have_anchor = true;
                        anchor_from = outward;
                        sign = 1;
                    }
                    else
                        sign = outward * anchor_from;
                }
                else
                {
                    if (!have_anchor)
                    {
                        have_anchor = true;
                        anchor_from = from_part(f);
                        sign = 1;
                    }
                    else
                        sign = from_part(f) == anchor_from ? 1 : -1;
                }
                out.af_facet[cf].emplace_back(f, sign);
                out.owner[2][f] = {2, cf};
                facet_sign[f] = sign;
            }
        }
    }
    const int n_cfacets = static_cast<int>(out.af_facet.size());

    // ---- coarse edges: fine edges lying on >= 2 coarse facets, grouped by
    // their coarse-facet set, split into connected components, each of which
    // must be a simple open path.
    out.owner[1].assign(fine.counts[1], {-1, -1});
    std::vector<std::vector<int>> edge_cfacets(fine.counts[1]);
    for (int e = 0; e < fine.counts[1]; ++e)
    {
        std::vector<int> s;
        for (const int f : edge_facet.row_cols(e))
            if (out.owner[2][f].first == 2)
                s.push_back(out.owner[2][f].second);
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        edge_cfacets[e] = std::move(s);
    }

    auto blame_of_cfacet = [&](int cf) {
        std::vector<int> aggs = {cfacet_pair[cf].first};
        if (cfacet_pair[cf].second >= 0)
            aggs.push_back(cfacet_pair[cf].second);
        return aggs;
    };

    std::map<std::vector<int>, std::vector<int>> edge_groups;
    for (int e = 0; e < fine.counts[1]; ++e)
        if (edge_cfacets[e].size() >= 2)
            edge_groups[edge_cfacets[e]].push_back(e);

    std::vector<int> edge_sign(fine.counts[1], 0);
    std::vector<std::array<int, 2>> cedge_ends; // endpoint fine vertices
    for (const auto& [key, members] : edge_groups)
    {
        std::map<int, std::vector<int>> by_vertex;
        for (const int e : members)
            for (const int v : fine.edge_vertex.row_cols(e))
                by_vertex[v].push_back(e);

        std::map<int, int> comp;
        for (const int e : members)
            comp[e] = -1;
        int local = 0;
        for (const int start : members)
        {
            if (comp[start] >= 0)
                continue;
            std::vector<int> stack = {start};
            comp[start] = local;
            while (!stack.empty())
            {
                const int e = stack.back();
                stack.pop_back();
                for (const int v : fine.edge_vertex.row_cols(e))
                    for (const int g : by_vertex[v])
                        if (comp[g] < 0)
                        {
                            comp[g] = local;
                            stack.push_back(g);
                        }
            }
            ++local;
        }

        for (int c = 0; c < local; ++c)
        {
            std::vector<int> ce;
            for (const int e : members)
                if (comp[e] == c)
                    ce.push_back(e);

            // simple open path: internal degrees 2, exactly two endpoints
            std::map<int, int> degree;
            for (const int e : ce)
                for (const int v : fine.edge_vertex.row_cols(e))
                    ++degree[v];
            std::array<int, 2> ends = {-1, -1};
            for (const auto& [v, d] : degree)
            {
                if (d > 2)
                    throw TopologyProblem("coarse edge branches",
                                          blame_of_cfacet(key[0]));
                if (d == 1)
                {
                    if (ends[0] < 0)
                        ends[0] = v;
                    else if (ends[1] < 0)
                        ends[1] = v;
                    else
                        throw TopologyProblem("coarse edge has more than two ends",
                                              blame_of_cfacet(key[0]));
                }
            }
            if (ends[0] < 0)
                throw TopologyProblem("coarse edge is a closed loop",
                                      blame_of_cfacet(key[0]));

            // orient by walking from the lowest fine edge id
            const int ceid = static_cast<int>(out.aedge_edge.size());
            std::map<int, int> sign;
            std::queue<int> q;
            sign[ce.front()] = 1;
            q.push(ce.front());
            while (!q.empty())
            {
                const int e = q.front();
                q.pop();
                for (const int v : fine.edge_vertex.row_cols(e))
                    for (const int g : by_vertex[v])
                    {
                        if (comp[g] != c || sign.count(g))
                            continue;
                        const double se = fine.edge_vertex.get(e, v);
                        const double sg = fine.edge_vertex.get(g, v);
                        sign[g] = -sign[e] * static_cast<int>(se * sg);
                        q.push(g);
                    }
            }
            out.aedge_edge.emplace_back();
            for (const int e : ce)
            {
                out.aedge_edge[ceid].emplace_back(e, sign[e]);
                out.owner[1][e] = {1, ceid};
                edge_sign[e] = sign[e];
            }
            cedge_ends.push_back(ends);
        }
    }
    const int n_cedges = static_cast<int>(out.aedge_edge.size());

    // ---- coarse vertices: endpoints of coarse edges and junctions of
    // several coarse edges.
    out.owner[0].assign(fine.counts[0], {-1, -1});
    std::vector<std::vector<int>> vertex_cedges(fine.counts[0]);
    std::vector<std::map<int, int>> vertex_cedge_degree(fine.counts[0]);
    for (int ce = 0; ce < n_cedges; ++ce)
        for (const auto& [e, s] : out.aedge_edge[ce])
            for (const int v : fine.edge_vertex.row_cols(e))
            {
                if (vertex_cedges[v].empty() || vertex_cedges[v].back() != ce)
                    vertex_cedges[v].push_back(ce);
                ++vertex_cedge_degree[v][ce];
            }
    for (auto& s : vertex_cedges)
    {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }

    for (int v = 0; v < fine.counts[0]; ++v)
    {
        const auto& ts = vertex_cedges[v];
        if (ts.size() >= 2 ||
            (ts.size() == 1 && vertex_cedge_degree[v][ts[0]] == 1))
        {
            const int cv = static_cast<int>(out.av_vertex.size());
            out.av_vertex.push_back(v);
            out.owner[0][v] = {0, cv};
        }
        else if (ts.size() == 1)
        {
            out.owner[0][v] = {1, ts[0]};
        }
    }
    const int n_cverts = static_cast<int>(out.av_vertex.size());

    // remaining vertices: interior to a coarse facet or to an agglomerate
    const SparseMatrix elem_edge_pat =
        multiply(abs_pattern(fine.element_facet), abs_pattern(fine.facet_edge));
    const SparseMatrix edge_elem_pat = transpose(elem_edge_pat);
    for (int v = 0; v < fine.counts[0]; ++v)
    {
        if (out.owner[0][v].first >= 0)
            continue;
        std::vector<int> cfs;
        for (const int e : vertex_edge.row_cols(v))
            for (const int cf : edge_cfacets[e])
                cfs.push_back(cf);
        std::sort(cfs.begin(), cfs.end());
        cfs.erase(std::unique(cfs.begin(), cfs.end()), cfs.end());
        // Edges carrying a single coarse facet still pin the vertex to it.
        for (const int e : vertex_edge.row_cols(v))
            if (edge_cfacets[e].size() == 1)
                cfs.push_back(edge_cfacets[e][0]);
        std::sort(cfs.begin(), cfs.end());
        cfs.erase(std::unique(cfs.begin(), cfs.end()), cfs.end());
        if (cfs.size() >= 2)
            throw TopologyProblem("vertex pinches several coarse facets",
                                  blame_of_cfacet(cfs[0]));
        if (cfs.size() == 1)
        {
            out.owner[0][v] = {2, cfs[0]};
            continue;
        }
        int p = -1;
        bool ok = true;
        for (const int e : vertex_edge.row_cols(v))
            for (const int t : edge_elem_pat.row_cols(e))
            {
                if (p < 0)
                    p = parts[t];
                else if (p != parts[t])
                    ok = false;
            }
        if (!ok || p < 0)
            throw TopologyProblem("vertex pinches several agglomerates",
                                  {p < 0 ? 0 : p});
        out.owner[0][v] = {3, p};
    }

    // remaining edges
    for (int e = 0; e < fine.counts[1]; ++e)
    {
        if (out.owner[1][e].first >= 0)
            continue;
        if (edge_cfacets[e].size() == 1)
        {
            out.owner[1][e] = {2, edge_cfacets[e][0]};
            continue;
        }
        int p = -1;
        bool ok = true;
        for (const int t : edge_elem_pat.row_cols(e))
        {
            if (p < 0)
                p = parts[t];
            else if (p != parts[t])
                ok = false;
        }
        if (!ok || p < 0)
            throw TopologyProblem("edge pinches several agglomerates",
                                  {p < 0 ? 0 : p});
        out.owner[1][e] = {3, p};
    }

    // ---- coarse incidence matrices
    std::vector<std::tuple<int, int, double>> b3;
    for (int cf = 0; cf < n_cfacets; ++cf)
    {
        std::map<int, int> part_sign;
        for (const auto& [f, s] : out.af_facet[cf])
        {
            const auto elems = facet_element.row_cols(f);
            const auto signs = facet_element.row_values(f);
            for (std::size_t k = 0; k < elems.size(); ++k)
            {
                const int p = parts[elems[k]];
                const int cand = s * (signs[k] > 0 ? 1 : -1);
                auto [it, inserted] = part_sign.try_emplace(p, cand);
                if (!inserted && it->second != cand)
                    throw TopologyProblem(
                        "inconsistent coarse facet orientation (coarse facet " +
                            std::to_string(cf) + ", fine facet " + std::to_string(f) +
                            ", part " + std::to_string(p) + ")",
                        blame_of_cfacet(cf));
            }
        }
        for (const auto& [p, s] : part_sign)
            b3.emplace_back(p, cf, double(s));
    }

    std::map<std::pair<int, int>, int> b2_entries;
    for (int ce = 0; ce < n_cedges; ++ce)
        for (const auto& [e, se] : out.aedge_edge[ce])
            for (const int f : edge_facet.row_cols(e))
            {
                if (out.owner[2][f].first != 2)
                    continue;
                const int cf = out.owner[2][f].second;
                const int cand = facet_sign[f] *
                                 static_cast<int>(fine.facet_edge.get(f, e)) * se;
                auto [it, inserted] = b2_entries.try_emplace({cf, ce}, cand);
                if (!inserted && it->second != cand)
                    throw TopologyProblem("inconsistent coarse facet/edge sign",
                                          blame_of_cfacet(cf));
            }
    std::vector<std::tuple<int, int, double>> b2;
    for (const auto& [fe, s] : b2_entries)
        b2.emplace_back(fe.first, fe.second, double(s));

    std::vector<std::tuple<int, int, double>> b1;
    for (int ce = 0; ce < n_cedges; ++ce)
        for (const int v : cedge_ends[ce])
        {
            DERAMG_REQUIRE(out.owner[0][v] == (std::pair<int, int>{0,
                               out.owner[0][v].second}),
                           TopologyError, "coarse edge endpoint is not a vertex");
            // the unique fine edge of this coarse edge at v
            int fe = -1;
            for (const auto& [e, s] : out.aedge_edge[ce])
                for (const int w : fine.edge_vertex.row_cols(e))
                    if (w == v)
                        fe = e;
            const int sign = edge_sign[fe] *
                             static_cast<int>(fine.edge_vertex.get(fe, v));
            b1.emplace_back(ce, out.owner[0][v].second, double(sign));
        }

    out.coarse.counts = {n_cverts, n_cedges, n_cfacets, n_parts};
    out.coarse.edge_vertex =
        SparseMatrix::from_triplets(n_cedges, n_cverts, b1);
    out.coarse.facet_edge = SparseMatrix::from_triplets(n_cfacets, n_cedges, b2);
    out.coarse.element_facet =
        SparseMatrix::from_triplets(n_parts, n_cfacets, b3);
    out.coarse.facet_attribute = cfacet_attr;
    out.coarse.element_attribute.assign(n_parts, 1);
    out.coarse.element_volume.assign(n_parts, 0.0);
    for (int p = 0; p < n_parts; ++p)
    {
        out.coarse.element_attribute[p] =
            fine.element_attribute[out.ae_element[p].front()];
        for (const int t : out.ae_element[p])
            out.coarse.element_volume[p] += fine.element_volume[t];
    }

    // every coarse edge endpoint pair carries a -1 and a +1
    for (int ce = 0; ce < n_cedges; ++ce)
    {
        const auto vals = out.coarse.edge_vertex.row_values(ce);
        double s = 0.0;
        for (const double v : vals)
            s += v;
        if (vals.size() != 2 || s != 0.0)
            throw TopologyProblem("coarse edge endpoints are inconsistent",
                                  {cfacet_pair.empty() ? 0 : cfacet_pair[0].first});
    }

    // coarse boundary-of-boundary nilpotency
    try
    {
        out.coarse.check_nilpotency();
    }
    catch (const TopologyError&)
    {
        throw TopologyProblem("coarse incidence is not nilpotent", {0});
    }

    // every coarse facet must be disk-like (chi = V - E + F = 1)
    for (int cf = 0; cf < n_cfacets; ++cf)
    {
        std::vector<unsigned char> eseen(fine.counts[1], 0), vseen(fine.counts[0], 0);
        long long nf = 0, ne = 0, nv = 0;
        for (const auto& [f, s] : out.af_facet[cf])
        {
            ++nf;
            for (const int e : fine.facet_edge.row_cols(f))
                if (!eseen[e])
                {
                    eseen[e] = 1;
                    ++ne;
                    for (const int v : fine.edge_vertex.row_cols(e))
                        if (!vseen[v])
                        {
                            vseen[v] = 1;
                            ++nv;
                        }
                }
        }
        if (nv - ne + nf != 1)
            throw TopologyProblem("coarse facet is not disk-like",
                                  blame_of_cfacet(cf));
    }

    // Relative interior counts: a ball-like entity with an embedded
    // (manifold) boundary satisfies -V+E-F+T = 1 over its interior fine
    // entities, and V-E+F = 1 over a disk's. Self-touching boundaries pass
    // the plain Euler checks but fail these.
    {
        std::vector<std::array<long long, 4>> agg_int(n_parts, {0, 0, 0, 0});
        std::vector<std::array<long long, 2>> facet_int(n_cfacets, {0, 0});
        for (int v = 0; v < fine.counts[0]; ++v)
        {
            if (out.owner[0][v].first == 3)
                ++agg_int[out.owner[0][v].second][0];
            else if (out.owner[0][v].first == 2)
                ++facet_int[out.owner[0][v].second][0];
        }
        for (int e = 0; e < fine.counts[1]; ++e)
        {
            if (out.owner[1][e].first == 3)
                ++agg_int[out.owner[1][e].second][1];
            else if (out.owner[1][e].first == 2)
                ++facet_int[out.owner[1][e].second][1];
        }
        for (int f = 0; f < fine.counts[2]; ++f)
            if (out.owner[2][f].first == 3)
                ++agg_int[out.owner[2][f].second][2];

        for (int p = 0; p < n_parts; ++p)
        {
            const long long cnt = -agg_int[p][0] + agg_int[p][1] - agg_int[p][2] +
                                  static_cast<long long>(out.ae_element[p].size());
            if (cnt != 1)
                throw TopologyProblem("agglomerate boundary is not an embedded "
                                      "sphere",
                                      {p});
        }
        for (int cf = 0; cf < n_cfacets; ++cf)
        {
            const long long cnt = facet_int[cf][0] - facet_int[cf][1] +
                                  static_cast<long long>(out.af_facet[cf].size());
            if (cnt != 1)
                throw TopologyProblem("coarse facet boundary is not an embedded "
                                      "circle",
                                      blame_of_cfacet(cf));
        }
    }

    return out;
}

namespace
{

void renumber_by_min_node(std::vector<int>& parts)
{
    const int total = n_parts_of(parts);
    std::vector<int> min_node(total, static_cast<int>(parts.size()));
    for (int i = 0; i < static_cast<int>(parts.size()); ++i)
        min_node[parts[i]] = std::min(min_node[parts[i]], i);
    std::vector<int> order(total);
    for (int i = 0; i < total; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return min_node[a] < min_node[b]; });
    std::vector<int> relabel(total);
    for (int k = 0; k < total; ++k)
        relabel[order[k]] = k;
    for (int& p : parts)
        p = relabel[p];
}

// FIFO-BFS bisection from the lowest-id node of the part; the unvisited
// remainder gets a fresh part id. Returns false when the part cannot split.
bool bisect_part(const DualGraph& g, std::vector<int>& parts, int part)
{
    std::vector<int> nodes;
    for (int i = 0; i < g.n_nodes; ++i)
        if (parts[i] == part)
            nodes.push_back(i);
    if (nodes.size() < 2)
        return false;

    const std::size_t keep = (nodes.size() + 1) / 2;
    std::vector<unsigned char> in_half(g.n_nodes, 0);
    std::queue<int> q;
    q.push(nodes.front());
    in_half[nodes.front()] = 1;
    std::size_t taken = 1;
    while (!q.empty() && taken < keep)
    {
        const int u = q.front();
        q.pop();
        for (const int v : g.adjacency[u])
        {
            if (taken >= keep)
                break;
            if (parts[v] == part && !in_half[v])
            {
                in_half[v] = 1;
                ++taken;
                q.push(v);
            }
        }
    }
    const int fresh = n_parts_of(parts);
    bool moved = false;
    for (const int u : nodes)
        if (!in_half[u])
        {
            parts[u] = fresh;
            moved = true;
        }
    return moved;
}

} // namespace

std::vector<int> repair_partition(const LevelTopology& fine, std::vector<int> parts)
{
    DERAMG_REQUIRE(static_cast<int>(parts.size()) == fine.counts[3], TopologyError,
                   "partition size does not match element count");
    renumber_by_min_node(parts); // also compacts unused part ids
    const DualGraph g = build_dual_graph(fine);
    const int max_rounds = std::max(fine.counts[3], 4);

    for (int round = 0; round < max_rounds; ++round)
    {
        bool changed = false;

        // connectivity
        const int np = n_parts_of(parts);
        int next = np;
        for (int p = 0; p < np; ++p)
        {
            const auto comps = part_components(g, parts, p);
            for (std::size_t c = 1; c < comps.size(); ++c, ++next)
                for (const int u : comps[c])
                    parts[u] = next;
            changed = changed || comps.size() > 1;
        }
        if (changed)
        {
            renumber_by_min_node(parts);
            continue;
        }

        // ball-likeness of agglomerates
        std::vector<std::vector<int>> members(n_parts_of(parts));
        for (int i = 0; i < fine.counts[3]; ++i)
            members[parts[i]].push_back(i);
        for (std::size_t p = 0; p < members.size(); ++p)
            if (agglomerate_euler(fine, members[p]) != 1)
                changed = bisect_part(g, parts, static_cast<int>(p)) || changed;
        if (changed)
        {
            renumber_by_min_node(parts);
            continue;
        }

        // full derivation: facet and edge shape checks
        try
        {
            coarsen_topology(fine, parts);
            return parts;
        }
        catch (const TopologyProblem& tp)
        {
            bool split = false;
            // split the largest blamed agglomerate that can split
            std::vector<int> blame = tp.blame;
            std::sort(blame.begin(), blame.end(), [&](int a, int b) {
                return std::count(parts.begin(), parts.end(), a) >
                       std::count(parts.begin(), parts.end(), b);
            });
            for (const int p : blame)
                if (bisect_part(g, parts, p))
                {
                    split = true;
                    break;
                }
            if (!split)
                throw RepairFailed("cannot split any blamed agglomerate: " +
                                   std::string(tp.what()));
            renumber_by_min_node(parts);
        }
    }
    throw RepairFailed("partition repair did not settle");
}

AgglomeratedTopology topology_check_and_repair(const LevelTopology& fine,
                                               const AgglomeratedTopology& topo)
{
    return coarsen_topology(fine, repair_partition(fine, topo.parts_));
}

std::vector<AgglomeratedTopology> coarsen_recursive(const LevelTopology& fine,
                                                    const std::vector<int>& factors,
                                                    unsigned seed)
{
    std::vector<AgglomeratedTopology> steps;
    const LevelTopology* level = &fine;
    for (const int factor : factors)
    {
        DERAMG_REQUIRE(factor >= 2, Error, "coarsening factor must be >= 2");
        const DualGraph g = build_dual_graph(*level);
        const int n_parts =
            std::max(1, (level->counts[3] + factor - 1) / factor);
        std::vector<int> parts = partition_graph(g, n_parts, seed);
        parts = repair_partition(*level, std::move(parts));
        steps.push_back(coarsen_topology(*level, parts));
        level = &steps.back().coarse;
    }
    return steps;
}

void dump_topology(const AgglomeratedTopology& t, std::ostream& os)
{
    os << "entities " << t.coarse.counts[0] << ' ' << t.coarse.counts[1] << ' '
       << t.coarse.counts[2] << ' ' << t.coarse.counts[3] << '\n';
    for (std::size_t p = 0; p < t.ae_element.size(); ++p)
    {
        os << "element " << p << " :";
        for (const int e : t.ae_element[p])
            os << ' ' << e;
        os << '\n';
    }
    for (std::size_t f = 0; f < t.af_facet.size(); ++f)
    {
        os << "facet " << f << " (attr " << t.coarse.facet_attribute[f] << ") :";
        for (const auto& [id, s] : t.af_facet[f])
            os << ' ' << (s > 0 ? "+" : "-") << id;
        os << '\n';
    }
    for (std::size_t e = 0; e < t.aedge_edge.size(); ++e)
    {
        os << "edge " << e << " :";
        for (const auto& [id, s] : t.aedge_edge[e])
            os << ' ' << (s > 0 ? "+" : "-") << id;
        os << '\n';
    }
    os << "vertex :";
    for (const int v : t.av_vertex)
        os << ' ' << v;
    os << '\n';
}

} // namespace deramg
