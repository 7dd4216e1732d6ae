// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/sequence.hpp"

#include <array>
#include <cmath>

namespace deramg
{

namespace
{

inline Point sub(const Point& a, const Point& b)
{
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Point cross(const Point& a, const Point& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

inline double dot3(const Point& a, const Point& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Point scale3(const Point& a, double s)
{
    return {a[0] * s, a[1] * s, a[2] * s};
}

// Barycentric gradients of a tet given its four vertex positions.
std::array<Point, 4> tet_gradients(const std::array<Point, 4>& p)
{
    const Point c1 = sub(p[1], p[0]);
    const Point c2 = sub(p[2], p[0]);
    const Point c3 = sub(p[3], p[0]);
    const double det = dot3(cross(c1, c2), c3);
    const Point r1 = scale3(cross(c2, c3), 1.0 / det);
    const Point r2 = scale3(cross(c3, c1), 1.0 / det);
    const Point r3 = scale3(cross(c1, c2), 1.0 / det);
    return {{{-r1[0] - r2[0] - r3[0], -r1[1] - r2[1] - r3[1],
              -r1[2] - r2[2] - r3[2]},
             r1, r2, r3}};
}

// In-plane barycentric gradients of a triangle with canonical normal.
std::array<Point, 3> tri_gradients(const Point& a, const Point& b, const Point& c,
                                   const Point& unit_normal, double area)
{
    const double inv = 1.0 / (2.0 * area);
    return {scale3(cross(unit_normal, sub(c, b)), inv),
            scale3(cross(unit_normal, sub(a, c)), inv),
            scale3(cross(unit_normal, sub(b, a)), inv)};
}

} // namespace

SparseMatrix SequenceLevel::derivative_op(int s) const
{
    if (s != 2)
        return derivative[s];
    SparseMatrix D = derivative[2];
    for (int i = 0; i < D.rows(); ++i)
    {
        auto vals = D.row_values(i);
        for (double& v : vals)
            v *= l2_op_scale[i];
    }
    return D;
}

void SequenceLevel::check_complex(double tol) const
{
    for (int s = 0; s < 2; ++s)
    {
        const SparseMatrix DD = multiply(derivative[s + 1], derivative[s]);
        double scale = 1.0;
        for (const double v : derivative[s].values())
            scale = std::max(scale, std::abs(v));
        for (const double v : DD.values())
            DERAMG_REQUIRE(std::abs(v) <= tol * scale, ExactnessViolation,
                           "derivative composition is not zero");
    }
}

SequenceLevel build_fine_sequence(const Mesh& mesh, int target_order)
{
    DERAMG_REQUIRE(target_order >= 0 && target_order <= 2, Error,
                   "target order must be in [0, 2]");
    SequenceLevel L;
    L.topo = fine_topology(mesh);
    L.dims = L.topo.counts;
    L.derivative = {L.topo.edge_vertex, L.topo.facet_edge, L.topo.element_facet};

    L.l2_op_scale.resize(mesh.n_elements());
    for (int e = 0; e < mesh.n_elements(); ++e)
        L.l2_op_scale[e] = 1.0 / mesh.element_volume(e);

    for (int s = 0; s < 4; ++s)
    {
        const int n = L.dims[s];
        L.dof_entity_dim[s].assign(n, s);
        L.dof_entity_id[s].resize(n);
        for (int i = 0; i < n; ++i)
            L.dof_entity_id[s][i] = i;
        L.dof_boundary[s] = L.topo.boundary_flags(s);
        L.dof_is_pv[s].assign(n, 1);
        L.dof_integral_weight[s].assign(n, 1.0);
        for (int k = 0; k < 4; ++k)
            L.dofs_on_entity[s][k].assign(L.topo.counts[k], {});
        for (int i = 0; i < n; ++i)
            L.dofs_on_entity[s][s][i] = {i};
    }
    for (int e = 0; e < mesh.n_elements(); ++e)
        L.dof_integral_weight[kL2][e] = mesh.element_volume(e);

    // ---- local Gram matrices
    // vertices
    L.mass[kH1][0].dofs.assign(mesh.n_vertices(), {});
    L.mass[kH1][0].mats.assign(mesh.n_vertices(), DenseMatrix(1, 1));
    for (int v = 0; v < mesh.n_vertices(); ++v)
    {
        L.mass[kH1][0].dofs[v] = {v};
        L.mass[kH1][0].mats[v](0, 0) = 1.0;
    }

    // edges
    L.mass[kH1][1].dofs.resize(mesh.n_edges());
    L.mass[kH1][1].mats.resize(mesh.n_edges());
    L.mass[kHcurl][1].dofs.resize(mesh.n_edges());
    L.mass[kHcurl][1].mats.resize(mesh.n_edges());
    for (int e = 0; e < mesh.n_edges(); ++e)
    {
        const double len = mesh.edge_length(e);
        const auto& pr = mesh.edges()[e];
        DenseMatrix h1(2, 2);
        h1(0, 0) = h1(1, 1) = len / 3.0;
        h1(0, 1) = h1(1, 0) = len / 6.0;
        L.mass[kH1][1].dofs[e] = {pr[0], pr[1]};
        L.mass[kH1][1].mats[e] = h1;

        DenseMatrix hc(1, 1);
        hc(0, 0) = 1.0 / len;
        L.mass[kHcurl][1].dofs[e] = {e};
        L.mass[kHcurl][1].mats[e] = hc;
    }

    // facets
    L.mass[kH1][2].dofs.resize(mesh.n_facets());
    L.mass[kH1][2].mats.resize(mesh.n_facets());
    L.mass[kHcurl][2].dofs.resize(mesh.n_facets());
    L.mass[kHcurl][2].mats.resize(mesh.n_facets());
    L.mass[kHdiv][2].dofs.resize(mesh.n_facets());
    L.mass[kHdiv][2].mats.resize(mesh.n_facets());
    for (int f = 0; f < mesh.n_facets(); ++f)
    {
        const auto& tri = mesh.facets()[f];
        const Point& a = mesh.vertices()[tri[0]];
        const Point& b = mesh.vertices()[tri[1]];
        const Point& c = mesh.vertices()[tri[2]];
        const double area = mesh.facet_area(f);
        const Point n = mesh.facet_normal(f);

        DenseMatrix h1(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                h1(i, j) = area * (i == j ? 2.0 : 1.0) / 12.0;
        L.mass[kH1][2].dofs[f] = {tri[0], tri[1], tri[2]};
        L.mass[kH1][2].mats[f] = h1;

        // tangential-trace Whitney functions of the three edges
        const auto g = tri_gradients(a, b, c, n, area);
        const std::array<std::array<int, 2>, 3> ed = {{{0, 1}, {1, 2}, {0, 2}}};
        std::array<int, 3> eid;
        for (int k = 0; k < 3; ++k)
            eid[k] = mesh.edge_id(tri[ed[k][0]], tri[ed[k][1]]);
        auto itri = [area](int i, int j) {
            return area * (i == j ? 2.0 : 1.0) / 12.0;
        };
        DenseMatrix hc(3, 3);
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s)
            {
                const int ra = ed[r][0], rb = ed[r][1];
                const int sa = ed[s][0], sb = ed[s][1];
                hc(r, s) = itri(ra, sa) * dot3(g[rb], g[sb]) -
                           itri(ra, sb) * dot3(g[rb], g[sa]) -
                           itri(rb, sa) * dot3(g[ra], g[sb]) +
                           itri(rb, sb) * dot3(g[ra], g[sa]);
            }
        L.mass[kHcurl][2].dofs[f] = {eid[0], eid[1], eid[2]};
        L.mass[kHcurl][2].mats[f] = hc;

        DenseMatrix hd(1, 1);
        hd(0, 0) = 1.0 / area;
        L.mass[kHdiv][2].dofs[f] = {f};
        L.mass[kHdiv][2].mats[f] = hd;
    }

    // elements
    for (int s = 0; s < 4; ++s)
    {
        L.mass[s][3].dofs.resize(mesh.n_elements());
        L.mass[s][3].mats.resize(mesh.n_elements());
    }
    for (int t = 0; t < mesh.n_elements(); ++t)
    {
        const auto& el = mesh.elements()[t];
        const std::array<Point, 4> p = {
            mesh.vertices()[el[0]], mesh.vertices()[el[1]], mesh.vertices()[el[2]],
            mesh.vertices()[el[3]]};
        const double vol = mesh.element_volume(t);
        const auto g = tet_gradients(p);
        auto itet = [vol](int i, int j) { return vol * (i == j ? 2.0 : 1.0) / 20.0; };

        DenseMatrix h1(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                h1(i, j) = itet(i, j);
        L.mass[kH1][3].dofs[t] = {el[0], el[1], el[2], el[3]};
        L.mass[kH1][3].mats[t] = h1;

        // six Whitney edge functions oriented by ascending global ids
        std::array<std::array<int, 2>, 6> le;
        std::array<int, 6> geid;
        int m = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
            {
                int li = i, lj = j;
                if (el[li] > el[lj])
                    std::swap(li, lj);
                le[m] = {li, lj};
                geid[m] = mesh.edge_id(el[li], el[lj]);
                ++m;
            }
        DenseMatrix hc(6, 6);
        for (int r = 0; r < 6; ++r)
            for (int s = 0; s < 6; ++s)
            {
                const int ra = le[r][0], rb = le[r][1];
                const int sa = le[s][0], sb = le[s][1];
                hc(r, s) = itet(ra, sa) * dot3(g[rb], g[sb]) -
                           itet(ra, sb) * dot3(g[rb], g[sa]) -
                           itet(rb, sa) * dot3(g[ra], g[sb]) +
                           itet(rb, sb) * dot3(g[ra], g[sa]);
            }
        L.mass[kHcurl][3].dofs[t].assign(geid.begin(), geid.end());
        L.mass[kHcurl][3].mats[t] = hc;

        // four Whitney facet functions, flux +1 across the canonical normal
        std::array<std::array<Point, 3>, 4> wc;
        std::array<std::array<int, 3>, 4> lf;
        std::array<int, 4> gfid;
        std::array<double, 4> wsign;
        for (int skip = 0; skip < 4; ++skip)
        {
            std::array<int, 3> loc;
            int k = 0;
            for (int a2 = 0; a2 < 4; ++a2)
                if (a2 != skip)
                    loc[k++] = a2;
            std::sort(loc.begin(), loc.end(),
                      [&](int x, int y) { return el[x] < el[y]; });
            lf[skip] = loc;
            gfid[skip] = mesh.facet_id(el[loc[0]], el[loc[1]], el[loc[2]]);
            wc[skip] = {cross(g[loc[1]], g[loc[2]]), cross(g[loc[2]], g[loc[0]]),
                        cross(g[loc[0]], g[loc[1]])};
            // The Whitney 2-form has a constant normal component on its own
            // facet; orient it for flux +1 across the canonical normal.
            Point w = {0, 0, 0};
            for (int i = 0; i < 3; ++i)
                for (int d = 0; d < 3; ++d)
                    w[d] += 2.0 * wc[skip][i][d] / 3.0;
            const double flux =
                mesh.facet_area(gfid[skip]) * dot3(w, mesh.facet_normal(gfid[skip]));
            wsign[skip] = flux > 0 ? 1.0 : -1.0;
        }
        DenseMatrix hd(4, 4);
        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s)
            {
                double acc = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        acc += itet(lf[r][i], lf[s][j]) * dot3(wc[r][i], wc[s][j]);
                hd(r, s) = 4.0 * wsign[r] * wsign[s] * acc;
            }
        L.mass[kHdiv][3].dofs[t].assign(gfid.begin(), gfid.end());
        L.mass[kHdiv][3].mats[t] = hd;

        DenseMatrix l2(1, 1);
        l2(0, 0) = vol;
        L.mass[kL2][3].dofs[t] = {t};
        L.mass[kL2][3].mats[t] = l2;
    }

    // ---- targets: interpolants of monomials up to target_order
    std::vector<std::array<int, 3>> monos;
    for (int d = 0; d <= target_order; ++d)
        for (int a = d; a >= 0; --a)
            for (int b = d - a; b >= 0; --b)
                monos.push_back({a, b, d - a - b});
    auto mono = [](const std::array<int, 3>& m, const Point& x) {
        double v = 1.0;
        for (int k = 0; k < m[0]; ++k)
            v *= x[0];
        for (int k = 0; k < m[1]; ++k)
            v *= x[1];
        for (int k = 0; k < m[2]; ++k)
            v *= x[2];
        return v;
    };

    L.targets[kH1] = DenseMatrix(L.dims[kH1], 0);
    for (const int s : {int(kHcurl), int(kHdiv)})
    {
        DenseMatrix T(L.dims[s], 3 * static_cast<int>(monos.size()));
        int col = 0;
        for (int comp = 0; comp < 3; ++comp)
            for (const auto& mn : monos)
            {
                const Vector t =
                    interpolate(L, mesh, s, [&](const Point& x) {
                        Point v = {0, 0, 0};
                        v[comp] = mono(mn, x);
                        return v;
                    });
                T.set_column(col++, t);
            }
        L.targets[s] = T;
    }
    {
        DenseMatrix T(L.dims[kL2], static_cast<int>(monos.size()));
        int col = 0;
        for (const auto& mn : monos)
        {
            const Vector t = interpolate(
                L, mesh, kL2, [&](const Point& x) { return mono(mn, x); });
            T.set_column(col++, t);
        }
        L.targets[kL2] = T;
    }

    // ---- vector-nodal interpolation operators
    const int d0 = L.dims[kH1];
    {
        std::vector<std::tuple<int, int, double>> trip;
        for (int e = 0; e < mesh.n_edges(); ++e)
        {
            const auto& pr = mesh.edges()[e];
            const Point t = sub(mesh.vertices()[pr[1]], mesh.vertices()[pr[0]]);
            for (int comp = 0; comp < 3; ++comp)
            {
                if (t[comp] == 0.0)
                    continue;
                trip.emplace_back(e, comp * d0 + pr[0], 0.5 * t[comp]);
                trip.emplace_back(e, comp * d0 + pr[1], 0.5 * t[comp]);
            }
        }
        L.pi_hat[0] = SparseMatrix::from_triplets(L.dims[kHcurl], 3 * d0, trip);
    }
    {
        std::vector<std::tuple<int, int, double>> trip;
        for (int f = 0; f < mesh.n_facets(); ++f)
        {
            const auto& tri = mesh.facets()[f];
            const Point an =
                cross(sub(mesh.vertices()[tri[1]], mesh.vertices()[tri[0]]),
                      sub(mesh.vertices()[tri[2]], mesh.vertices()[tri[0]]));
            for (const int v : tri)
                for (int comp = 0; comp < 3; ++comp)
                    if (an[comp] != 0.0)
                        trip.emplace_back(f, comp * d0 + v, an[comp] / 6.0);
        }
        L.pi_hat[1] = SparseMatrix::from_triplets(L.dims[kHdiv], 3 * d0, trip);
    }

    L.l2_const_rep.assign(L.dims[kL2], 1.0);
    return L;
}

SparseMatrix assemble_mass(const SequenceLevel& level, int space,
                           const Vector& element_weight)
{
    DERAMG_REQUIRE(static_cast<int>(element_weight.size()) == level.topo.counts[3],
                   DimensionMismatch, "one weight per element required");
    const auto& local = level.mass[space][3];
    std::vector<std::tuple<int, int, double>> trip;
    for (int t = 0; t < level.topo.counts[3]; ++t)
    {
        const auto& dofs = local.dofs[t];
        const auto& M = local.mats[t];
        for (std::size_t i = 0; i < dofs.size(); ++i)
            for (std::size_t j = 0; j < dofs.size(); ++j)
                trip.emplace_back(dofs[i], dofs[j],
                                  element_weight[t] * M(int(i), int(j)));
    }
    return SparseMatrix::from_triplets(level.dims[space], level.dims[space], trip);
}

SparseMatrix assemble_mass(const SequenceLevel& level, int space)
{
    return assemble_mass(level, space, Vector(level.topo.counts[3], 1.0));
}

Vector alpha_weights(const SequenceLevel& level, const Coefficient& coeff)
{
    Vector w(level.topo.counts[3]);
    for (int t = 0; t < level.topo.counts[3]; ++t)
        w[t] = coeff.alpha(level.topo.element_attribute[t]);
    return w;
}

Vector beta_weights(const SequenceLevel& level, const Coefficient& coeff)
{
    Vector w(level.topo.counts[3]);
    for (int t = 0; t < level.topo.counts[3]; ++t)
        w[t] = coeff.beta(level.topo.element_attribute[t]);
    return w;
}

SparseMatrix assemble_form(const SequenceLevel& level, int space,
                           const Coefficient& coeff, bool eliminate_essential)
{
    DERAMG_REQUIRE(space == kHcurl || space == kHdiv, Error,
                   "forms are defined on H(curl) and H(div)");
    const SparseMatrix D = level.derivative_op(space);
    const SparseMatrix Ma =
        assemble_mass(level, space + 1, alpha_weights(level, coeff));
    const SparseMatrix Mb = assemble_mass(level, space, beta_weights(level, coeff));
    SparseMatrix A = add(triple_product(transpose(D), Ma, D), Mb);

    if (eliminate_essential)
    {
        const auto& flag = level.dof_boundary[space];
        A.zero_rows(flag);
        A.zero_cols(flag);
        std::vector<std::tuple<int, int, double>> diag;
        for (int i = 0; i < A.rows(); ++i)
            if (flag[i])
                diag.emplace_back(i, i, 1.0);
        A = add(A, SparseMatrix::from_triplets(A.rows(), A.cols(), diag));
    }
    return A;
}

Vector interpolate(const SequenceLevel& level, const Mesh& mesh, int space,
                   const std::function<double(const Point&)>& scalar_f)
{
    DERAMG_REQUIRE(space == kH1 || space == kL2, Error,
                   "scalar interpolation is for H1 and L2");
    (void)level;
    if (space == kH1)
    {
        Vector v(mesh.n_vertices());
        for (int i = 0; i < mesh.n_vertices(); ++i)
            v[i] = scalar_f(mesh.vertices()[i]);
        return v;
    }
    // element averages, degree-2 exact four-point rule
    const double qa = 0.58541019662496845;
    const double qb = 0.13819660112501051;
    Vector v(mesh.n_elements());
    for (int t = 0; t < mesh.n_elements(); ++t)
    {
        const auto& el = mesh.elements()[t];
        double acc = 0.0;
        for (int q = 0; q < 4; ++q)
        {
            Point x = {0, 0, 0};
            for (int i = 0; i < 4; ++i)
            {
                const double lam = (i == q) ? qa : qb;
                for (int d = 0; d < 3; ++d)
                    x[d] += lam * mesh.vertices()[el[i]][d];
            }
            acc += 0.25 * scalar_f(x);
        }
        v[t] = acc;
    }
    return v;
}

Vector interpolate(const SequenceLevel& level, const Mesh& mesh, int space,
                   const std::function<Point(const Point&)>& vector_f)
{
    DERAMG_REQUIRE(space == kHcurl || space == kHdiv, Error,
                   "vector interpolation is for H(curl) and H(div)");
    (void)level;
    if (space == kHcurl)
    {
        // tangential line integral, two-point Gauss (degree-3 exact)
        const double s1 = 0.5 - 0.5 / std::sqrt(3.0);
        const double s2 = 0.5 + 0.5 / std::sqrt(3.0);
        Vector v(mesh.n_edges());
        for (int e = 0; e < mesh.n_edges(); ++e)
        {
            const auto& pr = mesh.edges()[e];
            const Point& p0 = mesh.vertices()[pr[0]];
            const Point& p1 = mesh.vertices()[pr[1]];
            const Point t = sub(p1, p0);
            double acc = 0.0;
            for (const double s : {s1, s2})
            {
                const Point x = {p0[0] + s * t[0], p0[1] + s * t[1],
                                 p0[2] + s * t[2]};
                acc += 0.5 * dot3(vector_f(x), t);
            }
            v[e] = acc;
        }
        return v;
    }
    // normal flux, edge-midpoint rule (degree-2 exact)
    Vector v(mesh.n_facets());
    for (int f = 0; f < mesh.n_facets(); ++f)
    {
        const auto& tri = mesh.facets()[f];
        const Point& a = mesh.vertices()[tri[0]];
        const Point& b = mesh.vertices()[tri[1]];
        const Point& c = mesh.vertices()[tri[2]];
        const Point an = scale3(cross(sub(b, a), sub(c, a)), 0.5);
        const std::array<Point, 3> q = {
            Point{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])},
            Point{0.5 * (b[0] + c[0]), 0.5 * (b[1] + c[1]), 0.5 * (b[2] + c[2])},
            Point{0.5 * (a[0] + c[0]), 0.5 * (a[1] + c[1]), 0.5 * (a[2] + c[2])}};
        double acc = 0.0;
        for (const auto& x : q)
            acc += dot3(vector_f(x), an) / 3.0;
        v[f] = acc;
    }
    return v;
}

} // namespace deramg
