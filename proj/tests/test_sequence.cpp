// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "deramg/sequence.hpp"
#include "deramg/sparse_cholesky.hpp"
#include "deramg/svd.hpp"

using namespace deramg;

namespace
{

Mesh reference_tet()
{
    return Mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                {{0, 1, 2, 3}}, {1});
}

} // namespace

TEST_CASE("fine sequence dimensions and incidence convention")
{
    const Mesh m = reference_tet();
    const SequenceLevel L = build_fine_sequence(m, 0);
    CHECK(L.dims[kH1] == 4);
    CHECK(L.dims[kHcurl] == 6);
    CHECK(L.dims[kHdiv] == 4);
    CHECK(L.dims[kL2] == 1);

    CHECK(L.derivative[0].rows() == 6);
    CHECK(L.derivative[0].cols() == 4);
    const int e01 = m.edge_id(0, 1);
    CHECK(L.derivative[0].get(e01, 0) == -1.0);
    CHECK(L.derivative[0].get(e01, 1) == 1.0);

    // D2 D1 = 0 and D3 D2 = 0 exactly
    L.check_complex(0.0);
}

TEST_CASE("exactness ranks on the 6-tet cube")
{
    const Mesh m = generate_cube_mesh(1);
    const SequenceLevel L = build_fine_sequence(m, 0);
    const auto D0 = DenseMatrix::from_sparse(L.derivative[0]);
    const auto D1 = DenseMatrix::from_sparse(L.derivative[1]);
    const auto D2 = DenseMatrix::from_sparse(L.derivative[2]);

    const int r0 = rank(D0);
    const int r1 = rank(D1);
    const int r2 = rank(D2);
    CHECK(r0 == L.dims[kH1] - 1);              // nullity(D0) = 1
    CHECK(L.dims[kHcurl] - r1 == r0);          // rank(D0) = nullity(D1)
    CHECK(L.dims[kHdiv] - r2 == r1);           // rank(D1) = nullity(D2)
    CHECK(r2 == L.dims[kL2]);                  // D2 surjective
}

TEST_CASE("local mass matrices match closed forms")
{
    const Mesh m = reference_tet();
    const SequenceLevel L = build_fine_sequence(m, 0);

    // L2 mass = element volume
    const auto Ml2 = assemble_mass(L, kL2);
    CHECK(Ml2.get(0, 0) == doctest::Approx(1.0 / 6.0));

    // H1 mass: diag |K|/10, off-diagonal |K|/20
    const auto Mh1 = assemble_mass(L, kH1);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(Mh1.get(i, j) ==
                  doctest::Approx((i == j ? 1.0 / 60.0 : 1.0 / 120.0)));

    // doubling the weight doubles the matrix
    const auto M2 = assemble_mass(L, kH1, Vector(1, 2.0));
    for (int i = 0; i < 4; ++i)
        CHECK(M2.get(i, i) == doctest::Approx(2.0 * Mh1.get(i, i)));
}

TEST_CASE("mass matrices integrate constant fields exactly")
{
    const Mesh m = generate_cube_mesh(2);
    const SequenceLevel L = build_fine_sequence(m, 0);
    const Point c = {0.3, -1.2, 0.7};
    const double c2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];

    const Vector uc = interpolate(L, m, kHcurl, [&](const Point&) { return c; });
    const auto Mc = assemble_mass(L, kHcurl);
    CHECK(dot(uc, Mc.mult(uc)) == doctest::Approx(c2).epsilon(1e-12));

    const Vector ud = interpolate(L, m, kHdiv, [&](const Point&) { return c; });
    const auto Md = assemble_mass(L, kHdiv);
    CHECK(dot(ud, Md.mult(ud)) == doctest::Approx(c2).epsilon(1e-12));

    const Vector uh = interpolate(L, m, kH1, [](const Point& p) { return p[0]; });
    const auto Mh = assemble_mass(L, kH1);
    CHECK(dot(uh, Mh.mult(uh)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("interpolation conventions")
{
    const Mesh m = generate_cube_mesh(2);
    const SequenceLevel L = build_fine_sequence(m, 0);

    const Vector vx = interpolate(L, m, kH1, [](const Point& p) { return p[0]; });
    for (int v = 0; v < m.n_vertices(); ++v)
        CHECK(vx[v] == doctest::Approx(m.vertices()[v][0]));

    // grad x interpolated on edges equals D1 * (vertex x-values)
    const Vector ex = interpolate(L, m, kHcurl, [](const Point&) {
        return Point{1, 0, 0};
    });
    const Vector d1vx = L.derivative[0].mult(vx);
    for (int e = 0; e < m.n_edges(); ++e)
        CHECK(ex[e] == doctest::Approx(d1vx[e]).epsilon(1e-13).scale(1.0));

    const Vector ones = interpolate(L, m, kL2, [](const Point&) { return 1.0; });
    for (const double o : ones)
        CHECK(o == doctest::Approx(1.0));
}

TEST_CASE("fine commutativity for linear fields")
{
    const Mesh m = generate_cube_mesh(2);
    const SequenceLevel L = build_fine_sequence(m, 0);
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> val(-1.0, 1.0);

    // grad: D1 interp_H1(f) = interp_curl(grad f)
    {
        const double a = val(gen), b = val(gen), c = val(gen), d = val(gen);
        const Vector u = interpolate(L, m, kH1, [&](const Point& p) {
            return a * p[0] + b * p[1] + c * p[2] + d;
        });
        const Vector lhs = L.derivative[0].mult(u);
        const Vector rhs = interpolate(L, m, kHcurl, [&](const Point&) {
            return Point{a, b, c};
        });
        for (int e = 0; e < m.n_edges(); ++e)
            CHECK(lhs[e] == doctest::Approx(rhs[e]).epsilon(1e-12).scale(1.0));
    }

    // curl: D2 interp_curl(F) = interp_div(curl F), F linear
    {
        DenseMatrix A(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                A(i, j) = val(gen);
        const Point curlF = {A(2, 1) - A(1, 2), A(0, 2) - A(2, 0),
                             A(1, 0) - A(0, 1)};
        const Vector u = interpolate(L, m, kHcurl, [&](const Point& p) {
            Point v = {0, 0, 0};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    v[i] += A(i, j) * p[j];
            return v;
        });
        const Vector lhs = L.derivative[1].mult(u);
        const Vector rhs =
            interpolate(L, m, kHdiv, [&](const Point&) { return curlF; });
        for (int f = 0; f < m.n_facets(); ++f)
            CHECK(lhs[f] == doctest::Approx(rhs[f]).epsilon(1e-12).scale(1.0));
    }

    // div: stored D2 gives element integrals; the operator form gives values
    {
        const Vector u = interpolate(L, m, kHdiv, [&](const Point& p) {
            return Point{2 * p[0], -3 * p[1], 0.5 * p[2]};
        });
        const double divF = 2.0 - 3.0 + 0.5;
        const Vector lhs = L.derivative_op(2).mult(u);
        for (int t = 0; t < m.n_elements(); ++t)
            CHECK(lhs[t] == doctest::Approx(divF).epsilon(1e-12));
    }
}

TEST_CASE("assemble_form is SPD with essential elimination")
{
    const Mesh m = generate_cube_mesh(1);
    const SequenceLevel L = build_fine_sequence(m, 0);
    const auto coeff = Coefficient::constant(1.0, 1.0);

    for (const int s : {int(kHcurl), int(kHdiv)})
    {
        const auto A = assemble_form(L, s, coeff);
        // exact symmetry
        const auto At = transpose(A);
        REQUIRE(At.nnz() == A.nnz());
        for (int i = 0; i < A.rows(); ++i)
        {
            auto c1 = A.row_cols(i);
            auto v1 = A.row_values(i);
            for (std::size_t k = 0; k < c1.size(); ++k)
                CHECK(v1[k] == At.get(i, c1[k]));
        }
        // SPD: Cholesky succeeds
        CHECK_NOTHROW(SparseCholesky chol(A));
    }
}

TEST_CASE("natural-BC div form energy of a constant field")
{
    const Mesh m = reference_tet();
    const SequenceLevel L = build_fine_sequence(m, 0);
    const double beta = 4.0;
    Coefficient coeff;
    coeff.set(1, 1.0, beta);
    const auto A = assemble_form(L, kHdiv, coeff, /*eliminate_essential=*/false);
    const Vector u = interpolate(L, m, kHdiv, [](const Point&) {
        return Point{1, 0, 0};
    });
    // div u = 0, so u^T A u = beta * |u|^2 * volume
    CHECK(dot(u, A.mult(u)) == doctest::Approx(beta / 6.0).epsilon(1e-12));
}

TEST_CASE("coefficients validate attributes")
{
    const Mesh m = generate_cube_mesh(1);
    const SequenceLevel L = build_fine_sequence(m, 0);
    Coefficient c;
    c.set(2, 1.0, 1.0); // mesh uses attribute 1
    CHECK_THROWS_AS(assemble_form(L, kHdiv, c), UnknownAttribute);
    CHECK_THROWS_AS(c.set(1, -1.0, 1.0), Error);
}

TEST_CASE("target counts and rank")
{
    const Mesh m = generate_cube_mesh(1);
    const SequenceLevel p0 = build_fine_sequence(m, 0);
    CHECK(p0.targets[kHdiv].cols() == 3);
    CHECK(p0.targets[kL2].cols() == 1);
    for (int t = 0; t < m.n_elements(); ++t)
        CHECK(p0.targets[kL2](t, 0) == doctest::Approx(1.0));
    CHECK(p0.targets[kH1].cols() == 0);

    const SequenceLevel p1 = build_fine_sequence(m, 1);
    CHECK(p1.targets[kL2].cols() == 4);
    CHECK(p1.targets[kHcurl].cols() == 12);

    // rank 4 needs element centroids in general position; the 6 Kuhn tets
    // of a single cube have coplanar centroids, two cubes do not
    const Mesh m2 = generate_cube_mesh(2);
    const SequenceLevel q1 = build_fine_sequence(m2, 1);
    CHECK(rank(q1.targets[kL2]) == 4);
}

TEST_CASE("vector nodal interpolation operators")
{
    const Mesh m = generate_cube_mesh(2);
    const SequenceLevel L = build_fine_sequence(m, 0);
    const int d0 = L.dims[kH1];
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> val(-1.0, 1.0);

    // constant field: pi_hat of its nodal interpolant equals direct
    // interpolation
    {
        const Point c = {val(gen), val(gen), val(gen)};
        Vector nodal(3 * d0);
        for (int comp = 0; comp < 3; ++comp)
            for (int v = 0; v < d0; ++v)
                nodal[comp * d0 + v] = c[comp];
        const Vector via_hat = L.pi_hat[1].mult(nodal);
        const Vector direct =
            interpolate(L, m, kHdiv, [&](const Point&) { return c; });
        for (int f = 0; f < m.n_facets(); ++f)
            CHECK(via_hat[f] ==
                  doctest::Approx(direct[f]).epsilon(1e-12).scale(1.0));

        const Vector via_hat_c = L.pi_hat[0].mult(nodal);
        const Vector direct_c =
            interpolate(L, m, kHcurl, [&](const Point&) { return c; });
        for (int e = 0; e < m.n_edges(); ++e)
            CHECK(via_hat_c[e] ==
                  doctest::Approx(direct_c[e]).epsilon(1e-12).scale(1.0));
    }

    // x-extent of edges for the unit x field
    {
        Vector nodal(3 * d0, 0.0);
        for (int v = 0; v < d0; ++v)
            nodal[v] = 1.0;
        const Vector u = L.pi_hat[0].mult(nodal);
        for (int e = 0; e < m.n_edges(); ++e)
        {
            const auto& pr = m.edges()[e];
            const double extent =
                m.vertices()[pr[1]][0] - m.vertices()[pr[0]][0];
            CHECK(u[e] == doctest::Approx(extent).epsilon(1e-13).scale(1.0));
        }
    }

    // random linear field
    {
        DenseMatrix A(3, 3);
        Point b;
        for (int i = 0; i < 3; ++i)
        {
            b[i] = val(gen);
            for (int j = 0; j < 3; ++j)
                A(i, j) = val(gen);
        }
        auto field = [&](const Point& p) {
            Point v = b;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    v[i] += A(i, j) * p[j];
            return v;
        };
        Vector nodal(3 * d0);
        for (int comp = 0; comp < 3; ++comp)
            for (int v = 0; v < d0; ++v)
                nodal[comp * d0 + v] = field(m.vertices()[v])[comp];
        for (const int s : {0, 1})
        {
            const Vector via_hat = L.pi_hat[s].mult(nodal);
            const Vector direct = interpolate(L, m, s + 1, field);
            for (std::size_t i = 0; i < via_hat.size(); ++i)
                CHECK(via_hat[i] ==
                      doctest::Approx(direct[i]).epsilon(1e-12).scale(1.0));
        }
    }
}
