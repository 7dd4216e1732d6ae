// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "deramg/solvers.hpp"

using namespace deramg;

namespace
{

Vector random_vec(int n, unsigned seed)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    Vector v(n);
    for (double& x : v)
        x = val(gen);
    return v;
}

SparseMatrix spd_tridiag(int n)
{
    std::vector<std::tuple<int, int, double>> t;
    for (int i = 0; i < n; ++i)
    {
        t.emplace_back(i, i, 2.0);
        if (i > 0)
        {
            t.emplace_back(i, i - 1, -1.0);
            t.emplace_back(i - 1, i, -1.0);
        }
    }
    return SparseMatrix::from_triplets(n, n, t);
}

double energy(const SparseMatrix& A, const Vector& e)
{
    return dot(e, A.mult(e));
}

Hierarchy small_hierarchy(int form, int levels = 2, bool trivial = false)
{
    const Mesh m = uniform_refine(generate_cube_mesh(1));
    HierarchyOptions opt;
    opt.levels = levels;
    opt.factor = 8;
    opt.target_order = 1;
    opt.trivial_partition = trivial;
    return Hierarchy(m, form, Coefficient::constant(1.0, 1.0), opt);
}

} // namespace

TEST_CASE("l1-sgs basics")
{
    const auto D = SparseMatrix::diagonal({2.0, 5.0, 0.5});
    const Vector r = {2.0, 10.0, 1.0};
    const Vector c = l1_sgs_apply(D, r, 1);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] == doctest::Approx(2.0));
    CHECK(c[2] == doctest::Approx(2.0));

    const Vector z = l1_sgs_apply(D, {0, 0, 0}, 3);
    for (const double v : z)
        CHECK(v == 0.0);

    const auto Z = SparseMatrix::zero(2, 2);
    CHECK_THROWS_AS(l1_sgs_apply(Z, {1, 1}, 1), ZeroDiagonal);
}

TEST_CASE("l1-sgs is an energy contraction on SPD systems")
{
    const auto A = spd_tridiag(12);
    const L1SgsSmoother sm(A, 1);
    Vector x = random_vec(12, 3);
    const Vector b(12, 0.0);
    double prev = energy(A, x);
    for (int k = 0; k < 10; ++k)
    {
        sm.relax(b, x);
        const double cur = energy(A, x);
        CHECK(cur <= prev * (1.0 + 1e-14));
        prev = cur;
    }
}

TEST_CASE("hybrid smoother: definition and kernel handling")
{
    const Hierarchy h = small_hierarchy(kHdiv);
    const SparseMatrix& A = h.system(0);
    const SparseMatrix& D = h.kernel_transfer(0);
    const int n = A.rows();
    const HybridSmoother hyb(A, D, 2);

    Vector x(n, 0.0);
    hyb.relax(Vector(n, 0.0), x);
    for (const double v : x)
        CHECK(v == 0.0);

    // the application equals the two factor steps in sequence
    const Vector b = random_vec(n, 5);
    Vector x1 = random_vec(n, 6);
    Vector x2 = x1;
    hyb.relax(b, x1);
    {
        L1SgsSmoother primary(A, 2);
        const SparseMatrix A_aux = with_unit_diagonal_where_zero(rap(A, D));
        L1SgsSmoother aux(A_aux, 2);
        primary.relax(b, x2);
        Vector r = A.mult(x2);
        for (int i = 0; i < n; ++i)
            r[i] = b[i] - r[i];
        Vector c(A_aux.rows(), 0.0);
        aux.relax(D.mult_transpose(r), c);
        axpy(1.0, D.mult(c), x2);
    }
    for (int i = 0; i < n; ++i)
        CHECK(x1[i] == doctest::Approx(x2[i]).epsilon(1e-13).scale(1.0));

    // a pure-kernel error is reduced far better by the hybrid step
    const Vector y = random_vec(D.cols(), 9);
    Vector e = D.mult(y);
    const double e0 = energy(A, e);
    Vector xa = e, xb = e;
    hyb.relax(Vector(n, 0.0), xa);
    L1SgsSmoother primary(A, 2);
    primary.relax(Vector(n, 0.0), xb);
    CHECK(energy(A, xa) < 0.5 * energy(A, xb));
    CHECK(energy(A, xa) < e0);
}

TEST_CASE("pcg basics")
{
    const auto I = SparseMatrix::identity(5);
    const MatrixOperator A(I);
    const IdentityOperator B(5);
    const Vector b = {1, 2, 3, 4, 5};

    const PcgResult r = pcg(A, B, b, 1e-10, 10);
    CHECK(r.converged);
    CHECK(r.iterations <= 1);

    const PcgResult r2 = pcg(A, B, b, 1e-10, 10, &b);
    CHECK(r2.converged);
    CHECK(r2.iterations == 0);

    Vector d(100);
    for (int i = 0; i < 100; ++i)
        d[i] = i + 1.0;
    const auto Adiag = SparseMatrix::diagonal(d);
    const MatrixOperator Aop(Adiag);
    const SmootherOperator Bj(std::make_shared<JacobiSmoother>(Adiag, 1));
    const PcgResult r3 = pcg(Aop, Bj, random_vec(100, 4), 1e-12, 50);
    CHECK(r3.converged);
    CHECK(r3.iterations == 1);
}

TEST_CASE("pcg flags non-convergence and keeps the best iterate")
{
    const auto A = spd_tridiag(50);
    const MatrixOperator Aop(A);
    const IdentityOperator B(50);
    const PcgResult r = pcg(Aop, B, random_vec(50, 8), 1e-14, 3);
    CHECK(!r.converged);
    CHECK(r.iterations == 3);
    CHECK(r.residuals.size() == 4);
}

namespace
{

class ExactSmoother : public Smoother
{
public:
    explicit ExactSmoother(const SparseMatrix& A) : A_(A), chol_(A) {}
    void relax(const Vector& b, Vector& x) const override
    {
        Vector r = A_.mult(x);
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = b[i] - r[i];
        const Vector c = chol_.solve(r);
        for (std::size_t i = 0; i < r.size(); ++i)
            x[i] += c[i];
    }
    void relax_transpose(const Vector& b, Vector& x) const override
    {
        relax(b, x);
    }
    int size() const override { return A_.rows(); }

private:
    const SparseMatrix& A_;
    SparseCholesky chol_;
};

} // namespace

TEST_CASE("vcycle with exact components returns the exact solution")
{
    const Hierarchy h = small_hierarchy(kHdiv);
    std::vector<std::shared_ptr<const Smoother>> sm = {
        std::make_shared<ExactSmoother>(h.system(0))};
    const VCyclePreconditioner V(h, sm,
                                 make_coarse_solver(h, CoarseSolverKind::Direct));
    const Vector b = random_vec(h.system(0).rows(), 11);
    const Vector x = V.apply(b);
    const Vector Ax = h.system(0).mult(x);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
    {
        err += (Ax[i] - b[i]) * (Ax[i] - b[i]);
        scale += b[i] * b[i];
    }
    CHECK(std::sqrt(err) <= 1e-10 * std::sqrt(scale));

    const Vector z = V.apply(Vector(b.size(), 0.0));
    for (const double v : z)
        CHECK(v == 0.0);
}

TEST_CASE("vcycle preconditioner is symmetric and contracts the error")
{
    for (const int form : {int(kHcurl), int(kHdiv)})
    {
        const Hierarchy h = small_hierarchy(form);
        std::vector<std::shared_ptr<const Smoother>> sm;
        for (int l = 0; l + 1 < h.n_levels(); ++l)
            sm.push_back(std::make_shared<HybridSmoother>(
                h.system(l), h.kernel_transfer(l), 2));
        const VCyclePreconditioner V(
            h, sm, make_coarse_solver(h, CoarseSolverKind::Direct));

        const int n = h.system(0).rows();
        for (unsigned s = 0; s < 20; ++s)
        {
            const Vector r1 = random_vec(n, 100 + s);
            const Vector r2 = random_vec(n, 200 + s);
            const double a = dot(r1, V.apply(r2));
            const double b2 = dot(r2, V.apply(r1));
            CHECK(a == doctest::Approx(b2).epsilon(1e-10));
        }

        const SparseMatrix& A = h.system(0);
        for (unsigned s = 0; s < 10; ++s)
        {
            Vector e = random_vec(n, 300 + s);
            const double before = energy(A, e);
            const Vector x1 = V.iterate(Vector(n, 0.0), e);
            CHECK(energy(A, x1) < before);
        }
    }
}

TEST_CASE("auxiliary-space preconditioner is symmetric positive definite")
{
    for (const int form : {int(kHcurl), int(kHdiv)})
    {
        const Hierarchy h = small_hierarchy(form, 1);
        const SparseMatrix& A = h.system(0);
        const AuxSpacePreconditioner B(A, form, h.nodal_interp(0),
                                       h.kernel_transfer(0),
                                       h.nodal_interp_prev(0),
                                       h.kernel_transfer_prev(0), 2);
        const int n = A.rows();

        const Vector z = B.apply(Vector(n, 0.0));
        for (const double v : z)
            CHECK(v == 0.0);

        for (unsigned s = 0; s < 20; ++s)
        {
            const Vector r1 = random_vec(n, 50 + s);
            const Vector r2 = random_vec(n, 80 + s);
            CHECK(dot(r1, B.apply(r2)) ==
                  doctest::Approx(dot(r2, B.apply(r1))).epsilon(1e-10));
            CHECK(dot(r1, B.apply(r1)) > 0.0);
        }
    }
}

TEST_CASE("coarse solver options")
{
    const Hierarchy h = small_hierarchy(kHdiv);
    const int lc = h.n_levels() - 1;
    const SparseMatrix& Ac = h.system(lc);
    const Vector b = random_vec(Ac.rows(), 21);

    const auto direct = make_coarse_solver(h, CoarseSolverKind::Direct);
    const Vector x = direct->apply(b);
    const Vector Ax = Ac.mult(x);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
    {
        err += (Ax[i] - b[i]) * (Ax[i] - b[i]);
        scale += b[i] * b[i];
    }
    CHECK(std::sqrt(err) <= 1e-10 * std::sqrt(scale));

    // five iterations of aux-preconditioned PCG reduce the B-norm residual
    // monotonically
    const auto prec = std::make_shared<AuxSpacePreconditioner>(
        Ac, h.form(), h.nodal_interp(lc), h.kernel_transfer(lc),
        h.nodal_interp_prev(lc), h.kernel_transfer_prev(lc), 2);
    const auto aop = std::make_shared<MatrixOperator>(Ac);
    const PcgResult r = pcg(*aop, *prec, b, 0.0, 5);
    REQUIRE(r.residuals.size() == 6);
    for (std::size_t k = 1; k < r.residuals.size(); ++k)
        CHECK(r.residuals[k] <= r.residuals[k - 1] * (1.0 + 1e-12));
}

TEST_CASE("hierarchy structure and complexities")
{
    const Hierarchy h1 = small_hierarchy(kHdiv, 1);
    const auto [gc1, oc1] = h1.complexities();
    CHECK(gc1 == doctest::Approx(1.0));
    CHECK(oc1 == doctest::Approx(1.0));

    const Hierarchy h2 = small_hierarchy(kHdiv, 2, /*trivial=*/true);
    const auto [gc2, oc2] = h2.complexities();
    CHECK(gc2 == doctest::Approx(2.0));
    CHECK(oc2 == doctest::Approx(2.0));

    const Hierarchy h = small_hierarchy(kHcurl, 2);
    CHECK(h.n_levels() == 2);
    CHECK(h.system(1).rows() < h.system(0).rows());
    const SparseMatrix expect = rap_level(h.system(0), h.prolongator(0));
    const SparseMatrix diff = add(expect, h.system(1), -1.0);
    double mx = 0.0;
    for (const double v : diff.values())
        mx = std::max(mx, std::abs(v));
    CHECK(mx <= 1e-12);
}

TEST_CASE("end-to-end amge pcg on the 48-tet cube")
{
    for (const int form : {int(kHcurl), int(kHdiv)})
    {
        const Hierarchy h = small_hierarchy(form);
        const auto B = make_amge_preconditioner(h);
        const MatrixOperator A(h.system(0));
        const Vector b = h.constant_load();
        const PcgResult r = pcg(A, *B, b, 1e-6, 200);
        CHECK(r.converged);
        CHECK(r.iterations < 60);
    }
}
