// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Runs in minutes on a single core.

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "deramg/app.hpp"
#include "deramg/solvers.hpp"
#include "deramg/sparse_cholesky.hpp"
#include "deramg/svd.hpp"

using namespace deramg;

namespace
{

int g_failures = 0;

void report(int criterion, const std::string& name, bool ok,
            const std::string& detail)
{
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion-" << criterion << "  "
              << name << "  [" << detail << "]" << std::endl;
    if (!ok)
        ++g_failures;
}

double max_abs(const SparseMatrix& A)
{
    double m = 0.0;
    for (const double v : A.values())
        m = std::max(m, std::abs(v));
    return m;
}

Vector random_vec(int n, unsigned seed)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    Vector v(n);
    for (double& x : v)
        x = val(gen);
    return v;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(3) << v;
    return os.str();
}

// ---------------------------------------------------------------- 1
void criterion_invariants()
{
    double w_dd_fine = 0.0, w_dd_coarse = 0.0, w_rinv = 0.0, w_comm = 0.0,
           w_comp = 0.0, w_pv = 0.0;
    bool ranks_ok = true;

    for (const int n : {2, 3})
        for (const int levels : {2, 3})
        {
            const Mesh m = generate_cube_mesh(n);
            HierarchyOptions opt;
            opt.levels = levels;
            opt.factor = 8;
            opt.target_order = 1;
            opt.coarsen.run_checks = false;
            const Hierarchy h(m, kHdiv, Coefficient::constant(1, 1), opt);

            for (int s = 0; s < 2; ++s)
                w_dd_fine = std::max(
                    w_dd_fine, max_abs(multiply(h.level(0).derivative[s + 1],
                                                h.level(0).derivative[s])));

            for (int l = 0; l + 1 < h.n_levels(); ++l)
            {
                const SequenceLevel& fine = h.level(l);
                const SequenceLevel& coarse = h.level(l + 1);
                const auto& P = h.sequence_p(l);
                const auto& Pi = h.sequence_pi(l);

                for (int s = 0; s < 2; ++s)
                    w_dd_coarse = std::max(
                        w_dd_coarse, max_abs(multiply(coarse.derivative[s + 1],
                                                      coarse.derivative[s])));
                for (int s = 0; s < 4; ++s)
                    w_rinv = std::max(
                        w_rinv,
                        max_abs(add(multiply(Pi[s], P[s]),
                                    SparseMatrix::identity(coarse.dims[s]), -1.0)));
                for (int s = 0; s < 3; ++s)
                {
                    const SparseMatrix Dop = fine.derivative_op(s);
                    w_comm = std::max(
                        w_comm, max_abs(add(multiply(coarse.derivative[s], Pi[s]),
                                            multiply(Pi[s + 1], Dop), -1.0)));
                    w_comp = std::max(
                        w_comp,
                        max_abs(add(multiply(Dop, P[s]),
                                    multiply(P[s + 1], coarse.derivative[s]),
                                    -1.0)));
                }
                // PV unit integrals: diagonal of Pi P at PV dofs equals 1 and
                // the integral functional itself is checked at construction;
                // re-verify through the stored integral weights
                for (int s = 0; s < 4; ++s)
                {
                    const SparseMatrix PiP = multiply(Pi[s], P[s]);
                    for (int d = 0; d < coarse.dims[s]; ++d)
                        if (coarse.dof_is_pv[s][d])
                            w_pv = std::max(w_pv, std::abs(PiP.get(d, d) - 1.0));
                }
                if (coarse.dims[kHcurl] <= 500)
                {
                    const int r0 = rank(
                        DenseMatrix::from_sparse(coarse.derivative[0]), 1e-8);
                    const int r1 = rank(
                        DenseMatrix::from_sparse(coarse.derivative[1]), 1e-8);
                    const int r2 = rank(
                        DenseMatrix::from_sparse(coarse.derivative[2]), 1e-8);
                    ranks_ok = ranks_ok && (coarse.dims[0] - r0 == 1) &&
                               (coarse.dims[1] - r1 == r0) &&
                               (coarse.dims[2] - r2 == r1) &&
                               (r2 == coarse.dims[3]);
                }
            }
        }

    report(1, "fine-complex-exact", w_dd_fine == 0.0, "max " + fmt(w_dd_fine));
    report(1, "coarse-complex", w_dd_coarse <= 1e-12, "max " + fmt(w_dd_coarse));
    report(1, "right-inverse", w_rinv <= 1e-10, "max " + fmt(w_rinv));
    report(1, "commutativity", w_comm <= 1e-10, "max " + fmt(w_comm));
    report(1, "compatibility", w_comp <= 1e-10, "max " + fmt(w_comp));
    report(1, "pv-unit-integrals", w_pv <= 1e-12, "max " + fmt(w_pv));
    report(1, "exactness-ranks", ranks_ok, ranks_ok ? "all level pairs" : "rank mismatch");
}

// ---------------------------------------------------------------- 2
void criterion_identity_oracle()
{
    const Mesh m = generate_cube_mesh(2); // 48 tets
    HierarchyOptions opt;
    opt.levels = 2;
    opt.trivial_partition = true;
    const Hierarchy h(m, kHdiv, Coefficient::constant(1, 1), opt);

    bool dims_ok = true;
    for (int s = 0; s < 4; ++s)
        dims_ok = dims_ok && h.level(1).dims[s] == h.level(0).dims[s];

    const MatrixOperator A(h.system(0));
    const Vector b = h.constant_load();

    const DirectSolverOperator exact(h.system(0));
    const PcgResult r_exact = pcg(A, exact, b, 1e-6, 100);

    std::vector<std::shared_ptr<const Smoother>> sm = {
        std::make_shared<HybridSmoother>(h.system(0), h.kernel_transfer(0), 2)};
    const VCyclePreconditioner V(h, sm,
                                 make_coarse_solver(h, CoarseSolverKind::Direct));
    const PcgResult r_mg = pcg(A, V, b, 1e-6, 100);

    const bool ok = dims_ok && r_exact.converged && r_mg.converged &&
                    std::abs(r_mg.iterations - r_exact.iterations) <= 1;
    report(2, "identity-coarsening-oracle", ok,
           "exact " + std::to_string(r_exact.iterations) + " its, vcycle " +
               std::to_string(r_mg.iterations) + " its");
}

// ---------------------------------------------------------------- 3
void criterion_direct_oracle()
{
    for (const int form : {int(kHcurl), int(kHdiv)})
    {
        const Mesh m = generate_cube_mesh(6);
        HierarchyOptions opt;
        opt.levels = 3;
        opt.target_order = 0;
        const Hierarchy h(m, form, Coefficient::constant(1, 1), opt);
        const Vector b = h.constant_load();

        const Vector x_direct = sparse_direct_solve(h.system(0), b);
        const auto B = make_amge_preconditioner(h);
        const MatrixOperator A(h.system(0));
        const PcgResult r = pcg(A, *B, b, 1e-6, 500);

        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i)
        {
            diff += (r.x[i] - x_direct[i]) * (r.x[i] - x_direct[i]);
            scale += x_direct[i] * x_direct[i];
        }
        const double rel = std::sqrt(diff / scale);
        report(3,
               std::string("direct-solve-oracle-") +
                   (form == kHcurl ? "curl" : "div"),
               r.converged && rel <= 1e-5,
               std::to_string(h.system(0).rows()) + " dofs, rel diff " + fmt(rel));
    }
}

// ---------------------------------------------------------------- 4
void criterion_mesh_independence()
{
    for (const int form : {int(kHcurl), int(kHdiv)})
    {
        std::vector<int> its;
        std::vector<int> dofs;
        for (int ref = 1; ref <= 3; ++ref)
        {
            Mesh m = generate_cube_mesh(4);
            for (int r = 0; r < ref; ++r)
                m = uniform_refine(m);
            HierarchyOptions opt;
            opt.levels = 3;
            opt.target_order = 0;
            const Hierarchy h(m, form, Coefficient::constant(1, 1), opt);
            const auto B = make_amge_preconditioner(h);
            const MatrixOperator A(h.system(0));
            const PcgResult r = pcg(A, *B, h.constant_load(), 1e-6, 500);
            its.push_back(r.converged ? r.iterations : 100000);
            dofs.push_back(h.system(0).rows());
        }
        const int cap = form == kHcurl ? 120 : 60;
        bool ok = true;
        for (const int k : its)
            ok = ok && k <= cap;
        for (std::size_t k = 0; k + 1 < its.size(); ++k)
            ok = ok && its[k + 1] <= 1.25 * its[k];
        std::ostringstream detail;
        detail << "its";
        for (std::size_t k = 0; k < its.size(); ++k)
            detail << ' ' << its[k] << "@" << dofs[k];
        report(4,
               std::string("mesh-independence-") +
                   (form == kHcurl ? "curl" : "div"),
               ok, detail.str());
    }
}

// ---------------------------------------------------------------- 5
void criterion_jump_coefficients()
{
    for (const int form : {int(kHcurl), int(kHdiv)})
    {
        Mesh m = generate_cube_mesh(4);
        for (int r = 0; r < 2; ++r)
            m = uniform_refine(m);
        m = assign_attribute_by_region(
            m,
            [](const Point& p) {
                return p[0] > 0.25 && p[0] < 0.75 && p[1] > 0.25 && p[1] < 0.75 &&
                       p[2] > 0.25 && p[2] < 0.75;
            },
            2);
        Coefficient coeff;
        coeff.set(1, 1.641, 0.2);
        coeff.set(2, 0.00188, 2000.0);
        HierarchyOptions opt;
        opt.levels = 3;
        opt.target_order = 0;
        const Hierarchy h(m, form, coeff, opt);
        const auto B = make_amge_preconditioner(h);
        const MatrixOperator A(h.system(0));
        const PcgResult r = pcg(A, *B, h.constant_load(), 1e-6, 1000);
        const int cap = form == kHcurl ? 300 : 150;
        report(5,
               std::string("jump-coefficients-") +
                   (form == kHcurl ? "curl" : "div"),
               r.converged && r.iterations <= cap,
               std::to_string(r.iterations) + " its at " +
                   std::to_string(h.system(0).rows()) + " dofs");
    }
}

// ---------------------------------------------------------------- 6
void criterion_hybrid_necessity()
{
    for (const int form : {int(kHcurl), int(kHdiv)})
    {
        Mesh m = generate_cube_mesh(2);
        for (int r = 0; r < 2; ++r)
            m = uniform_refine(m);
        HierarchyOptions opt;
        opt.levels = 3;
        opt.target_order = 0;
        const Hierarchy h(m, form, Coefficient::constant(1, 1), opt);
        const MatrixOperator A(h.system(0));
        const Vector b = h.constant_load();

        auto run = [&](bool hybrid) {
            std::vector<std::shared_ptr<const Smoother>> sm;
            for (int l = 0; l + 1 < h.n_levels(); ++l)
            {
                if (hybrid)
                    sm.push_back(std::make_shared<HybridSmoother>(
                        h.system(l), h.kernel_transfer(l), 2));
                else
                    sm.push_back(std::make_shared<L1SgsSmoother>(h.system(l), 2));
            }
            const VCyclePreconditioner V(
                h, sm, make_coarse_solver(h, CoarseSolverKind::AuxPcg));
            return pcg(A, V, b, 1e-6, 3000);
        };
        const PcgResult with = run(true);
        const PcgResult without = run(false);
        const bool ok = with.converged && without.iterations >= 2 * with.iterations;
        report(6,
               std::string("hybrid-necessity-") +
                   (form == kHcurl ? "curl" : "div"),
               ok,
               "hybrid " + std::to_string(with.iterations) + ", primary-only " +
                   std::to_string(without.iterations));
    }
}

// ---------------------------------------------------------------- 7
void criterion_complexities()
{
    for (const int form : {int(kHcurl), int(kHdiv)})
    {
        Mesh m = generate_cube_mesh(4);
        for (int r = 0; r < 2; ++r)
            m = uniform_refine(m);
        HierarchyOptions opt;
        opt.levels = 3;
        opt.factor = 8;
        opt.target_order = 0;
        const Hierarchy h(m, form, Coefficient::constant(1, 1), opt);
        const auto [gc, oc] = h.complexities();
        report(7,
               std::string("grid-complexity-") +
                   (form == kHcurl ? "curl" : "div"),
               gc >= 1.0 && gc <= 1.35, "gc " + fmt(gc) + ", oc " + fmt(oc));
    }
}

// ---------------------------------------------------------------- 8
void criterion_symmetry_positivity()
{
    for (const int form : {int(kHcurl), int(kHdiv)})
    {
        const Mesh m = uniform_refine(generate_cube_mesh(2));
        HierarchyOptions opt;
        opt.levels = 3;
        opt.target_order = 0;
        const Hierarchy h(m, form, Coefficient::constant(1, 1), opt);
        const int n = h.system(0).rows();

        std::vector<std::shared_ptr<const Smoother>> sm;
        for (int l = 0; l + 1 < h.n_levels(); ++l)
            sm.push_back(std::make_shared<HybridSmoother>(
                h.system(l), h.kernel_transfer(l), 2));
        const VCyclePreconditioner V(
            h, sm, make_coarse_solver(h, CoarseSolverKind::Direct));
        const AuxSpacePreconditioner W(h.system(0), form, h.nodal_interp(0),
                                       h.kernel_transfer(0),
                                       h.nodal_interp_prev(0),
                                       h.kernel_transfer_prev(0), 2);

        double worst_sym = 0.0;
        bool positive = true;
        for (unsigned s = 0; s < 20; ++s)
        {
            const Vector r1 = random_vec(n, 1000 + s);
            const Vector r2 = random_vec(n, 2000 + s);
            for (const LinOp* B : {static_cast<const LinOp*>(&V),
                                   static_cast<const LinOp*>(&W)})
            {
                const double a = dot(r1, B->apply(r2));
                const double b = dot(r2, B->apply(r1));
                worst_sym = std::max(worst_sym,
                                     std::abs(a - b) / std::max(1.0, std::abs(a)));
                positive = positive && dot(r1, B->apply(r1)) > 0.0;
            }
        }
        report(8,
               std::string("preconditioner-symmetry-positivity-") +
                   (form == kHcurl ? "curl" : "div"),
               worst_sym <= 1e-10 && positive, "max asym " + fmt(worst_sym));
    }
}

} // namespace

int main()
{
    const auto t0 = std::chrono::steady_clock::now();
    criterion_invariants();
    criterion_identity_oracle();
    criterion_direct_oracle();
    criterion_mesh_independence();
    criterion_jump_coefficients();
    criterion_hybrid_necessity();
    criterion_complexities();
    criterion_symmetry_positivity();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT")
              << " (" << secs << " s)\n";
    return g_failures == 0 ? 0 : 1;
}
