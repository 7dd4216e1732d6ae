// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/app.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <set>

#include "deramg/matrix_market.hpp"
#include "deramg/svd.hpp"

namespace deramg
{

namespace
{

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
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

} // namespace

Mesh build_run_mesh(const RunConfig& cfg)
{
    Mesh mesh = cfg.mesh_path.empty() ? generate_cube_mesh(cfg.cube)
                                      : parse_mesh_file(cfg.mesh_path);
    for (int r = 0; r < cfg.refine; ++r)
        mesh = uniform_refine(mesh);
    if (cfg.inner_box)
        mesh = assign_attribute_by_region(
            mesh,
            [](const Point& p) {
                return p[0] > 0.25 && p[0] < 0.75 && p[1] > 0.25 && p[1] < 0.75 &&
                       p[2] > 0.25 && p[2] < 0.75;
            },
            2);
    return mesh;
}

Coefficient run_coefficient(const RunConfig& cfg, const Mesh& mesh)
{
    std::set<int> attrs;
    for (int e = 0; e < mesh.n_elements(); ++e)
        attrs.insert(mesh.element_attribute(e));
    Coefficient coeff;
    for (const int a : attrs)
    {
        const double alpha =
            cfg.alpha.count(a) ? cfg.alpha.at(a) : (cfg.alpha.empty() ? 1.0 : -1.0);
        const double beta =
            cfg.beta.count(a) ? cfg.beta.at(a) : (cfg.beta.empty() ? 1.0 : -1.0);
        DERAMG_REQUIRE(alpha > 0.0 && beta > 0.0, ConfigError,
                       "missing or invalid coefficients for attribute " +
                           std::to_string(a));
        coeff.set(a, alpha, beta);
    }
    return coeff;
}

namespace
{

Hierarchy build_hierarchy(const RunConfig& cfg, const Mesh& mesh,
                          const Coefficient& coeff)
{
    HierarchyOptions opt;
    opt.levels = cfg.levels;
    opt.factor = cfg.factor;
    opt.target_order = cfg.target_order;
    opt.seed = cfg.seed;
    opt.trivial_partition = cfg.trivial_partition;
    return Hierarchy(mesh, cfg.form, coeff, opt);
}

SolverLibrary load_library(const RunConfig& cfg)
{
    if (cfg.solver_config_path.empty())
        return SolverLibrary::default_library(cfg.solver_name);
    return SolverLibrary::from_file(cfg.solver_config_path);
}

} // namespace

RunReport run_benchmark(const RunConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Mesh mesh = build_run_mesh(cfg);
    const Coefficient coeff = run_coefficient(cfg, mesh);

    if (!cfg.dump_topology_path.empty())
    {
        const auto steps = coarsen_recursive(
            fine_topology(mesh), std::vector<int>(cfg.levels - 1, cfg.factor),
            cfg.seed);
        std::ofstream os(cfg.dump_topology_path);
        DERAMG_REQUIRE(os.good(), Error,
                       "cannot open " + cfg.dump_topology_path + " for writing");
        for (std::size_t l = 0; l < steps.size(); ++l)
        {
            os << "level " << l + 1 << '\n';
            dump_topology(steps[l], os);
        }
    }

    Hierarchy h = build_hierarchy(cfg, mesh, coeff);
    if (cfg.corrupt_p)
        h.corrupt_prolongator();
    const double setup_s = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const Vector b = h.constant_load();
    SolveOutcome outcome;
    if (cfg.solver_config_path.empty())
    {
        // default stack: AMGe V-cycle preconditioned PCG honoring --tol
        const auto B = make_amge_preconditioner(h);
        const MatrixOperator A(h.system(0));
        const PcgResult r = pcg(A, *B, b, cfg.tol, 2000);
        outcome.x = r.x;
        outcome.iterations = r.iterations;
        outcome.converged = r.converged;
        outcome.rel_residual =
            r.residuals.empty() || r.residuals.front() == 0.0
                ? 0.0
                : r.residuals.back() / r.residuals.front();
    }
    else
        outcome = load_library(cfg).solve(cfg.solver_name, h, b);
    const double solve_s = seconds_since(t1);

    if (!cfg.export_dir.empty())
        export_hierarchy(h, cfg.export_dir);

    RunReport rep;
    rep.form = cfg.form == kHcurl ? "curl" : "div";
    rep.levels = h.n_levels();
    rep.fine_dofs = h.system(0).rows();
    rep.iterations = outcome.iterations;
    rep.rel_residual = outcome.rel_residual;
    const auto [gc, oc] = h.complexities();
    rep.gc = gc;
    rep.oc = oc;
    rep.setup_s = cfg.no_timing ? 0.0 : setup_s;
    rep.solve_s = cfg.no_timing ? 0.0 : solve_s;
    rep.converged = outcome.converged;
    for (int l = 0; l < h.n_levels(); ++l)
        rep.level_sizes.emplace_back(h.system(l).rows(), h.system(l).nnz());
    return rep;
}

void write_csv(const RunReport& r, std::ostream& os)
{
    os << "form,levels,fine_dofs,iterations,rel_residual,gc,oc,setup_s,solve_s\n";
    os.precision(12);
    os << r.form << ',' << r.levels << ',' << r.fine_dofs << ',' << r.iterations
       << ',' << r.rel_residual << ',' << r.gc << ',' << r.oc << ','
       << r.setup_s << ',' << r.solve_s << '\n';
}

namespace
{

struct CheckPrinter
{
    std::ostream& os;
    int failures = 0;

    void operator()(const std::string& name, bool ok, double value)
    {
        os << (ok ? "ok   " : "FAIL ") << name << " max=" << value << '\n';
        if (!ok)
            ++failures;
    }
};

} // namespace

int run_verify(const RunConfig& cfg, std::ostream& os)
{
    const Mesh mesh = build_run_mesh(cfg);
    const Coefficient coeff = run_coefficient(cfg, mesh);
    Hierarchy h = [&] {
        HierarchyOptions opt;
        opt.levels = cfg.levels;
        opt.factor = cfg.factor;
        opt.target_order = cfg.target_order;
        opt.seed = cfg.seed;
        opt.trivial_partition = cfg.trivial_partition;
        opt.coarsen.run_checks = false; // the explicit checks below report
        return Hierarchy(mesh, cfg.form, coeff, opt);
    }();
    if (cfg.corrupt_p)
        h.corrupt_prolongator();

    CheckPrinter check{os};

    // finest complex is exact
    {
        double worst = 0.0;
        for (int s = 0; s < 2; ++s)
        {
            const SparseMatrix DD =
                multiply(h.level(0).derivative[s + 1], h.level(0).derivative[s]);
            worst = std::max(worst, max_abs(DD));
        }
        check("fine-complex-DD", worst == 0.0, worst);
    }

    for (int l = 0; l + 1 < h.n_levels(); ++l)
    {
        const SequenceLevel& fine = h.level(l);
        const auto& P = h.sequence_p(l);
        const auto& Pi = h.sequence_pi(l);
        const SequenceLevel& coarse = h.level(l + 1);
        const std::string tag = "-l" + std::to_string(l + 1);

        double worst = 0.0;
        for (int s = 0; s < 4; ++s)
            worst = std::max(
                worst, max_abs(add(multiply(Pi[s], P[s]),
                                   SparseMatrix::identity(coarse.dims[s]), -1.0)));
        check("right-inverse" + tag, worst <= 1e-10, worst);

        worst = 0.0;
        for (int s = 0; s < 2; ++s)
            worst = std::max(worst, max_abs(multiply(coarse.derivative[s + 1],
                                                     coarse.derivative[s])));
        check("coarse-complex-DD" + tag, worst <= 1e-12, worst);

        double commut = 0.0, compat = 0.0;
        for (int s = 0; s < 3; ++s)
        {
            const SparseMatrix Dop = fine.derivative_op(s);
            commut = std::max(commut,
                              max_abs(add(multiply(coarse.derivative[s], Pi[s]),
                                          multiply(Pi[s + 1], Dop), -1.0)));
            compat = std::max(compat,
                              max_abs(add(multiply(Dop, P[s]),
                                          multiply(P[s + 1], coarse.derivative[s]),
                                          -1.0)));
        }
        check("commutativity" + tag, commut <= 1e-10, commut);
        check("compatibility" + tag, compat <= 1e-10, compat);

        // PV unit integrals through the coarse integral weights
        double pv_worst = 0.0;
        for (int s = 0; s < 4; ++s)
        {
            const SparseMatrix PiPs = multiply(Pi[s], P[s]);
            for (int d = 0; d < coarse.dims[s]; ++d)
                if (coarse.dof_is_pv[s][d])
                    pv_worst = std::max(pv_worst,
                                        std::abs(PiPs.get(d, d) - 1.0));
        }
        check("pv-scaling" + tag, pv_worst <= 1e-12, pv_worst);

        if (coarse.dims[kHcurl] <= 500)
        {
            const int r0 =
                rank(DenseMatrix::from_sparse(coarse.derivative[0]), 1e-8);
            const int r1 =
                rank(DenseMatrix::from_sparse(coarse.derivative[1]), 1e-8);
            const int r2 =
                rank(DenseMatrix::from_sparse(coarse.derivative[2]), 1e-8);
            const bool ok = (coarse.dims[0] - r0 == 1) &&
                            (coarse.dims[1] - r1 == r0) &&
                            (coarse.dims[2] - r2 == r1) && (r2 == coarse.dims[3]);
            check("exactness-ranks" + tag, ok, double(r0 + r1 + r2));
        }
    }

    // V-cycle symmetry with the direct coarse solve
    {
        std::vector<std::shared_ptr<const Smoother>> sm;
        for (int l = 0; l + 1 < h.n_levels(); ++l)
            sm.push_back(std::make_shared<HybridSmoother>(
                h.system(l), h.kernel_transfer(l), 2));
        const VCyclePreconditioner V(
            h, sm, make_coarse_solver(h, CoarseSolverKind::Direct));
        double worst = 0.0;
        const int n = h.system(0).rows();
        for (unsigned s = 0; s < 10; ++s)
        {
            const Vector r1 = random_vec(n, 900 + s);
            const Vector r2 = random_vec(n, 950 + s);
            const double a = dot(r1, V.apply(r2));
            const double b = dot(r2, V.apply(r1));
            worst = std::max(worst,
                             std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
        check("vcycle-symmetry", worst <= 1e-10, worst);
    }

    return check.failures;
}

void export_hierarchy(const Hierarchy& h, const std::string& dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    DERAMG_REQUIRE(!ec, Error, "cannot create export directory " + dir);

    for (int l = 0; l < h.n_levels(); ++l)
    {
        const std::string lv = "_l" + std::to_string(l + 1) + ".mtx";
        write_matrix_market(h.system(l), dir + "/A" + lv);
        for (int s = 0; s < 3; ++s)
            write_matrix_market(h.level(l).derivative[s],
                                dir + "/D" + std::to_string(s + 1) + lv);
        if (l + 1 < h.n_levels())
            for (int s = 0; s < 4; ++s)
            {
                write_matrix_market(h.sequence_p(l)[s],
                                    dir + "/P" + std::to_string(s + 1) + lv);
                write_matrix_market(h.sequence_pi(l)[s],
                                    dir + "/Pi" + std::to_string(s + 1) + lv);
            }
    }
}

} // namespace deramg
