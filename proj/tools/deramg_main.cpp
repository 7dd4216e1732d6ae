// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "deramg/app.hpp"

namespace
{

// exit codes: 2 config/flags, 3 mesh, 4 hierarchy construction,
// 5 solver non-convergence, 6 I/O

int parse_attr_values(const std::vector<std::string>& items,
                      std::map<int, double>& out, const char* what)
{
    for (const std::string& item : items)
    {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
        {
            std::cerr << "error: " << what << " expects ATTR:VALUE, got '" << item
                      << "'\n";
            return 2;
        }
        try
        {
            const int attr = std::stoi(item.substr(0, colon));
            const double value = std::stod(item.substr(colon + 1));
            out[attr] = value;
        }
        catch (const std::exception&)
        {
            std::cerr << "error: cannot parse " << what << " '" << item << "'\n";
            return 2;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"AMGe de Rham hierarchies and H(curl)/H(div) solvers"};

    deramg::RunConfig cfg;
    std::string form = "div";
    std::vector<std::string> alpha_items, beta_items;
    bool verify = false;
    int cube = 0;

    app.add_option("--mesh", cfg.mesh_path, "mesh file (amge-mesh v1)");
    app.add_option("--cube", cube, "unit cube subdivisions per axis");
    app.add_option("--refine", cfg.refine, "uniform refinements")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--form", form, "curl | div");
    app.add_option("--levels", cfg.levels, "hierarchy levels")
        ->check(CLI::PositiveNumber);
    app.add_option("--factor", cfg.factor, "coarsening factor");
    app.add_option("--target-order", cfg.target_order,
                   "polynomial target order");
    app.add_option("--alpha", alpha_items, "per-attribute alpha, ATTR:VALUE");
    app.add_option("--beta", beta_items, "per-attribute beta, ATTR:VALUE");
    app.add_flag("--inner-box", cfg.inner_box,
                 "tag the [0.25,0.75]^3 inclusion with attribute 2");
    app.add_option("--solver-config", cfg.solver_config_path,
                   "JSON solver library");
    app.add_option("--solver", cfg.solver_name, "named solver to run");
    app.add_option("--tol", cfg.tol, "PCG relative tolerance");
    app.add_option("--report", cfg.report_path, "CSV report path");
    app.add_option("--export", cfg.export_dir, "MatrixMarket export directory");
    app.add_option("--dump-topology", cfg.dump_topology_path,
                   "agglomerated topology listing");
    app.add_option("--seed", cfg.seed, "partitioner seed");
    app.add_flag("--verify", verify, "run the invariant suite and exit");
    app.add_flag("--trivial-partition", cfg.trivial_partition,
                 "identity coarsening (testing)");
    app.add_flag("--corrupt-p", cfg.corrupt_p,
                 "corrupt a prolongator entry (fault-injection test hook)");
    app.add_flag("--no-timing", cfg.no_timing, "report zero timings");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (form == "curl")
        cfg.form = deramg::kHcurl;
    else if (form == "div")
        cfg.form = deramg::kHdiv;
    else
    {
        std::cerr << "error: --form must be curl or div\n";
        return 2;
    }
    if (cube > 0)
        cfg.cube = cube;
    else if (cfg.mesh_path.empty())
    {
        std::cerr << "error: provide --mesh PATH or --cube N\n";
        return 2;
    }
    if (parse_attr_values(alpha_items, cfg.alpha, "--alpha") ||
        parse_attr_values(beta_items, cfg.beta, "--beta"))
        return 2;

    // fail early on mesh problems for a precise exit code
    try
    {
        deramg::build_run_mesh(cfg);
    }
    catch (const std::exception& e)
    {
        std::cerr << "mesh error: " << e.what() << '\n';
        return 3;
    }

    try
    {
        if (verify)
        {
            const int failures = deramg::run_verify(cfg, std::cout);
            return failures == 0 ? 0 : 1;
        }

        const deramg::RunReport rep = deramg::run_benchmark(cfg);
        if (cfg.report_path.empty())
            deramg::write_csv(rep, std::cout);
        else
        {
            std::ofstream os(cfg.report_path);
            if (!os.good())
            {
                std::cerr << "error: cannot write " << cfg.report_path << '\n';
                return 6;
            }
            deramg::write_csv(rep, os);
        }
        if (!rep.converged)
        {
            std::cerr << "error: solver did not reach the requested tolerance\n";
            return 5;
        }
        return 0;
    }
    catch (const deramg::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const deramg::UnknownAttribute& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const deramg::ParseError& e)
    {
        std::cerr << "mesh error: " << e.what() << '\n';
        return 3;
    }
    catch (const deramg::Error& e)
    {
        std::cerr << "hierarchy error: " << e.what() << '\n';
        return 4;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 6;
    }
}
