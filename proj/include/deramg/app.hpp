// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_APP_HPP
#define DERAMG_APP_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "deramg/hierarchy.hpp"
#include "deramg/solver_library.hpp"

namespace deramg
{

/// Benchmark/verification run configuration (mirrors the CLI flags).
struct RunConfig
{
    std::string mesh_path; // used when nonempty, otherwise --cube
    int cube = 2;
    int refine = 0;
    int form = kHdiv;
    int levels = 3;
    int factor = 8;
    int target_order = 1;
    std::map<int, double> alpha; // per attribute
    std::map<int, double> beta;
    bool inner_box = false;
    std::string solver_config_path;
    std::string solver_name = "default";
    double tol = 1e-6;
    std::string report_path;
    std::string export_dir;
    std::string dump_topology_path;
    unsigned seed = 0;
    bool trivial_partition = false;
    bool corrupt_p = false; // fault-injection hook for verify
    bool no_timing = false;
};

struct RunReport
{
    std::string form;
    int levels = 0;
    int fine_dofs = 0;
    int iterations = 0;
    double rel_residual = 0.0;
    double gc = 0.0;
    double oc = 0.0;
    double setup_s = 0.0;
    double solve_s = 0.0;
    bool converged = false;
    std::vector<std::pair<int, long long>> level_sizes; // (dofs, nnz)
};

Mesh build_run_mesh(const RunConfig& cfg);
Coefficient run_coefficient(const RunConfig& cfg, const Mesh& mesh);

/// Builds the hierarchy, solves the constant-source benchmark, and fills
/// the report. Throws on configuration/mesh/hierarchy errors; a
/// non-converged solve is reported through the flag.
RunReport run_benchmark(const RunConfig& cfg);

void write_csv(const RunReport& r, std::ostream& os);

/// Invariant suite over the configured mesh/hierarchy; prints one
/// machine-readable line per check ("ok <name> ..." / "FAIL <name> ...").
/// Returns the number of failed checks.
int run_verify(const RunConfig& cfg, std::ostream& os);

/// MatrixMarket export of the hierarchy operators:
/// A_l<l>.mtx, D<i>_l<l>.mtx, P<i>_l<l>.mtx, Pi<i>_l<l>.mtx (1-based i).
void export_hierarchy(const Hierarchy& h, const std::string& dir);

} // namespace deramg

#endif
