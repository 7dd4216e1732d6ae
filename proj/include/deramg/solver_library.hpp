// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_SOLVER_LIBRARY_HPP
#define DERAMG_SOLVER_LIBRARY_HPP

#include <map>
#include <string>

#include "deramg/solvers.hpp"

namespace deramg
{

struct SolveOutcome
{
    Vector x;
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Named solver/preconditioner declarations wired together by reference,
/// parsed from a JSON document:
///   {"solvers": {"name": {"type": "...", ...}, ...}}
/// Types and their keys:
///   jacobi   : sweeps, damping
///   l1-sgs   : sweeps
///   hybrid   : sweeps
///   vcycle   : smoother (name), coarse (name), levels (0 = all)
///   pcg      : preconditioner (name), rel_tol, max_iterations
///   direct   : (none)
///   aux-space: sweeps
class SolverLibrary
{
public:
    static SolverLibrary parse(const std::string& json_text);
    static SolverLibrary from_file(const std::string& path);

    /// pcg(vcycle(hybrid, 5 aux-space pcg sweeps)) under the given name
    static SolverLibrary default_library(const std::string& name = "default");

    bool has(const std::string& name) const { return specs_.count(name) > 0; }
    std::vector<std::string> names() const;

    /// Instantiate a named solver as a preconditioner operator acting on
    /// the hierarchy's level-l system. The returned operator references the
    /// hierarchy; keep it alive.
    std::unique_ptr<LinOp> build_operator(const std::string& name,
                                          const Hierarchy& h, int level = 0) const;

    /// Run a top-level solver (type pcg or direct) on the fine system.
    SolveOutcome solve(const std::string& name, const Hierarchy& h,
                       const Vector& b) const;

private:
    struct Spec
    {
        std::string type;
        int sweeps = 2;
        double damping = 1.0;
        int max_iterations = 1000;
        double rel_tol = 1e-6;
        int levels = 0;
        std::string smoother;
        std::string coarse;
        std::string preconditioner;
    };

    const Spec& spec(const std::string& name) const;
    void validate() const;
    std::shared_ptr<const Smoother> build_smoother(const std::string& name,
                                                   const Hierarchy& h,
                                                   int level) const;

    std::map<std::string, Spec> specs_;
};

} // namespace deramg

#endif
